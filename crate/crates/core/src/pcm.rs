//! Color matrices and permutation constraint matrices (PCMs).
//!
//! For an `m × m` color matrix `C`, the PCM is the `m² × m²` matrix
//! `D + R` where `D` holds `C` reshaped column-major on its diagonal and `R`
//! is the edge-weighted rook's graph: weight 1 between locations in the same
//! column of `C`, weight 2 between locations in the same row, 0 elsewhere.
//! Location `(i, j)` of `C` is PCM index `j·m + i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symbols::{SymbolId, SymbolMatrix};

/// `out(i, j) = M(i, j) + gamma + (beta if i == j)`.
pub fn shift_and_translate(m: &SymbolMatrix, beta: u32, gamma: u32) -> Result<SymbolMatrix> {
    let n = m.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let add = if i == j { beta.checked_add(gamma) } else { Some(gamma) };
            let v = add
                .and_then(|a| m.get(i, j).get().checked_add(a))
                .and_then(SymbolId::new)
                .ok_or(Error::SymbolOverflow)?;
            out.push(v);
        }
    }
    SquareArray::from_vec(n, out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorMatrix {
    pub values: SymbolMatrix,
    pub beta: u32,
    pub gamma: u32,
}

impl ColorMatrix {
    pub fn dim(&self) -> usize {
        self.values.dim()
    }
}

/// `M + m²I + 2J` for a substituted matrix with entries in `1..=m²`.
pub fn color_matrix(m: &SymbolMatrix) -> Result<ColorMatrix> {
    let n = m.dim();
    let beta = u32::try_from(n * n).map_err(|_| Error::SymbolOverflow)?;
    if let Some(bad) = m.as_slice().iter().find(|s| s.get() > beta) {
        return Err(Error::SymbolOutOfRange { symbol: bad.get() as u64, max: beta as u64 });
    }
    Ok(ColorMatrix { values: shift_and_translate(m, beta, 2)?, beta, gamma: 2 })
}

/// Block matrix `[[A_C, 3J], [3J, B_C]]`.
pub fn direct_sum_color(a: &ColorMatrix, b: &ColorMatrix) -> Result<ColorMatrix> {
    a.values.check_same_dim(&b.values)?;
    let m = a.dim();
    let three = SymbolId::new(3).expect("nonzero");
    let values = SquareArray::from_fn(2 * m, |i, j| match (i < m, j < m) {
        (true, true) => *a.values.get(i, j),
        (false, false) => *b.values.get(i - m, j - m),
        _ => three,
    });
    Ok(ColorMatrix { values, beta: a.beta, gamma: a.gamma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeWeights {
    /// Column edges weigh 1, row edges weigh 2.
    #[default]
    Weighted,
    /// Both kinds of edge weigh 1 (experimental).
    Equal,
}

/// A PCM with its raw values; off-diagonal entries are 0, 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcmMatrix {
    pub values: SquareArray<u32>,
    pub source_dim: usize,
}

impl PcmMatrix {
    pub fn dim(&self) -> usize {
        self.values.dim()
    }
}

#[inline]
pub fn pcm_index(m: usize, i: usize, j: usize) -> usize {
    j * m + i
}

pub fn build_pcm(c: &ColorMatrix) -> PcmMatrix {
    build_pcm_with(c, EdgeWeights::Weighted)
}

pub fn build_pcm_with(c: &ColorMatrix, weights: EdgeWeights) -> PcmMatrix {
    let m = c.dim();
    let row_weight = match weights {
        EdgeWeights::Weighted => 2,
        EdgeWeights::Equal => 1,
    };
    let values = SquareArray::from_fn(m * m, |a, b| {
        let (ia, ja) = (a % m, a / m);
        let (ib, jb) = (b % m, b / m);
        if a == b {
            c.values.get(ia, ja).get()
        } else if ja == jb {
            1
        } else if ia == ib {
            row_weight
        } else {
            0
        }
    });
    PcmMatrix { values, source_dim: m }
}
