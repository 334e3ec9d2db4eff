//! Widely spaced primes matrices.
//!
//! Replacing each symbol of a symmetric, diagonal-distinct matrix by a prime
//! from a ladder `p(i+1) > m · p(i)²` makes every inner product of the
//! square decodable into its term multiset. That lets ordinary big-integer
//! products reproduce the refinements of symbolic squaring; this module
//! builds such matrices and exposes the comparisons used to check that.
//!
//! [`heuristic`] holds the fixed-width numeric mode used as a fast engine.

pub mod heuristic;
pub mod primes;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symbols::{is_diag_distinct, pattern_of, Pattern, SymbolId, SymbolMatrix};

pub use heuristic::{primes_heuristic_refine, PrimesEngine, PrimesHeuristicConfig};

/// Size limits for the exact big-integer paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WspmLimits {
    pub max_dim: usize,
    pub max_symbols: usize,
}

impl Default for WspmLimits {
    fn default() -> Self {
        WspmLimits { max_dim: 6, max_symbols: 8 }
    }
}

/// Smallest dimension bound used for ladders. Any ladder built for a larger
/// bound satisfies the spacing inequalities of every smaller dimension, and
/// the shipped ladders use this bound.
const LADDER_DIM_FLOOR: usize = 4;

/// Index of the base-ladder prime the upper ladder is stacked on. Stacking
/// on a prime at least as large as `p_n` keeps `p̄1 > m · p_n²` true and lets
/// every small case share the shipped upper ladder.
const UPPER_ANCHOR: usize = 6;

fn ladder_dim(n: usize) -> usize {
    n.max(LADDER_DIM_FLOOR)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WspMatrix {
    values: SquareArray<BigUint>,
    primes: Vec<BigUint>,
    off_count: usize,
}

impl WspMatrix {
    pub fn values(&self) -> &SquareArray<BigUint> {
        &self.values
    }

    /// Primes in ladder order: off-diagonal symbols first.
    pub fn primes(&self) -> &[BigUint] {
        &self.primes
    }

    pub fn off_diagonal_count(&self) -> usize {
        self.off_count
    }

    pub fn pattern(&self) -> Pattern {
        pattern_of(&self.values)
    }

    /// Every diagonal entry exceeds the sum of the off-diagonal entries in
    /// its row.
    pub fn is_diagonally_dominant(&self) -> bool {
        let n = self.values.dim();
        (0..n).all(|i| {
            let off: BigUint =
                (0..n).filter(|&j| j != i).map(|j| self.values.get(i, j)).sum();
            *self.values.get(i, i) > off
        })
    }
}

fn check_input(m: &SymbolMatrix, limits: WspmLimits) -> Result<(Vec<SymbolId>, Vec<SymbolId>)> {
    m.require_symmetric()?;
    if !is_diag_distinct(m) {
        return Err(Error::NotDiagDistinct);
    }
    if m.dim() > limits.max_dim {
        return Err(Error::CapExceeded { what: "wspm dimension", size: m.dim(), cap: limits.max_dim });
    }
    let n = m.dim();
    let mut off: Vec<SymbolId> = Vec::new();
    let mut diag: Vec<SymbolId> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j { &mut diag } else { &mut off }.push(*m.get(i, j));
        }
    }
    for v in [&mut off, &mut diag] {
        v.sort_unstable();
        v.dedup();
    }
    let k = off.len() + diag.len();
    if k > limits.max_symbols {
        return Err(Error::CapExceeded { what: "wspm symbols", size: k, cap: limits.max_symbols });
    }
    Ok((off, diag))
}

fn assemble(m: &SymbolMatrix, off: &[SymbolId], diag: &[SymbolId], primes: &[BigUint]) -> WspMatrix {
    let values = SquareArray::from_fn(m.dim(), |i, j| {
        let s = m.get(i, j);
        let rank = if i == j {
            off.len() + diag.binary_search(s).expect("collected")
        } else {
            off.binary_search(s).expect("collected")
        };
        primes[rank].clone()
    });
    WspMatrix { values, primes: primes.to_vec(), off_count: off.len() }
}

/// Builds `wspm(M)` from the base ladder (`p1 > m`).
pub fn build_wspm(m: &SymbolMatrix) -> Result<WspMatrix> {
    build_wspm_with(m, WspmLimits::default())
}

pub fn build_wspm_with(m: &SymbolMatrix, limits: WspmLimits) -> Result<WspMatrix> {
    let (off, diag) = check_input(m, limits)?;
    let primes = primes::base_ladder(ladder_dim(m.dim()), off.len() + diag.len());
    Ok(assemble(m, &off, &diag, &primes))
}

/// Builds `wspm(P)` for a matrix given only by its pattern.
pub fn build_wspm_from_pattern(p: &Pattern, limits: WspmLimits) -> Result<WspMatrix> {
    build_wspm_with(&p.to_symbols(), limits)
}

pub fn mat_mul(a: &SquareArray<BigUint>, b: &SquareArray<BigUint>) -> Result<SquareArray<BigUint>> {
    a.check_same_dim(b)?;
    let n = a.dim();
    Ok(SquareArray::from_fn(n, |i, j| (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum()))
}

/// `W × W`.
pub fn square(w: &WspMatrix) -> SquareArray<BigUint> {
    mat_mul(&w.values, &w.values).expect("same matrix")
}

/// Pattern of the exact product `W × W`.
pub fn wspm_square_refine(w: &WspMatrix) -> Pattern {
    pattern_of(&square(w))
}

/// The two matrices of the pair construction: `W1` on the base ladder and
/// `W2` on a ladder starting above `m · p²` for a base prime `p ≥ p_n`.
pub fn wspm_pair(m: &SymbolMatrix, limits: WspmLimits) -> Result<(WspMatrix, WspMatrix)> {
    let (off, diag) = check_input(m, limits)?;
    let k = off.len() + diag.len();
    let d = ladder_dim(m.dim());
    let anchor = k.max(UPPER_ANCHOR);
    let base = primes::base_ladder(d, anchor);
    let upper = primes::upper_ladder(d, &base[anchor - 1], k);
    Ok((assemble(m, &off, &diag, &base[..k]), assemble(m, &off, &diag, &upper)))
}

/// Pattern of `min(W1 × W2, (W1 × W2)ᵀ)`.
pub fn wspm_pair_refine(m: &SymbolMatrix) -> Result<Pattern> {
    wspm_pair_refine_with(m, WspmLimits::default())
}

pub fn wspm_pair_refine_with(m: &SymbolMatrix, limits: WspmLimits) -> Result<Pattern> {
    let (w1, w2) = wspm_pair(m, limits)?;
    let p = mat_mul(&w1.values, &w2.values)?;
    let n = p.dim();
    let sym = SquareArray::from_fn(n, |i, j| p.get(i, j).min(p.get(j, i)).clone());
    Ok(pattern_of(&sym))
}

/// Splits an inner product of `W × W` into term multiplicities by peeling
/// off the largest products first. Returns `((a, b), count)` with `a ≤ b`
/// indexing `primes`, or `None` if a remainder is left over.
pub fn decompose_inner_product(value: &BigUint, primes: &[BigUint]) -> Option<Vec<((usize, usize), u64)>> {
    let mut terms: Vec<(BigUint, usize, usize)> = Vec::new();
    for b in 0..primes.len() {
        for a in 0..=b {
            terms.push((&primes[a] * &primes[b], a, b));
        }
    }
    terms.sort_unstable_by(|x, y| y.0.cmp(&x.0));
    let mut rest = value.clone();
    let mut out = Vec::new();
    for (t, a, b) in terms {
        if rest >= t {
            let q = &rest / &t;
            rest -= &q * &t;
            out.push(((a, b), u64::try_from(&q).ok()?));
        }
    }
    (rest == BigUint::ZERO).then(|| {
        out.sort_unstable();
        out
    })
}

/// Outcome of the widely-spaced-primes checks on one matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub dim: usize,
    pub symbols: usize,
    /// `Π(W × W)` refines `Π(W)`.
    pub square_refines: bool,
    /// `W × W` and the symbolic square split the diagonal identically.
    pub diagonal_matches_symbolic: bool,
    /// `Π(min(W1 W2, (W1 W2)ᵀ)) = Π(SymSqr(M))`.
    pub pair_matches_symbolic: bool,
    /// `Π(W̄ × W̄)` refines `Π(SymSqr(W))` with `W̄ = wspm(W × W)`; `None`
    /// when `W × W` has too many symbols for the limits.
    pub twice_is_enough: Option<bool>,
    /// Equal inner products of `W × W` have equal term multisets and
    /// conversely.
    pub products_unique: bool,
    /// Peeling every inner product reproduces its term multiset.
    pub decomposition_ok: bool,
}

impl TheoremReport {
    pub fn all_hold(&self) -> bool {
        self.square_refines
            && self.diagonal_matches_symbolic
            && self.pair_matches_symbolic
            && self.twice_is_enough != Some(false)
            && self.products_unique
            && self.decomposition_ok
    }
}

/// Unordered term multiset of every inner product of `W × W`, as pairs of
/// ladder indices.
fn term_multisets(w: &WspMatrix) -> SquareArray<Vec<(usize, usize)>> {
    let rank = |v: &BigUint| w.primes.iter().position(|p| p == v).expect("entry is a ladder prime");
    let idx = w.values.map(rank);
    let n = idx.dim();
    SquareArray::from_fn(n, |i, j| {
        let mut t: Vec<(usize, usize)> = (0..n)
            .map(|k| {
                let (a, b) = (*idx.get(i, k), *idx.get(k, j));
                (a.min(b), a.max(b))
            })
            .collect();
        t.sort_unstable();
        t
    })
}

fn symbolic_pattern(m: &SymbolMatrix) -> Result<Pattern> {
    let s = crate::symsqr::sym_sqr(m)?;
    Ok(pattern_of(&crate::symbols::sym_sub(&s, crate::symbols::SubstitutionMode::Plain)?))
}

pub fn verify_theorems(m: &SymbolMatrix, limits: WspmLimits) -> Result<TheoremReport> {
    let w = build_wspm_with(m, limits)?;
    let ww = square(&w);
    let sq_pattern = pattern_of(&ww);
    let sym = symbolic_pattern(m)?;

    let multisets = term_multisets(&w);
    let decomposition_ok = ww.as_slice().iter().zip(multisets.as_slice()).all(|(v, terms)| {
        let mut expected: Vec<((usize, usize), u64)> = Vec::new();
        for t in terms {
            match expected.last_mut() {
                Some((last, c)) if last == t => *c += 1,
                _ => expected.push((*t, 1)),
            }
        }
        decompose_inner_product(v, &w.primes) == Some(expected)
    });

    let ww_symbols = crate::symbols::substitute(&ww)?;
    let twice_is_enough = if crate::symbols::distinct_count(&ww_symbols) <= WSPM_TWICE_MAX_SYMBOLS {
        let big = WspmLimits { max_symbols: WSPM_TWICE_MAX_SYMBOLS, ..limits };
        let wbar = build_wspm_with(&ww_symbols, big)?;
        Some(crate::symbols::refines(&wspm_square_refine(&wbar), &sym)?)
    } else {
        None
    };

    Ok(TheoremReport {
        dim: m.dim(),
        symbols: w.primes.len(),
        square_refines: crate::symbols::refines(&sq_pattern, &w.pattern())?,
        diagonal_matches_symbolic: sq_pattern.diagonal_classes() == sym.diagonal_classes(),
        pair_matches_symbolic: wspm_pair_refine_with(m, limits)? == sym,
        twice_is_enough,
        products_unique: sq_pattern == pattern_of(&multisets),
        decomposition_ok,
    })
}

/// Symbol budget for the rebuilt matrix in the two-step check; the shipped
/// base ladder has this many primes.
const WSPM_TWICE_MAX_SYMBOLS: usize = 10;
