//! Recovering a permutation with the decision procedure as an oracle.
//!
//! Column by column, a candidate index `j` is moved to the front of `A`,
//! both sides are refined by the diagonal sandwich `diag(first column) · X ·
//! diag(first row)`, and the trailing principal submatrices are tested for
//! p-similarity. The first candidate that passes is kept.

use serde::{Deserialize, Serialize};

use crate::bpsay::{check_psim, BpsayConfig};
use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::pcm::shift_and_translate;
use crate::symbols::{consistent_substitute, is_diag_distinct, SymbolId, SymbolMatrix};
use crate::symsqr::sym_mult;

/// Symmetric transposition of indices `i` and `j`.
pub fn exchange_ij<T: Clone>(a: &SquareArray<T>, i: usize, j: usize) -> Result<SquareArray<T>> {
    let n = a.dim();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, dim: n });
        }
    }
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, j);
    Ok(a.permuted(&p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindPermConfig {
    pub bpsay: BpsayConfig,
    /// Accept the last remaining candidate of a scan without testing it. If
    /// the inputs are p-similar, one candidate must work, and the final
    /// verification still checks the whole permutation.
    pub skip_forced_candidate: bool,
}

impl Default for FindPermConfig {
    fn default() -> Self {
        FindPermConfig { bpsay: BpsayConfig::default(), skip_forced_candidate: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindPermResult {
    pub psim: bool,
    /// 0-based; `M1(p, p) = M2` when `psim` holds.
    pub p: Vec<usize>,
    pub verified: bool,
    pub bpsay_calls: usize,
}

fn sandwich(x: &SymbolMatrix) -> Result<SquareArray<[SymbolId; 3]>> {
    let first_col: Vec<SymbolId> = x.column(0).copied().collect();
    sym_mult(&first_col, x, x.row(0))
}

/// Finds `p` with `M1(p, p) = M2`, or reports that none exists.
pub fn find_permutation<T: Ord + Clone>(
    m1: &SquareArray<T>,
    m2: &SquareArray<T>,
    cfg: &FindPermConfig,
) -> Result<FindPermResult> {
    m1.check_same_dim(m2)?;
    let m = m1.dim();
    let mut p: Vec<usize> = (0..m).collect();
    let mut calls = 1;
    if !check_psim(m1, m2, &cfg.bpsay)?.psim {
        return Ok(FindPermResult { psim: false, p, verified: false, bpsay_calls: calls });
    }

    let (a, b) = consistent_substitute(m1, m2)?;
    let beta = u32::try_from(m * m).map_err(|_| Error::SymbolOverflow)?;
    let mut a = shift_and_translate(&a, beta, 0)?;
    let mut b = shift_and_translate(&b, beta, 0)?;
    if !is_diag_distinct(&a) || !is_diag_distinct(&b) {
        return Err(Error::Invariant("shifted inputs are not diagonal-distinct".into()));
    }

    let mut n = m;
    for c in 0..m.saturating_sub(1) {
        for x in 0..c {
            for y in 0..c {
                if m1.get(p[x], p[y]) != m2.get(x, y) {
                    return Err(Error::Invariant(format!(
                        "fixed prefix disagrees at ({x}, {y}) before column {c}"
                    )));
                }
            }
        }
        let dbd = sandwich(&b)?;
        let b11 = *b.get(0, 0);
        let candidates: Vec<usize> = (0..n).filter(|&j| *a.get(j, j) == b11).collect();
        let mut chosen = None;
        for (idx, &j) in candidates.iter().enumerate() {
            let aj1 = exchange_ij(&a, 0, j)?;
            let daj1d = sandwich(&aj1)?;
            let (s, t) = consistent_substitute(&daj1d, &dbd)?;
            let (s22, t22) = (s.trailing(1), t.trailing(1));
            let forced = cfg.skip_forced_candidate && idx + 1 == candidates.len();
            let ok = forced || {
                calls += 1;
                check_psim(&s22, &t22, &cfg.bpsay)?.psim
            };
            if ok {
                chosen = Some((j, s22, t22));
                break;
            }
        }
        let Some((j, s22, t22)) = chosen else {
            return Err(Error::Invariant(format!("no candidate matches at column {c}")));
        };
        p.swap(c, c + j);
        a = s22;
        b = t22;
        n -= 1;
    }

    let verified = m1.permuted(&p) == *m2;
    if !verified {
        return Err(Error::Invariant(format!("recovered permutation {p:?} does not map M1 onto M2")));
    }
    Ok(FindPermResult { psim: true, p, verified, bpsay_calls: calls })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::ValueToken;

    fn tokens(rows: Vec<Vec<i64>>) -> SquareArray<ValueToken> {
        SquareArray::from_rows(rows.into_iter().map(|r| r.into_iter().map(ValueToken::from).collect()).collect())
            .unwrap()
    }

    #[test]
    fn exchange_is_an_involution() {
        let a = SquareArray::from_fn(4, |i, j| 10 * i + j);
        assert_eq!(exchange_ij(&a, 0, 0).unwrap(), a);
        let once = exchange_ij(&a, 1, 3).unwrap();
        assert_eq!(exchange_ij(&once, 1, 3).unwrap(), a);
        assert!(exchange_ij(&a, 0, 4).is_err());
    }

    #[test]
    fn exchange_matches_matrix_product() {
        let a = SquareArray::from_fn(3, |i, j| (3 * i + j) as i64 * 7 % 5);
        let mut pm = [[0i64; 3]; 3];
        pm[0][2] = 1;
        pm[1][1] = 1;
        pm[2][0] = 1;
        let prod = SquareArray::from_fn(3, |i, j| {
            let mut s = 0;
            for k in 0..3 {
                for l in 0..3 {
                    s += pm[i][k] * a.get(k, l) * pm[j][l];
                }
            }
            s
        });
        assert_eq!(exchange_ij(&a, 0, 2).unwrap(), prod);
    }

    #[test]
    fn identity_for_equal_inputs() {
        let a = tokens(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        let r = find_permutation(&a, &a, &FindPermConfig::default()).unwrap();
        assert!(r.psim && r.verified);
        assert_eq!(r.p, vec![0, 1, 2]);
    }

    #[test]
    fn recovers_a_permutation() {
        let a = tokens(vec![vec![0, 1, 1, 0], vec![1, 0, 0, 0], vec![1, 0, 0, 1], vec![0, 0, 1, 0]]);
        let b = a.permuted(&[2, 3, 0, 1]);
        let r = find_permutation(&a, &b, &FindPermConfig::default()).unwrap();
        assert!(r.psim);
        assert_eq!(a.permuted(&r.p), b);
        assert!(r.bpsay_calls <= 4 * 3 / 2 + 1);
    }

    #[test]
    fn nonsymmetric_two_by_two() {
        let a = tokens(vec![vec![5, 1], vec![2, 5]]);
        let b = a.permuted(&[1, 0]);
        for skip in [true, false] {
            let cfg = FindPermConfig { skip_forced_candidate: skip, ..Default::default() };
            let r = find_permutation(&a, &b, &cfg).unwrap();
            assert_eq!(a.permuted(&r.p), b);
        }
    }

    #[test]
    fn not_similar_returns_identity() {
        let a = tokens(vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]);
        let b = tokens(vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        let r = find_permutation(&a, &b, &FindPermConfig::default()).unwrap();
        assert!(!r.psim);
        assert_eq!(r.p, vec![0, 1, 2]);
        assert_eq!(r.bpsay_calls, 1);
    }
}
