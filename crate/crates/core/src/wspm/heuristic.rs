//! Numeric-primes squaring with fixed-width integers.
//!
//! Symbols become ordinary primes (or the integers `1..=k` when there are
//! too many of them), the matrix is squared numerically and the distinct
//! results are substituted back to ids. Unlike the widely spaced
//! construction, unequal term multisets can collide here, so the engine is a
//! heuristic. Any inner product above the ceiling aborts with
//! [`Error::Inconclusive`].

use serde::{Deserialize, Serialize};

use super::primes::is_prime_u64;
use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symbols::{assign_split, pattern_of, Pattern, SubstitutionMode, SymbolId, SymbolMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimesHeuristicConfig {
    /// Largest inner product accepted; products are accumulated in `u128`.
    /// Serialized as a decimal string.
    #[serde(with = "u128_string")]
    pub ceiling: u128,
    /// Re-map symbols to primes before every squaring. When false, later
    /// iterations square the previous numeric values directly.
    pub resubstitute: bool,
    /// Above this many symbols, use `1..=k` instead of the first `k` primes.
    pub prime_symbol_limit: usize,
}

impl Default for PrimesHeuristicConfig {
    fn default() -> Self {
        PrimesHeuristicConfig { ceiling: 1u128 << 120, resubstitute: true, prime_symbol_limit: 10_000 }
    }
}

mod u128_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut c = 2u64;
    while out.len() < k {
        if is_prime_u64(c) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Squaring engine over one or more matrices that share their symbol ids.
#[derive(Debug, Clone)]
pub struct PrimesEngine {
    cfg: PrimesHeuristicConfig,
    carried: Option<Vec<SquareArray<u128>>>,
}

impl PrimesEngine {
    pub fn new(cfg: PrimesHeuristicConfig) -> Self {
        PrimesEngine { cfg, carried: None }
    }

    fn numeric(&self, ms: &[&SymbolMatrix]) -> Vec<SquareArray<u128>> {
        let mut ids: Vec<SymbolId> = ms.iter().flat_map(|m| m.as_slice().iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        let values: Vec<u128> = if ids.len() > self.cfg.prime_symbol_limit {
            (1..=ids.len() as u128).collect()
        } else {
            first_primes(ids.len()).into_iter().map(u128::from).collect()
        };
        ms.iter()
            .map(|m| m.map(|s| values[ids.binary_search(s).expect("collected")]))
            .collect()
    }

    /// Squares every matrix and substitutes the results with one shared map,
    /// diagonal values ranked after off-diagonal ones.
    pub fn square(&mut self, ms: &[&SymbolMatrix], iteration: usize) -> Result<Vec<SymbolMatrix>> {
        let inputs = match self.carried.take() {
            Some(prev) if !self.cfg.resubstitute => prev,
            _ => self.numeric(ms),
        };
        let mut products = Vec::with_capacity(inputs.len());
        for x in &inputs {
            products.push(checked_square(x, self.cfg.ceiling).ok_or(Error::Inconclusive { iteration })?);
        }
        let n = products.first().map_or(0, |p| p.dim());
        let identity = SquareArray::from_fn(n, |i, j| (i * n + j) as u32);
        let parts: Vec<(&SquareArray<u32>, &[u128])> =
            products.iter().map(|p| (&identity, p.as_slice())).collect();
        let out = assign_split(&parts, SubstitutionMode::Plain)?;
        if !self.cfg.resubstitute {
            self.carried = Some(products);
        }
        Ok(out)
    }
}

fn checked_square(x: &SquareArray<u128>, ceiling: u128) -> Option<SquareArray<u128>> {
    let n = x.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let ri = x.row(i);
        for j in 0..n {
            let mut acc: u128 = 0;
            for (k, a) in ri.iter().enumerate() {
                acc = acc.checked_add(a.checked_mul(*x.get(k, j))?)?;
            }
            if acc > ceiling {
                return None;
            }
            out.push(acc);
        }
    }
    SquareArray::from_vec(n, out).ok()
}

/// One heuristic squaring of a single matrix, as a pattern.
pub fn primes_heuristic_refine(m: &SymbolMatrix, cfg: PrimesHeuristicConfig) -> Result<Pattern> {
    let mut engine = PrimesEngine::new(cfg);
    let out = engine.square(&[m], 1)?;
    Ok(pattern_of(&out[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::symbol_matrix;

    #[test]
    fn config_survives_json() {
        let c = PrimesHeuristicConfig::default();
        let v = serde_json::to_value(c).unwrap();
        assert_eq!(v["ceiling"], (1u128 << 120).to_string());
        assert_eq!(serde_json::from_value::<PrimesHeuristicConfig>(v).unwrap(), c);
    }

    #[test]
    fn first_primes_small() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn ceiling_forces_inconclusive() {
        let m = symbol_matrix(vec![vec![3, 1], vec![1, 2]]).unwrap();
        let cfg = PrimesHeuristicConfig { ceiling: 10, ..Default::default() };
        assert!(matches!(primes_heuristic_refine(&m, cfg), Err(Error::Inconclusive { iteration: 1 })));
    }

    #[test]
    fn carried_values_overflow_eventually() {
        let m = symbol_matrix(vec![vec![3, 1], vec![1, 2]]).unwrap();
        let cfg = PrimesHeuristicConfig { resubstitute: false, ceiling: 1 << 40, ..Default::default() };
        let mut e = PrimesEngine::new(cfg);
        let mut cur = m;
        let mut failed_at = None;
        for it in 1..20 {
            match e.square(&[&cur], it) {
                Ok(mut v) => cur = v.pop().unwrap(),
                Err(Error::Inconclusive { iteration }) => {
                    failed_at = Some(iteration);
                    break;
                }
                Err(other) => panic!("{other}"),
            }
        }
        assert!(failed_at.is_some());
    }
}
