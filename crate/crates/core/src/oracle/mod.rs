//! Brute-force ground truth for small inputs.
//!
//! Everything here enumerates permutations (with pruning), so it is only
//! usable up to about nine indices. It exists to check the main path.

mod espp;
pub mod graphs;
mod validate;

pub use espp::espp_pattern;
pub use validate::{validate_corpus, CampaignConfig, CheckReport, Counterexample, Report};

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::pcm::pcm_index;
use crate::symbols::Pattern;

/// Default size cap for the enumerations.
pub const BRUTE_CAP: usize = 9;

/// Calls `visit` with every `p` such that `A(p, p) = B`; stops early when
/// `visit` returns false.
pub fn for_each_isomorphism<T: PartialEq>(
    a: &SquareArray<T>,
    b: &SquareArray<T>,
    cap: usize,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<()> {
    a.check_same_dim(b)?;
    let n = a.dim();
    if n > cap {
        return Err(Error::CapExceeded { what: "brute-force dimension", size: n, cap });
    }
    let mut p = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(a, b, &mut p, &mut used, &mut visit);
    Ok(())
}

/// Depth-first extension of a partial map; returns false to stop.
fn search<T: PartialEq>(
    a: &SquareArray<T>,
    b: &SquareArray<T>,
    p: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let k = p.len();
    let n = a.dim();
    if k == n {
        return visit(p);
    }
    for cand in 0..n {
        if used[cand] || a.get(cand, cand) != b.get(k, k) {
            continue;
        }
        let fits = (0..k).all(|x| a.get(p[x], cand) == b.get(x, k) && a.get(cand, p[x]) == b.get(k, x));
        if !fits {
            continue;
        }
        used[cand] = true;
        p.push(cand);
        let go_on = search(a, b, p, used, visit);
        p.pop();
        used[cand] = false;
        if !go_on {
            return false;
        }
    }
    true
}

/// Exhaustive p-similarity test; the witness satisfies `A(p, p) = B`.
pub fn brute_psim<T: PartialEq>(a: &SquareArray<T>, b: &SquareArray<T>) -> Result<(bool, Option<Vec<usize>>)> {
    brute_psim_capped(a, b, BRUTE_CAP)
}

pub fn brute_psim_capped<T: PartialEq>(
    a: &SquareArray<T>,
    b: &SquareArray<T>,
    cap: usize,
) -> Result<(bool, Option<Vec<usize>>)> {
    let mut witness = None;
    for_each_isomorphism(a, b, cap, |p| {
        witness = Some(p.to_vec());
        false
    })?;
    Ok((witness.is_some(), witness))
}

/// Every automorphism of `M`.
pub fn automorphisms<T: PartialEq>(m: &SquareArray<T>) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_isomorphism(m, m, BRUTE_CAP, |p| {
        out.push(p.to_vec());
        true
    })?;
    Ok(out)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn labels(mut self) -> Vec<usize> {
        (0..self.0.len()).map(|x| self.find(x)).collect()
    }
}

/// Orbits of the automorphism group on the `m²` locations.
pub fn orbits<T: PartialEq>(m: &SquareArray<T>) -> Result<Pattern> {
    let n = m.dim();
    let mut uf = UnionFind::new(n * n);
    for_each_isomorphism(m, m, BRUTE_CAP, |p| {
        for i in 0..n {
            for j in 0..n {
                uf.union(i * n + j, p[i] * n + p[j]);
            }
        }
        true
    })?;
    Ok(Pattern::from_labels(n, &uf.labels()))
}

/// Orbits on the locations of the PCM of `M`, using the automorphisms of
/// `M` lifted to the PCM index space (`(i, j) ↦ (p_i, p_j)`).
pub fn pcm_orbits<T: PartialEq>(m: &SquareArray<T>) -> Result<Pattern> {
    let base = m.dim();
    let n = base * base;
    let mut uf = UnionFind::new(n * n);
    let mut lift = vec![0usize; n];
    for_each_isomorphism(m, m, BRUTE_CAP, |p| {
        for i in 0..base {
            for j in 0..base {
                lift[pcm_index(base, i, j)] = pcm_index(base, p[i], p[j]);
            }
        }
        for a in 0..n {
            for b in 0..n {
                uf.union(a * n + b, lift[a] * n + lift[b]);
            }
        }
        true
    })?;
    Ok(Pattern::from_labels(n, &uf.labels()))
}

/// Merges every cell with the cell of the transposed locations. Symbolic
/// squaring represents `(i, j)` and `(j, i)` by one string, so this is the
/// partition a stable pattern is compared with.
pub fn symmetrize(p: &Pattern) -> Pattern {
    let n = p.dim();
    let labels: Vec<(usize, usize)> = (0..n * n)
        .map(|loc| {
            let (a, b) = (p.cell(loc / n, loc % n), p.cell(loc % n, loc / n));
            (a.min(b), a.max(b))
        })
        .collect();
    Pattern::from_labels(n, &labels)
}

/// [`pcm_orbits`] with transposed locations merged.
pub fn symmetric_pcm_orbits<T: PartialEq>(m: &SquareArray<T>) -> Result<Pattern> {
    Ok(symmetrize(&pcm_orbits(m)?))
}
