//! The blind p-similarity test.
//!
//! Both inputs are substituted with one shared map, turned into color
//! matrices and PCMs, and then squared in lock step. After every squaring
//! the diagonal (or column) mixes of the two sides must agree; the answer is
//! "p-similar" once both patterns stop changing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::pcm::{build_pcm_with, color_matrix, direct_sum_color, pcm_index, EdgeWeights};
use crate::symbols::{
    assign_split, col_mix, consistent_substitute, diag_mix, distinct_count, is_diag_distinct,
    pattern_of, substitute, SubstitutionMode, SymbolId, SymbolMatrix,
};
use crate::symsqr::sym_sqr_unchecked;
use crate::wspm::{PrimesEngine, PrimesHeuristicConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixMode {
    #[default]
    Diag,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    /// Canonical strings, interned and substituted.
    #[default]
    Exact,
    /// Fixed-width numeric squaring over prime symbols.
    Primes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpsayConfig {
    /// Squaring budget; `None` means the PCM dimension plus one confirming
    /// squaring.
    pub max_iters: Option<usize>,
    pub mix_mode: MixMode,
    pub engine: EngineKind,
    pub trace: bool,
    pub substitution: SubstitutionMode,
    pub edge_weights: EdgeWeights,
    /// Largest PCM dimension the exact engine accepts.
    pub exact_cap: usize,
    pub primes: PrimesHeuristicConfig,
}

impl Default for BpsayConfig {
    fn default() -> Self {
        BpsayConfig {
            max_iters: None,
            mix_mode: MixMode::Diag,
            engine: EngineKind::Exact,
            trace: false,
            substitution: SubstitutionMode::Plain,
            edge_weights: EdgeWeights::Weighted,
            exact_cap: 400,
            primes: PrimesHeuristicConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub symbols_s: usize,
    pub symbols_t: usize,
    pub mixes_equal: bool,
    pub stable_s: bool,
    pub stable_t: bool,
    pub mix_digest_s: String,
    pub mix_digest_t: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpsayResult {
    pub psim: bool,
    /// Squarings performed.
    pub iterations: usize,
    /// Squaring after which the mixes first differed.
    pub divergence_iter: Option<usize>,
    pub pcm_dim: usize,
    /// Distinct symbols in the two starting PCMs.
    pub initial_symbols: (usize, usize),
    pub trace: Vec<TraceEntry>,
}

impl BpsayResult {
    fn immediate(psim: bool, pcm_dim: usize) -> Self {
        BpsayResult {
            psim,
            iterations: 0,
            divergence_iter: (!psim).then_some(0),
            pcm_dim,
            initial_symbols: (0, 0),
            trace: Vec::new(),
        }
    }

    /// Squarings needed to reach the stable pattern (the last one only
    /// confirms it). Only meaningful for a positive verdict.
    pub fn stabilized_at(&self) -> usize {
        self.iterations.saturating_sub(1)
    }
}

/// A squaring step shared by the decision loop and the refinement helpers.
pub(crate) enum Squarer {
    Exact(SubstitutionMode),
    Primes(PrimesEngine),
}

impl Squarer {
    pub(crate) fn new(cfg: &BpsayConfig) -> Self {
        match cfg.engine {
            EngineKind::Exact => Squarer::Exact(cfg.substitution),
            EngineKind::Primes => Squarer::Primes(PrimesEngine::new(cfg.primes)),
        }
    }

    /// Squares each matrix and substitutes all results with one shared map.
    pub(crate) fn square(&mut self, ms: &[&SymbolMatrix], iteration: usize) -> Result<Vec<SymbolMatrix>> {
        match self {
            Squarer::Exact(mode) => {
                let strings: Vec<_> = ms.iter().map(|m| sym_sqr_unchecked(m)).collect();
                let parts: Vec<_> = strings.iter().map(|s| (s.index(), s.table())).collect();
                assign_split(&parts, *mode)
            }
            Squarer::Primes(engine) => engine.square(ms, iteration),
        }
    }
}

fn check_engine_cap(n: usize, cfg: &BpsayConfig) -> Result<()> {
    if cfg.engine == EngineKind::Exact && n > cfg.exact_cap {
        return Err(Error::CapExceeded { what: "exact engine PCM dimension", size: n, cap: cfg.exact_cap });
    }
    Ok(())
}

fn budget(n: usize, cfg: &BpsayConfig) -> usize {
    cfg.max_iters.unwrap_or(n + 1).max(1)
}

fn budget_exhausted(n: usize, cfg: &BpsayConfig, cap: usize) -> Error {
    if cfg.max_iters.is_some_and(|m| m <= n) {
        Error::Inconclusive { iteration: cap }
    } else {
        Error::Invariant(format!("no stable pattern after {cap} squarings of a {n}x{n} matrix"))
    }
}

fn fnv1a(words: impl Iterator<Item = u32>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Digest of a mix; it depends only on the multiset, never on positions.
fn mix_digest(m: &SymbolMatrix, mode: MixMode) -> String {
    match mode {
        MixMode::Diag => fnv1a(diag_mix(m).as_slice().iter().map(|s| s.get())),
        MixMode::Column => fnv1a(
            col_mix(m).as_slice().iter().flat_map(|c| c.as_slice().iter().map(|s| s.get()).chain([0])),
        ),
    }
}

fn mixes_equal(s: &SymbolMatrix, t: &SymbolMatrix, mode: MixMode) -> bool {
    match mode {
        MixMode::Diag => diag_mix(s) == diag_mix(t),
        MixMode::Column => col_mix(s) == col_mix(t),
    }
}

/// Substituted PCMs of a substituted pair, or `None` when the pair uses more
/// than `m²` distinct values (then their value sets differ).
pub(crate) fn pcm_pair(
    a: &SymbolMatrix,
    b: &SymbolMatrix,
    weights: EdgeWeights,
) -> Result<Option<(SymbolMatrix, SymbolMatrix)>> {
    let m = a.dim();
    let top = a.as_slice().iter().chain(b.as_slice()).map(|s| s.get() as usize).max().unwrap_or(0);
    if top > m * m {
        return Ok(None);
    }
    let pa = build_pcm_with(&color_matrix(a)?, weights);
    let pb = build_pcm_with(&color_matrix(b)?, weights);
    Ok(Some(consistent_substitute(&pa.values, &pb.values)?))
}

/// Decides whether `m1` and `m2` are permutation similar.
pub fn check_psim<T: Ord>(m1: &SquareArray<T>, m2: &SquareArray<T>, cfg: &BpsayConfig) -> Result<BpsayResult> {
    m1.check_same_dim(m2)?;
    let m = m1.dim();
    if m == 0 {
        return Ok(BpsayResult::immediate(true, 0));
    }
    let (a, b) = consistent_substitute(m1, m2)?;
    let Some((s, t)) = pcm_pair(&a, &b, cfg.edge_weights)? else {
        return Ok(BpsayResult::immediate(false, m * m));
    };
    run_pair(s, t, cfg)
}

/// The squaring loop on two PCMs (or any symmetric, diagonal-distinct pair
/// sharing one symbol map).
pub(crate) fn run_pair(mut s: SymbolMatrix, mut t: SymbolMatrix, cfg: &BpsayConfig) -> Result<BpsayResult> {
    let n = s.dim();
    check_engine_cap(n, cfg)?;
    let mut result = BpsayResult {
        psim: false,
        iterations: 0,
        divergence_iter: None,
        pcm_dim: n,
        initial_symbols: (distinct_count(&s), distinct_count(&t)),
        trace: Vec::new(),
    };
    let mut squarer = Squarer::new(cfg);
    let cap = budget(n, cfg);
    for iteration in 1..=cap {
        let mut next = squarer.square(&[&s, &t], iteration)?;
        let t2 = next.pop().expect("two results");
        let s2 = next.pop().expect("two results");
        result.iterations = iteration;

        let same_mix = mixes_equal(&s2, &t2, cfg.mix_mode);
        let stable_s = pattern_of(&s) == pattern_of(&s2);
        let stable_t = pattern_of(&t) == pattern_of(&t2);
        if cfg.trace {
            result.trace.push(TraceEntry {
                iteration,
                symbols_s: distinct_count(&s2),
                symbols_t: distinct_count(&t2),
                mixes_equal: same_mix,
                stable_s,
                stable_t,
                mix_digest_s: mix_digest(&s2, cfg.mix_mode),
                mix_digest_t: mix_digest(&t2, cfg.mix_mode),
            });
        }
        if !same_mix {
            result.divergence_iter = Some(iteration);
            return Ok(result);
        }
        s = s2;
        t = t2;
        if stable_s && stable_t {
            result.psim = true;
            return Ok(result);
        }
    }
    Err(budget_exhausted(n, cfg, cap))
}

/// Iterated squaring of one matrix until its pattern stops changing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub matrix: SymbolMatrix,
    /// Distinct symbols before the first squaring and after each one.
    pub counts: Vec<usize>,
    /// Squarings needed to reach the stable pattern.
    pub stabilized_at: usize,
}

pub fn refine_to_stable(m: &SymbolMatrix, cfg: &BpsayConfig) -> Result<Refinement> {
    m.require_symmetric()?;
    if !is_diag_distinct(m) {
        return Err(Error::NotDiagDistinct);
    }
    let n = m.dim();
    check_engine_cap(n, cfg)?;
    let mut squarer = Squarer::new(cfg);
    let mut cur = m.clone();
    let mut counts = vec![distinct_count(&cur)];
    let cap = budget(n, cfg);
    for iteration in 1..=cap {
        let next = squarer.square(&[&cur], iteration)?.pop().expect("one result");
        counts.push(distinct_count(&next));
        let stable = pattern_of(&next) == pattern_of(&cur);
        cur = next;
        if stable {
            return Ok(Refinement { matrix: cur, counts, stabilized_at: iteration - 1 });
        }
    }
    Err(budget_exhausted(n, cfg, cap))
}

/// Substituted PCM of a single input.
pub fn pcm_of<T: Ord>(m: &SquareArray<T>, weights: EdgeWeights) -> Result<SymbolMatrix> {
    let a = substitute(m)?;
    let p = build_pcm_with(&color_matrix(&a)?, weights);
    substitute(&p.values)
}

/// Variant that squares the single PCM of the direct sum `A ⊕ B` and then
/// compares the diagonal symbols belonging to `A` with those of `B`.
pub fn check_psim_direct_sum<T: Ord>(
    m1: &SquareArray<T>,
    m2: &SquareArray<T>,
    cfg: &BpsayConfig,
) -> Result<BpsayResult> {
    m1.check_same_dim(m2)?;
    let m = m1.dim();
    if m == 0 {
        return Ok(BpsayResult::immediate(true, 0));
    }
    let (a, b) = consistent_substitute(m1, m2)?;
    let top = a.as_slice().iter().chain(b.as_slice()).map(|s| s.get() as usize).max().unwrap_or(0);
    if top > m * m {
        return Ok(BpsayResult::immediate(false, 4 * m * m));
    }
    let sum = direct_sum_color(&color_matrix(&a)?, &color_matrix(&b)?)?;
    let mut s = substitute(&build_pcm_with(&sum, cfg.edge_weights).values)?;
    let n = s.dim();
    check_engine_cap(n, cfg)?;

    let side = |x: &SymbolMatrix, offset: usize| -> Vec<SymbolId> {
        let mut v: Vec<SymbolId> = (0..m)
            .flat_map(|j| (0..m).map(move |i| (i + offset, j + offset)))
            .map(|(i, j)| {
                let k = pcm_index(2 * m, i, j);
                *x.get(k, k)
            })
            .collect();
        v.sort_unstable();
        v
    };

    let count = distinct_count(&s);
    let mut result = BpsayResult {
        psim: false,
        iterations: 0,
        divergence_iter: None,
        pcm_dim: n,
        initial_symbols: (count, count),
        trace: Vec::new(),
    };
    let mut squarer = Squarer::new(cfg);
    let cap = budget(n, cfg);
    for iteration in 1..=cap {
        let s2 = squarer.square(&[&s], iteration)?.pop().expect("one result");
        result.iterations = iteration;
        let (da, db) = (side(&s2, 0), side(&s2, m));
        let same = da == db;
        if !same && result.divergence_iter.is_none() {
            result.divergence_iter = Some(iteration);
        }
        let stable = pattern_of(&s) == pattern_of(&s2);
        if cfg.trace {
            let k = distinct_count(&s2);
            result.trace.push(TraceEntry {
                iteration,
                symbols_s: k,
                symbols_t: k,
                mixes_equal: same,
                stable_s: stable,
                stable_t: stable,
                mix_digest_s: fnv1a(da.iter().map(|x| x.get())),
                mix_digest_t: fnv1a(db.iter().map(|x| x.get())),
            });
        }
        s = s2;
        if stable {
            result.psim = same;
            if same {
                result.divergence_iter = None;
            }
            return Ok(result);
        }
    }
    Err(budget_exhausted(n, cfg, cap))
}
