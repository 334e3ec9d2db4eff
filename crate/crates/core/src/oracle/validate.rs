use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graphs::{all_graphs, random_diag_distinct, random_graph, random_permutation, random_symbol_matrix, rewire};
use super::{brute_psim, symmetric_pcm_orbits};
use crate::bpsay::{check_psim, pcm_of, refine_to_stable, BpsayConfig, EngineKind};
use crate::error::Result;
use crate::findperm::{find_permutation, FindPermConfig};
use crate::grid::SquareArray;
use crate::symbols::pattern_of;
use crate::wspm::{verify_theorems, WspmLimits};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    /// Largest order of the exhaustive graph corpus.
    pub cap: usize,
    /// Random cases per randomized check.
    pub trials: usize,
    /// Largest dimension of random cases.
    pub random_dim: usize,
    /// Where counterexample files go.
    pub out_dir: Option<PathBuf>,
    /// Directory holding `had-sw-32-1*` and `had-sw-32-2*`.
    pub bliss_dir: Option<PathBuf>,
    pub bpsay: BpsayConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            cap: 5,
            trials: 100,
            random_dim: 6,
            out_dir: None,
            bliss_dir: None,
            bpsay: BpsayConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub detail: String,
    pub matrices: Vec<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    pub skipped: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport { name: name.into(), total: 0, passed: 0, skipped: false, counterexamples: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String, matrices: Vec<Vec<Vec<u32>>>) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else {
            self.counterexamples.push(Counterexample { check: self.name.clone(), detail: detail(), matrices });
        }
    }

    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub campaign_id: String,
    pub seed: u64,
    pub config: CampaignConfig,
    pub checks: Vec<CheckReport>,
    /// Largest number of squarings any positive verdict needed to reach its
    /// stable pattern.
    pub max_stabilization: usize,
    pub ok: bool,
}

fn rows<T: Copy + Into<u32>>(m: &SquareArray<T>) -> Vec<Vec<u32>> {
    m.rows().map(|r| r.iter().map(|&x| x.into()).collect()).collect()
}

fn sym_rows(m: &crate::symbols::SymbolMatrix) -> Vec<Vec<u32>> {
    crate::symbols::raw_rows(m)
}

/// Runs every check of a campaign. Failures are report content, not errors;
/// only I/O on the output directory can fail.
pub fn validate_corpus(cfg: &CampaignConfig) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_stab = 0usize;
    let bp = &cfg.bpsay;
    let mut note = |r: &crate::bpsay::BpsayResult| {
        if r.psim {
            max_stab = max_stab.max(r.stabilized_at());
        }
    };

    // (a) a matrix is always similar to its own symmetric permutations
    let mut permuted = CheckReport::new("permuted_pairs");
    for _ in 0..cfg.trials {
        let m = rng.random_range(1..=cfg.random_dim.max(1));
        let k = rng.random_range(1..=(m * m).min(6) as u32);
        let symmetric = rng.random_bool(0.5);
        let a = random_symbol_matrix(&mut rng, m, k, symmetric);
        let b = a.permuted(&random_permutation(&mut rng, m));
        let res = check_psim(&a, &b, bp);
        if let Ok(r) = &res {
            note(r);
        }
        permuted.record(matches!(res, Ok(ref r) if r.psim), || format!("{res:?}"), vec![sym_rows(&a), sym_rows(&b)]);
    }

    // (b) verdicts against brute force
    let mut oracle = CheckReport::new("oracle_equivalence");
    for n in 1..=cfg.cap {
        let graphs = all_graphs(n);
        for (x, g) in graphs.iter().enumerate() {
            for h in &graphs[x..] {
                let h = h.permuted(&random_permutation(&mut rng, n));
                compare_with_oracle(&mut oracle, g, &h, bp, &mut note);
            }
        }
    }
    for t in 0..cfg.trials {
        let m = cfg.random_dim.max(1);
        let g = random_graph(&mut rng, m, 0.5);
        let h = if t % 2 == 0 { g.permuted(&random_permutation(&mut rng, m)) } else { rewire(&mut rng, &g, 3) };
        compare_with_oracle(&mut oracle, &g, &h, bp, &mut note);
    }

    // (c) recovered permutations
    let mut witness = CheckReport::new("witness_validity");
    let fp = FindPermConfig { bpsay: bp.clone(), ..Default::default() };
    for t in 0..cfg.trials {
        let m = rng.random_range(1..=cfg.random_dim.max(1));
        let a = if t % 2 == 0 {
            random_graph(&mut rng, m, 0.5).map(|&x| x as u32 + 1)
        } else {
            let k = rng.random_range(1..=4);
            random_symbol_matrix(&mut rng, m, k, false).map(|s| s.get())
        };
        let b = a.permuted(&random_permutation(&mut rng, m));
        let res = find_permutation(&a, &b, &fp);
        let bound = m * m.saturating_sub(1) / 2 + 1;
        let ok = matches!(&res, Ok(r) if r.psim && a.permuted(&r.p) == b && r.bpsay_calls <= bound);
        witness.record(ok, || format!("{res:?}"), vec![rows(&a), rows(&b)]);
    }

    // (d) stable PCM pattern against lifted automorphism orbits, transposes merged
    let mut crux = CheckReport::new("orbit_crux");
    for n in 1..=cfg.cap.min(5) {
        for g in all_graphs(n) {
            let res = pcm_of(&g, bp.edge_weights)
                .and_then(|p| refine_to_stable(&p, bp))
                .and_then(|r| Ok((pattern_of(&r.matrix), symmetric_pcm_orbits(&g)?)));
            let ok = matches!(&res, Ok((stable, orbits)) if stable == orbits);
            crux.record(ok, || format!("{res:?}"), vec![rows(&g)]);
        }
    }

    // (e) widely spaced primes theorems
    let mut wspm = CheckReport::new("wspm_theorems");
    for _ in 0..cfg.trials {
        let n = rng.random_range(1..=4);
        let m = random_diag_distinct(&mut rng, n, 6);
        let res = verify_theorems(&m, WspmLimits::default());
        wspm.record(matches!(&res, Ok(r) if r.all_hold()), || format!("{res:?}"), vec![sym_rows(&m)]);
    }

    let mut checks = vec![permuted, oracle, witness, crux, wspm];
    checks.push(bliss_check(cfg));

    let campaign_id = format!("validate-{:016x}", cfg.seed);
    if let Some(dir) = &cfg.out_dir {
        write_counterexamples(dir, &campaign_id, &checks)?;
    }
    let ok = checks.iter().all(CheckReport::ok);
    Ok(Report { campaign_id, seed: cfg.seed, config: cfg.clone(), checks, max_stabilization: max_stab, ok })
}

fn compare_with_oracle(
    report: &mut CheckReport,
    g: &SquareArray<u8>,
    h: &SquareArray<u8>,
    bp: &BpsayConfig,
    note: &mut impl FnMut(&crate::bpsay::BpsayResult),
) {
    let verdict = check_psim(g, h, bp);
    if let Ok(r) = &verdict {
        note(r);
    }
    let truth = brute_psim(g, h).map(|x| x.0);
    let ok = matches!((&verdict, &truth), (Ok(r), Ok(t)) if r.psim == *t);
    report.record(ok, || format!("bpsay {verdict:?}, brute force {truth:?}"), vec![rows(g), rows(h)]);
}

fn find_prefixed(dir: &Path, prefix: &str) -> Option<PathBuf> {
    let mut hits: Vec<PathBuf> = std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with(prefix)))
        .collect();
    hits.sort();
    hits.into_iter().next()
}

/// The optional separation check on the `had-sw-32` pair.
fn bliss_check(cfg: &CampaignConfig) -> CheckReport {
    let mut report = CheckReport::new("bliss_had_sw_32");
    let Some(dir) = &cfg.bliss_dir else {
        report.skipped = true;
        return report;
    };
    let files = (find_prefixed(dir, "had-sw-32-1"), find_prefixed(dir, "had-sw-32-2"));
    let (Some(f1), Some(f2)) = files else {
        report.record(false, || format!("had-sw-32-1/2 not found in {}", dir.display()), Vec::new());
        return report;
    };
    let bp = BpsayConfig { engine: EngineKind::Primes, ..cfg.bpsay.clone() };
    let res = crate::io::parse_input(&f1, None).and_then(|a| {
        let b = crate::io::parse_input(&f2, None)?;
        check_psim(&a.matrix, &b.matrix, &bp)
    });
    let ok = matches!(&res, Ok(r) if !r.psim && r.divergence_iter.is_some_and(|d| d <= 4));
    report.record(ok, || format!("{res:?}"), Vec::new());
    report
}

fn write_counterexamples(dir: &Path, id: &str, checks: &[CheckReport]) -> Result<()> {
    let mut any = false;
    for c in checks {
        for (k, ce) in c.counterexamples.iter().enumerate() {
            if !any {
                std::fs::create_dir_all(dir)?;
                any = true;
            }
            let path = dir.join(format!("{id}-{}-{k}.json", c.name));
            std::fs::write(path, serde_json::to_string_pretty(ce)?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_campaign_passes() {
        let cfg = CampaignConfig { cap: 1, trials: 3, random_dim: 1, ..Default::default() };
        let r = validate_corpus(&cfg).unwrap();
        assert!(r.ok, "{r:#?}");
        assert!(r.checks.iter().find(|c| c.name == "bliss_had_sw_32").unwrap().skipped);
    }
}
