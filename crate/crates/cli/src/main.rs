use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use psim_core::bpsay::{check_psim_direct_sum, pcm_of, refine_to_stable, EngineKind, MixMode};
use psim_core::io::{parse_input, InputDocument, InputFormat, Provenance};
use psim_core::oracle::{automorphisms, espp_pattern, orbits, symmetric_pcm_orbits, validate_corpus, CampaignConfig};
use psim_core::pcm::EdgeWeights;
use psim_core::symbols::{pattern_of, substitute, Pattern, SubstitutionMode};
use psim_core::wspm::{verify_theorems, WspmLimits};
use psim_core::{check_psim, find_permutation, BpsayConfig, Error, FindPermConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

/// Permutation similarity of square matrices and isomorphism of graphs.
///
/// Results are printed as JSON on stdout. Exit status: 0 completed, 2 input
/// error, 3 inconclusive, 4 internal invariant violated or counterexample
/// recorded. Set RAYON_NUM_THREADS to limit worker threads.
#[derive(Parser)]
#[command(name = "psim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input format for every input file; detected from the extension or
    /// contents when omitted.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<InputFormat>,
    /// Print JSON on one line.
    #[arg(long, global = true)]
    compact: bool,
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    s.parse()
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether B is a symmetric permutation of A.
    Check {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        /// Square one PCM of the direct sum instead of two PCMs in lock step.
        #[arg(long)]
        direct_sum: bool,
        /// Write one JSON object per squaring to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Find p with A(p, p) = B.
    FindPerm {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Automorphism orbits on the locations of M (brute force, small inputs).
    Orbits {
        m: PathBuf,
        /// Also lift the orbits to the PCM, merge transposed locations and
        /// compare with the stable pattern.
        #[arg(long)]
        pcm: bool,
    },
    /// Pattern of the stacked powers of a symmetric matrix.
    Espp { m: PathBuf },
    /// Check the widely-spaced-primes identities on a symmetric matrix whose
    /// diagonal symbols differ from its off-diagonal symbols.
    WspmVerify { m: PathBuf },
    /// Run the randomized and exhaustive validation campaign.
    Validate {
        /// Largest order of the exhaustive graph corpus.
        #[arg(long, default_value_t = 5)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cases per check.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest dimension of random cases.
        #[arg(long, default_value_t = 6)]
        random_dim: usize,
        /// Directory for counterexample files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory holding the had-sw-32-1 and had-sw-32-2 graphs.
        #[arg(long)]
        bliss_dir: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineOpt {
    Exact,
    Primes,
}

#[derive(Clone, Copy, ValueEnum)]
enum MixOpt {
    Diag,
    Column,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "exact")]
    engine: EngineOpt,
    #[arg(long, value_enum, default_value = "diag")]
    mix: MixOpt,
    /// Squaring budget; a budget below the PCM dimension may end inconclusive.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Give row and column edges of the PCM the same weight.
    #[arg(long)]
    equal_weights: bool,
    /// Number diagonal strings above every product of off-diagonal symbols.
    #[arg(long)]
    spd: bool,
}

impl EngineArgs {
    fn config(&self) -> BpsayConfig {
        BpsayConfig {
            max_iters: self.max_iters,
            mix_mode: match self.mix {
                MixOpt::Diag => MixMode::Diag,
                MixOpt::Column => MixMode::Column,
            },
            engine: match self.engine {
                EngineOpt::Exact => EngineKind::Exact,
                EngineOpt::Primes => EngineKind::Primes,
            },
            edge_weights: if self.equal_weights { EdgeWeights::Equal } else { EdgeWeights::Weighted },
            substitution: if self.spd { SubstitutionMode::Spd } else { SubstitutionMode::Plain },
            ..BpsayConfig::default()
        }
    }
}

/// Failure of a command together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Inconclusive { .. } | Error::SymbolOverflow => EXIT_INCONCLUSIVE,
            e if e.is_input_error() => EXIT_INPUT,
            _ => EXIT_INVARIANT,
        };
        Failure { code, message: e.to_string() }
    }
}

/// JSON document plus the exit status it implies.
struct Outcome {
    body: Value,
    code: u8,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { body, code: 0 }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn load(path: &Path, format: Option<InputFormat>) -> Result<InputDocument, Failure> {
    Ok(parse_input(path, format)?)
}

fn inputs(docs: &[&InputDocument]) -> Value {
    let list: Vec<Value> = docs
        .iter()
        .map(|d| {
            let Provenance { source, bytes, digest, detected_by } = &d.provenance;
            json!({
                "source": source,
                "format": d.format,
                "detected_by": detected_by,
                "dim": d.matrix.dim(),
                "bytes": bytes,
                "digest": digest,
            })
        })
        .collect();
    Value::Array(list)
}

/// Pattern as rows of 1-based cell numbers.
fn pattern_json(p: &Pattern) -> Value {
    let n = p.dim();
    let rows: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| p.cell(i, j) + 1).collect()).collect();
    json!({ "cells": p.num_cells(), "labels": rows })
}

fn write_trace(path: &Path, entries: &[psim_core::bpsay::TraceEntry]) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::from(Error::from(e));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for e in entries {
        serde_json::to_writer(&mut w, e).map_err(|e| Failure::from(Error::from(e)))?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Check { a, b, engine, direct_sum, trace } => {
            let (da, db) = (load(a, format)?, load(b, format)?);
            let mut cfg = engine.config();
            cfg.trace = trace.is_some();
            let res = if *direct_sum {
                check_psim_direct_sum(&da.matrix, &db.matrix, &cfg)?
            } else {
                check_psim(&da.matrix, &db.matrix, &cfg)?
            };
            if let Some(path) = trace {
                write_trace(path, &res.trace)?;
            }
            Ok(Outcome::ok(json!({
                "command": "check",
                "config": { "bpsay": cfg, "direct_sum": direct_sum },
                "inputs": inputs(&[&da, &db]),
                "psim": res.psim,
                "iterations": res.iterations,
                "divergence_iter": res.divergence_iter,
                "stabilized_at": res.psim.then(|| res.stabilized_at()),
                "pcm_dim": res.pcm_dim,
                "initial_symbols": [res.initial_symbols.0, res.initial_symbols.1],
            })))
        }
        Command::FindPerm { a, b, engine } => {
            let (da, db) = (load(a, format)?, load(b, format)?);
            let cfg = FindPermConfig { bpsay: engine.config(), ..FindPermConfig::default() };
            let res = find_permutation(&da.matrix, &db.matrix, &cfg)?;
            let p: Vec<usize> = res.p.iter().map(|x| x + 1).collect();
            Ok(Outcome::ok(json!({
                "command": "find-perm",
                "config": cfg,
                "inputs": inputs(&[&da, &db]),
                "psim": res.psim,
                "p": res.psim.then_some(p),
                "verified": res.verified,
                "bpsay_calls": res.bpsay_calls,
            })))
        }
        Command::Orbits { m, pcm } => {
            let d = load(m, format)?;
            let autos = automorphisms(&d.matrix).map_err(Failure::from)?;
            let mut body = json!({
                "command": "orbits",
                "config": { "pcm": pcm },
                "inputs": inputs(&[&d]),
                "automorphisms": autos.len(),
                "orbits": pattern_json(&orbits(&d.matrix)?),
            });
            let mut code = 0;
            if *pcm {
                let lifted = symmetric_pcm_orbits(&d.matrix)?;
                let cfg = BpsayConfig::default();
                let stable = refine_to_stable(&pcm_of(&d.matrix, cfg.edge_weights)?, &cfg)?;
                let stable_pattern = pattern_of(&stable.matrix);
                let matches = stable_pattern == lifted;
                if !matches {
                    code = EXIT_INVARIANT;
                }
                body["pcm"] = json!({
                    "dim": lifted.dim(),
                    "orbit_cells": lifted.num_cells(),
                    "stable_cells": stable_pattern.num_cells(),
                    "stabilized_at": stable.stabilized_at,
                    "matches_stable_pattern": matches,
                });
            }
            Ok(Outcome { body, code })
        }
        Command::Espp { m } => {
            let d = load(m, format)?;
            let p = espp_pattern(&substitute(&d.matrix)?)?;
            Ok(Outcome::ok(json!({
                "command": "espp",
                "config": {},
                "inputs": inputs(&[&d]),
                "pattern": pattern_json(&p),
            })))
        }
        Command::WspmVerify { m } => {
            let d = load(m, format)?;
            let limits = WspmLimits::default();
            let report = verify_theorems(&substitute(&d.matrix)?, limits)?;
            let code = if report.all_hold() { 0 } else { EXIT_INVARIANT };
            Ok(Outcome {
                body: json!({
                    "command": "wspm-verify",
                    "config": limits,
                    "inputs": inputs(&[&d]),
                    "all_hold": report.all_hold(),
                    "report": report,
                }),
                code,
            })
        }
        Command::Validate { cap, seed, trials, random_dim, out, bliss_dir, engine } => {
            let cfg = CampaignConfig {
                seed: *seed,
                cap: *cap,
                trials: *trials,
                random_dim: *random_dim,
                out_dir: out.clone(),
                bliss_dir: bliss_dir.clone(),
                bpsay: engine.config(),
            };
            let report = validate_corpus(&cfg)?;
            let code = if report.ok { 0 } else { EXIT_INVARIANT };
            let mut body = to_value(&report);
            body["command"] = json!("validate");
            Ok(Outcome { body, code })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = if cli.compact {
                serde_json::to_string(&out.body)
            } else {
                serde_json::to_string_pretty(&out.body)
            };
            println!("{}", text.expect("serializable"));
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("psim: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
