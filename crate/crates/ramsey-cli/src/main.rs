//! `ramsey` — eliminate Ramsey quantifiers, check satisfiability, decide
//! monadic decomposability and WQO-ness, and run the benchmark suite.
//!
//! Exit codes: 0 = sat / decomposable / wqo (positive answer),
//! 1 = unsat / negative answer, 2 = unknown, 3 = usage or internal error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use ramsey_core::apps::{self, MondecMode, MondecOutcome, WqoOutcome, WqoViolation};
use ramsey_core::bench::{self, BenchSpec, Family};
use ramsey_core::{
    check_sat, eliminate_script, parse, print, Domain, Script, Sort, SolverConfig, Verdict,
};

#[derive(Parser)]
#[command(name = "ramsey", version, about = "Ramsey quantifier elimination for LIA/LRA/LIRA")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eliminate the Ramsey binder and print standard SMT-LIB2.
    Eliminate {
        /// Input file (.rsmt2 dialect).
        input: PathBuf,
        /// Output file; stdout if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Force the eliminator domain.
        #[arg(long)]
        domain: Option<Domain>,
        /// Print size statistics to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Eliminate (if needed) and decide satisfiability with the solver.
    Check {
        input: PathBuf,
        #[arg(long)]
        solver: Option<PathBuf>,
        /// Solver timeout in milliseconds.
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long)]
        domain: Option<Domain>,
    },
    /// Decide monadic decomposability of a quantifier-free formula.
    Mondec {
        input: PathBuf,
        #[arg(long, default_value = "per-var")]
        mode: MondecMode,
        #[arg(long)]
        solver: Option<PathBuf>,
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Decide whether a formula over (x…, y…) defines a well-quasi-ordering.
    Wqo {
        input: PathBuf,
        #[arg(long)]
        solver: Option<PathBuf>,
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Generate and run a benchmark instance.
    Bench {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        dim: usize,
        /// Family parameter (t for half, k for the mondec families).
        #[arg(long)]
        param: Option<i64>,
        #[arg(long)]
        domain: Domain,
        /// Write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        solver: Option<PathBuf>,
        #[arg(long)]
        timeout: Option<u64>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run() -> anyhow::Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Eliminate { input, out, domain, stats } => {
            let script = load(&input)?;
            let result = eliminate_script(&script, domain)?;
            let text = print::print_script(&result.script)?;
            if stats {
                eprintln!(
                    "domain={} in_vars={} in_atoms={} out_vars={} out_atoms={}",
                    result.stats.domain,
                    result.stats.input_vars,
                    result.stats.input_atoms,
                    result.stats.output_vars,
                    result.stats.output_atoms
                );
            }
            match out {
                Some(p) => std::fs::write(&p, text)
                    .with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { input, solver, timeout, domain } => {
            let script = load(&input)?;
            let cfg = solver_config(solver, timeout)?;
            let result = eliminate_script(&script, domain)?;
            let verdict = check_sat(&result.script.goal, &cfg)?;
            println!("{}", verdict.word());
            Ok(verdict_code(&verdict))
        }
        Cmd::Mondec { input, mode, solver, timeout } => {
            let script = load(&input)?;
            if script.goal.contains_ramsey() {
                bail!("mondec expects a plain quantifier-free formula");
            }
            let cfg = solver_config(solver, timeout)?;
            match apps::mondec_check(&script.goal, mode, &cfg)? {
                MondecOutcome::Decomposable => {
                    println!("decomposable");
                    Ok(ExitCode::SUCCESS)
                }
                MondecOutcome::NotDecomposable { variable } => {
                    println!("not-decomposable {variable}");
                    Ok(ExitCode::from(1))
                }
                MondecOutcome::Inconclusive { variable, reason } => {
                    println!("unknown {variable}: {reason}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Cmd::Wqo { input, solver, timeout } => {
            let script = load(&input)?;
            let cfg = solver_config(solver, timeout)?;
            let (xs, ys) = wqo_tuples(&script)?;
            match apps::wqo_check(&script.goal, &xs, &ys, &cfg)? {
                WqoOutcome::Wqo => {
                    println!("wqo");
                    Ok(ExitCode::SUCCESS)
                }
                WqoOutcome::NotWqo(v) => {
                    let why = match v {
                        WqoViolation::Reflexivity => "reflexivity",
                        WqoViolation::Transitivity => "transitivity",
                        WqoViolation::BadSequence => "bad-sequence",
                    };
                    println!("not-wqo {why}");
                    Ok(ExitCode::from(1))
                }
                WqoOutcome::Inconclusive(r) => {
                    println!("unknown: {r}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Cmd::Bench { family, dim, param, domain, json, solver, timeout } => {
            let spec = BenchSpec::new(family, dim, param, domain)?;
            let cfg = solver_config(solver, timeout)?;
            let reports = bench::run_suite(&[spec], &cfg);
            print!("{}", bench::render_table(&reports));
            if let Some(p) = json {
                std::fs::write(&p, serde_json::to_string_pretty(&reports)?)
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            let code = match reports[0].verdict.as_str() {
                "sat" | "yes" => ExitCode::SUCCESS,
                "unsat" | "no" => ExitCode::from(1),
                "unknown" => ExitCode::from(2),
                _ => ExitCode::from(3),
            };
            Ok(code)
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<Script> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(parse::parse(&bytes, &name)?)
}

fn solver_config(path: Option<PathBuf>, timeout_ms: Option<u64>) -> anyhow::Result<SolverConfig> {
    let mut cfg = match path {
        Some(p) => SolverConfig::new(p),
        None => SolverConfig::detect()?,
    };
    if let Some(ms) = timeout_ms {
        if ms == 0 {
            bail!("timeout must be positive");
        }
        cfg = cfg.with_timeout(Duration::from_millis(ms));
    }
    Ok(cfg)
}

fn verdict_code(v: &Verdict) -> ExitCode {
    match v {
        Verdict::Sat(_) => ExitCode::SUCCESS,
        Verdict::Unsat => ExitCode::from(1),
        Verdict::Unknown(_) => ExitCode::from(2),
    }
}

/// The wqo relation reads its tuples from the declaration order: the first
/// half is x, the second half is y.
fn wqo_tuples(script: &Script) -> anyhow::Result<(Vec<ramsey_core::SortedVar>, Vec<ramsey_core::SortedVar>)> {
    let decls = &script.decls;
    if decls.is_empty() || decls.len() % 2 != 0 {
        bail!("wqo needs an even number of declared variables (x-tuple then y-tuple)");
    }
    if decls.iter().any(|v| v.sort != Sort::Int) {
        bail!("wqo is defined over integer variables");
    }
    let half = decls.len() / 2;
    Ok((decls[..half].to_vec(), decls[half..].to_vec()))
}
