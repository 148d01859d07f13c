//! External SMT solver integration.
//!
//! One process per query: the query is written to the solver's stdin as
//! SMT-LIB2, the verdict (and model, when sat) is read back from stdout.
//! Every model is re-verified against the formula with the exact evaluator;
//! a failing re-verification is a hard error, so printer or solver dialect
//! drift cannot silently corrupt results.

use std::collections::BTreeMap;
use std::io::Read;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::ast::{Assignment, Formula, Rational, SortedVar, Term, VarGen};
use crate::error::{Error, Result, SolverError};
use crate::parse::{read_sexps, Sexp};
use crate::print;
use crate::qe;
use crate::script::{infer_logic, Script};

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "RAMSEY_SOLVER";
/// Environment variable with extra arguments, whitespace-separated.
pub const SOLVER_ARGS_ENV: &str = "RAMSEY_SOLVER_ARGS";

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
    /// Overrides the inferred `(set-logic …)` line.
    pub logic: Option<String>,
}

impl SolverConfig {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        let program = program.into();
        let args = default_args(&program);
        SolverConfig {
            program,
            args,
            timeout: Duration::from_millis(120_000),
            logic: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        assert!(!timeout.is_zero(), "timeout must be positive");
        self.timeout = timeout;
        self
    }

    /// Resolves a solver: `RAMSEY_SOLVER`, then `z3` on PATH, then the
    /// bundled WASM shim under `tools/z3-wasm/`.
    pub fn detect() -> Result<Self, SolverError> {
        if let Ok(p) = std::env::var(SOLVER_ENV) {
            let mut cfg = SolverConfig::new(p);
            if let Ok(args) = std::env::var(SOLVER_ARGS_ENV) {
                cfg.args = args.split_whitespace().map(String::from).collect();
            }
            return Ok(cfg);
        }
        if let Some(p) = find_in_path("z3") {
            return Ok(SolverConfig::new(p));
        }
        for root in candidate_roots() {
            let shim = root.join("tools/z3-wasm/z3");
            if shim.is_file() {
                return Ok(SolverConfig::new(shim));
            }
        }
        Err(SolverError::NotFound)
    }
}

fn default_args(program: &Path) -> Vec<String> {
    let name = program
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    if name.contains("z3") {
        vec!["-in".to_string()]
    } else {
        Vec::new()
    }
}

fn find_in_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join(name))
        .find(|p| p.is_file())
}

fn candidate_roots() -> Vec<PathBuf> {
    let mut roots = Vec::new();
    if let Ok(cwd) = std::env::current_dir() {
        let mut d = Some(cwd);
        while let Some(p) = d {
            roots.push(p.clone());
            d = p.parent().map(Path::to_path_buf);
        }
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    roots.push(manifest.clone());
    if let Some(ws) = manifest.parent().and_then(Path::parent) {
        roots.push(ws.to_path_buf());
    }
    roots
}

/// Solver verdicts. A sat model, when present, has been re-verified.
#[derive(Debug, Clone)]
pub enum Verdict {
    Sat(Option<Assignment>),
    Unsat,
    Unknown(String),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

/// Checks satisfiability of a Ramsey-free existential formula. Existential
/// binders are expanded into free declarations before printing.
pub fn check_sat(f: &Formula, cfg: &SolverConfig) -> Result<Verdict> {
    if f.contains_ramsey() {
        return Err(Error::ResidualRamsey);
    }
    let mut gen = VarGen::new();
    let nf = crate::normalize::nnf(f)?;
    let (qf, _skolems) = skolemize(&nf, &mut gen)?;
    let decls: Vec<SortedVar> = qf.free_vars().into_iter().collect();

    let mut script = Script::new("", decls.clone(), qf.clone());
    script.logic = cfg.logic.clone().or_else(|| Some(infer_logic(&qf)));
    let mut text = String::from("(set-option :produce-models true)\n");
    text.push_str(&print::print_script(&script)?);
    text.push_str("(get-model)\n");

    let output = run_solver(cfg, &text)?;
    let verdict = parse_verdict(&output, &decls)?;
    if let Verdict::Sat(Some(model)) = &verdict {
        let mut env: Assignment = model.clone();
        for v in &decls {
            env.entry(v.clone()).or_insert_with(Rational::zero);
        }
        match qf.evaluate(&env) {
            Ok(true) => {}
            Ok(false) => {
                return Err(SolverError::ModelCheck(format!(
                    "model does not satisfy the formula: {model:?}"
                ))
                .into())
            }
            Err(e) => {
                return Err(SolverError::ModelCheck(format!(
                    "model evaluation failed: {e}"
                ))
                .into())
            }
        }
        return Ok(Verdict::Sat(Some(env)));
    }
    Ok(verdict)
}

/// Strips existential prefixes anywhere in the (negation-normal) formula,
/// renaming each bound variable to a fresh skolem constant.
fn skolemize(f: &Formula, gen: &mut VarGen) -> Result<(Formula, Vec<SortedVar>)> {
    match f {
        Formula::Atom(_) | Formula::Cmp(..) | Formula::Not(_) => Ok((f.clone(), vec![])),
        Formula::And(fs) => {
            let mut all = Vec::new();
            let mut out = Vec::new();
            for g in fs {
                let (g2, sk) = skolemize(g, gen)?;
                out.push(g2);
                all.extend(sk);
            }
            Ok((Formula::and(out), all))
        }
        Formula::Or(fs) => {
            let mut all = Vec::new();
            let mut out = Vec::new();
            for g in fs {
                let (g2, sk) = skolemize(g, gen)?;
                out.push(g2);
                all.extend(sk);
            }
            Ok((Formula::or(out), all))
        }
        Formula::Exists(vs, g) => {
            let fresh: Vec<SortedVar> = vs.iter().map(|v| gen.fresh("sk", v.sort)).collect();
            let map: BTreeMap<SortedVar, Term> = vs
                .iter()
                .cloned()
                .zip(fresh.iter().cloned().map(Term::Var))
                .collect();
            let renamed = g.substitute(&map, gen)?;
            let (inner, mut sk) = skolemize(&renamed, gen)?;
            sk.extend(fresh);
            Ok((inner, sk))
        }
        Formula::ExistsRamsey(..) => Err(Error::ResidualRamsey),
    }
}

fn run_solver(cfg: &SolverConfig, input: &str) -> Result<String, SolverError> {
    let mut child = Command::new(&cfg.program)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::Launch {
            program: cfg.program.display().to_string(),
            source: e,
        })?;

    // start draining stdout/stderr before writing, so a chatty solver can
    // never fill its pipes and deadlock against our stdin write
    let stdout = child.stdout.take().expect("piped stdout");
    let stderr = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || read_to_string_lossy(stdout));
    let err_reader = std::thread::spawn(move || read_to_string_lossy(stderr));

    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        // a solver that exits early closes the pipe; the exit-status check
        // below reports that better than a write error would
        let _ = stdin.write_all(input.as_bytes());
    }

    let timed_out = !wait_with_deadline(&mut child, cfg.timeout)?;
    let stdout_text = out_reader.join().unwrap_or_default();
    let stderr_text = err_reader.join().unwrap_or_default();
    if timed_out {
        return Ok("timeout".to_string());
    }
    let status = child.wait()?;
    if !status.success() && !looks_like_verdict(&stdout_text) {
        return Err(SolverError::Exit {
            status: status.code().unwrap_or(-1),
            stderr: stderr_text.chars().take(2000).collect(),
        });
    }
    Ok(stdout_text)
}

fn read_to_string_lossy(mut r: impl Read) -> String {
    let mut buf = Vec::new();
    let _ = r.read_to_end(&mut buf);
    String::from_utf8_lossy(&buf).into_owned()
}

/// Returns false on timeout, after killing the child.
fn wait_with_deadline(child: &mut Child, timeout: Duration) -> Result<bool, SolverError> {
    let deadline = Instant::now() + timeout;
    loop {
        if child.try_wait()?.is_some() {
            return Ok(true);
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(false);
        }
        std::thread::sleep(Duration::from_millis(5));
    }
}

fn looks_like_verdict(out: &str) -> bool {
    out.lines()
        .any(|l| matches!(l.trim(), "sat" | "unsat" | "unknown"))
}

fn parse_verdict(output: &str, decls: &[SortedVar]) -> Result<Verdict> {
    if output == "timeout" {
        return Ok(Verdict::Unknown("timeout".into()));
    }
    let mut rest_offset = None;
    let mut verdict: Option<&str> = None;
    let mut consumed = 0usize;
    for line in output.split_inclusive('\n') {
        let word = line.trim();
        consumed += line.len();
        if matches!(word, "sat" | "unsat" | "unknown") {
            verdict = Some(word);
            rest_offset = Some(consumed);
            break;
        }
    }
    match verdict {
        None => Err(SolverError::Malformed(output.chars().take(2000).collect()).into()),
        Some("unsat") => Ok(Verdict::Unsat),
        Some("unknown") => Ok(Verdict::Unknown("solver reported unknown".into())),
        Some(_) => {
            let rest = &output[rest_offset.unwrap_or(output.len())..];
            Ok(Verdict::Sat(parse_model(rest, decls)))
        }
    }
}

/// Parses `(model (define-fun v () S val) …)` or the bare paren list newer
/// solvers print. Unparseable models degrade to `None` rather than failing;
/// absence of a model is not an error, a wrong model is.
fn parse_model(text: &str, decls: &[SortedVar]) -> Option<Assignment> {
    let sexps = read_sexps(text.as_bytes()).ok()?;
    let list = sexps.into_iter().find_map(|s| match s {
        Sexp::List(items, _) => Some(items),
        _ => None,
    })?;
    let entries = match list.first() {
        Some(Sexp::Sym(w, _)) if w == "model" => &list[1..],
        _ => &list[..],
    };
    let mut model = Assignment::new();
    for e in entries {
        let items = match e {
            Sexp::List(items, _) => items,
            _ => continue,
        };
        match items.as_slice() {
            [Sexp::Sym(df, _), Sexp::Sym(name, _), Sexp::List(args, _), _, value]
                if df == "define-fun" && args.is_empty() =>
            {
                if let Some(var) = decls.iter().find(|v| &*v.name == name) {
                    if let Some(val) = parse_value(value) {
                        model.insert(var.clone(), val);
                    }
                }
            }
            _ => continue,
        }
    }
    Some(model)
}

fn parse_value(s: &Sexp) -> Option<Rational> {
    match s {
        Sexp::Num(n, _) => Some(Rational::from_integer(n.clone())),
        Sexp::Dec(r, _) => Some(r.clone()),
        Sexp::List(items, _) => match items.as_slice() {
            [Sexp::Sym(op, _), a] if op == "-" => Some(-parse_value(a)?),
            [Sexp::Sym(op, _), a] if op == "to_real" || op == "to_int" => parse_value(a),
            [Sexp::Sym(op, _), a, b] if op == "/" => {
                let num = parse_value(a)?;
                let den = parse_value(b)?;
                if den.is_zero() {
                    None
                } else {
                    Some(num / den)
                }
            }
            _ => None,
        },
        Sexp::Sym(..) => None,
    }
}

/// Searches for `k` pairwise-distinct tuples forming a clique of `body`
/// under the given parameter values: `⋀_{i<j} body(t_i, t_j) ∧ t_i ≠ t_j`.
pub fn find_k_clique(
    body: &Formula,
    xs: &[SortedVar],
    ys: &[SortedVar],
    params: &Assignment,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Verdict> {
    if !(2..=8).contains(&k) {
        return Err(Error::Unsupported(format!("k-clique size {k} out of range 2..=8")));
    }
    let mut gen = VarGen::new();
    let copies: Vec<Vec<SortedVar>> = (0..k)
        .map(|i| gen.fresh_tuple(&format!("t{i}_"), xs))
        .collect();
    let consts: BTreeMap<SortedVar, Term> = params
        .iter()
        .map(|(v, r)| (v.clone(), Term::Const(r.clone())))
        .collect();
    let mut parts = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut map = consts.clone();
            for (v, t) in xs.iter().zip(&copies[i]) {
                map.insert(v.clone(), Term::Var(t.clone()));
            }
            for (v, t) in ys.iter().zip(&copies[j]) {
                map.insert(v.clone(), Term::Var(t.clone()));
            }
            parts.push(body.substitute(&map, &mut gen)?);
            parts.push(qe::tuples_distinct(&copies[i], &copies[j]));
        }
    }
    check_sat(&Formula::and(parts), cfg)
}
