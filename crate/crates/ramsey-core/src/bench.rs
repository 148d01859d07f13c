//! Benchmark families and the harness that reproduces the micro-benchmark
//! tables: per-instance variable/atom counts before and after elimination,
//! stage timings, and the solver verdict.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::apps::{mondec_query, MondecMode};
use crate::ast::{rat, Formula, Rel, Sort, SortedVar, Term, VarGen};
use crate::error::{Error, Result};
use crate::ramsey::{self, Domain};
use crate::script::{Script, ScriptKind};
use crate::solver::{check_sat, SolverConfig, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Half,
    EqEx,
    EqFree,
    Dickson,
    Program,
    Imp,
    Diagonal,
    Cubes2d,
    Cubes10,
    Mixed,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Half,
        Family::EqEx,
        Family::EqFree,
        Family::Dickson,
        Family::Program,
        Family::Imp,
        Family::Diagonal,
        Family::Cubes2d,
        Family::Cubes10,
        Family::Mixed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Half => "half",
            Family::EqEx => "eq_ex",
            Family::EqFree => "eq_free",
            Family::Dickson => "dickson",
            Family::Program => "program",
            Family::Imp => "imp",
            Family::Diagonal => "diagonal",
            Family::Cubes2d => "cubes2d",
            Family::Cubes10 => "cubes10",
            Family::Mixed => "mixed",
        }
    }

    /// Families whose benchmark is a monadic-decomposability check.
    pub fn is_mondec(&self) -> bool {
        matches!(
            self,
            Family::Imp | Family::Diagonal | Family::Cubes2d | Family::Cubes10 | Family::Mixed
        )
    }

    pub fn needs_param(&self) -> bool {
        matches!(
            self,
            Family::Half | Family::Imp | Family::Diagonal | Family::Cubes2d | Family::Mixed
        )
    }

    /// Valid domains per the benchmark tables.
    pub fn domains(&self) -> &'static [Domain] {
        match self {
            Family::Program | Family::Mixed => &[Domain::Mixed],
            _ => &[Domain::Int, Domain::Real],
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BenchSpec {
    pub family: Family,
    pub dim: usize,
    pub param: Option<i64>,
    pub domain: Domain,
}

impl BenchSpec {
    pub fn new(family: Family, dim: usize, param: Option<i64>, domain: Domain) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Unsupported("dimension must be positive".into()));
        }
        if !family.domains().contains(&domain) {
            return Err(Error::Unsupported(format!(
                "family {} is not defined over domain {domain}",
                family.name()
            )));
        }
        if family.needs_param() && param.is_none() {
            return Err(Error::Unsupported(format!(
                "family {} needs a parameter",
                family.name()
            )));
        }
        if family == Family::Cubes2d && dim != 2 {
            return Err(Error::Unsupported("cubes2d is two-dimensional".into()));
        }
        Ok(BenchSpec { family, dim, param, domain })
    }

    fn sort(&self) -> Sort {
        match self.domain {
            Domain::Int => Sort::Int,
            Domain::Real => Sort::Real,
            Domain::Mixed => Sort::Real,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub family: &'static str,
    pub domain: Domain,
    pub dim: usize,
    pub param: Option<i64>,
    pub input_vars: usize,
    pub input_atoms: usize,
    pub output_vars: usize,
    pub output_atoms: usize,
    pub eliminate_ms: u128,
    pub solve_ms: u128,
    pub verdict: String,
}

/// Instantiates one benchmark family at the given size.
pub fn generate_benchmark(spec: &BenchSpec) -> Result<Script> {
    let d = spec.dim;
    let sort = spec.sort();
    let vars = |stem: &str, sort: Sort| -> Vec<SortedVar> {
        (1..=d).map(|i| SortedVar::new(format!("{stem}{i}"), sort)).collect()
    };
    let v = |x: &SortedVar| Term::var(x.clone());
    let k = |n: i64| Term::Const(rat(n));
    let name = format!(
        "{}_{}_d{}{}",
        spec.family.name(),
        spec.domain,
        d,
        spec.param.map(|p| format!("_p{p}")).unwrap_or_default()
    );

    let script = match spec.family {
        Family::Half => {
            let xs = vars("x", sort);
            let ys = vars("y", sort);
            let t = spec.param.unwrap();
            let body = Formula::and(xs.iter().zip(&ys).flat_map(|(x, y)| {
                [
                    Formula::Cmp(Rel::Le, Term::Mul(rat(2), Box::new(v(y))), v(x)),
                    Formula::Cmp(Rel::Ge, v(x), k(t)),
                ]
            }));
            Script::new(name, vec![], Formula::ExistsRamsey(xs, ys, Box::new(body)))
        }
        Family::EqEx | Family::EqFree => {
            let xs = vars("x", sort);
            let ys = vars("y", sort);
            let zs = vars("z", sort);
            let body = Formula::and(
                xs.iter()
                    .zip(&ys)
                    .map(|(x, y)| Formula::Cmp(Rel::Lt, v(x), v(y)))
                    .chain(
                        xs.iter()
                            .zip(&zs)
                            .map(|(x, z)| Formula::Cmp(Rel::Eq, v(x), v(z))),
                    )
                    .collect::<Vec<_>>(),
            );
            if spec.family == Family::EqEx {
                let body = Formula::exists(zs, body);
                Script::new(name, vec![], Formula::ExistsRamsey(xs, ys, Box::new(body)))
            } else {
                Script::new(name, zs, Formula::ExistsRamsey(xs, ys, Box::new(body)))
            }
        }
        Family::Dickson => {
            let xs = vars("x", sort);
            let ys = vars("y", sort);
            let nonneg = xs.iter().map(|x| Formula::Cmp(Rel::Ge, v(x), k(0)));
            let ge = Formula::and(
                xs.iter()
                    .zip(&ys)
                    .map(|(x, y)| Formula::Cmp(Rel::Ge, v(x), v(y)))
                    .collect::<Vec<_>>(),
            );
            let neq = Formula::or(
                xs.iter()
                    .zip(&ys)
                    .map(|(x, y)| Formula::Cmp(Rel::Neq, v(x), v(y)))
                    .collect::<Vec<_>>(),
            );
            let x_not_le = Formula::or(
                xs.iter()
                    .zip(&ys)
                    .map(|(x, y)| Formula::Cmp(Rel::Gt, v(x), v(y)))
                    .collect::<Vec<_>>(),
            );
            let y_not_le = Formula::or(
                xs.iter()
                    .zip(&ys)
                    .map(|(x, y)| Formula::Cmp(Rel::Gt, v(y), v(x)))
                    .collect::<Vec<_>>(),
            );
            let body = Formula::and(nonneg.chain([Formula::or([
                Formula::and([ge, neq]),
                Formula::and([x_not_le, y_not_le]),
            ])]));
            Script::new(name, vec![], Formula::ExistsRamsey(xs, ys, Box::new(body)))
        }
        Family::Program => {
            // pre-decomposed reachability relation of the non-terminating
            // loop: real x1 with integer/fractional parts (xi, xf),
            // integer x2 (xc); same on the y side
            let xi = vars("xi", Sort::Int);
            let xf = vars("xf", Sort::Real);
            let xc = vars("xc", Sort::Int);
            let yi = vars("yi", Sort::Int);
            let yf = vars("yf", Sort::Real);
            let yc = vars("yc", Sort::Int);
            let mut parts = Vec::new();
            for i in 0..d {
                // x1 > 0
                parts.push(Formula::or([
                    Formula::Cmp(Rel::Ge, v(&xi[i]), k(1)),
                    Formula::and([
                        Formula::Cmp(Rel::Eq, v(&xi[i]), k(0)),
                        Formula::Cmp(Rel::Gt, v(&xf[i]), k(0)),
                    ]),
                ]));
                // x2 > 0
                parts.push(Formula::Cmp(Rel::Ge, v(&xc[i]), k(1)));
                // y1 >= 0.5 x1 + 0.5, split into integer part I = 2 yi − xi
                // and fractional part R = 2 yf − xf with R in (−1, 2)
                let int_gap = |c: i64| {
                    Formula::Cmp(
                        Rel::Eq,
                        Term::Add(vec![
                            Term::Mul(rat(2), Box::new(v(&yi[i]))),
                            Term::neg(v(&xi[i])),
                        ]),
                        k(c),
                    )
                };
                let frac_gap = Term::Add(vec![
                    Term::Mul(rat(2), Box::new(v(&yf[i]))),
                    Term::neg(v(&xf[i])),
                ]);
                parts.push(Formula::or([
                    Formula::Cmp(
                        Rel::Ge,
                        Term::Add(vec![
                            Term::Mul(rat(2), Box::new(v(&yi[i]))),
                            Term::neg(v(&xi[i])),
                        ]),
                        k(2),
                    ),
                    Formula::and([int_gap(1), Formula::Cmp(Rel::Ge, frac_gap.clone(), k(0))]),
                    Formula::and([int_gap(0), Formula::Cmp(Rel::Ge, frac_gap.clone(), k(1))]),
                ]));
                // y2 <= x2 − floor(x1)
                parts.push(Formula::Cmp(
                    Rel::Le,
                    v(&yc[i]),
                    Term::Add(vec![v(&xc[i]), Term::neg(v(&xi[i]))]),
                ));
                // fractional ranges
                for f in [&xf[i], &yf[i]] {
                    parts.push(Formula::Cmp(Rel::Ge, v(f), k(0)));
                    parts.push(Formula::Cmp(Rel::Lt, v(f), k(1)));
                }
            }
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for i in 0..d {
                xs.extend([xi[i].clone(), xf[i].clone(), xc[i].clone()]);
                ys.extend([yi[i].clone(), yf[i].clone(), yc[i].clone()]);
            }
            Script::new(
                name,
                vec![],
                Formula::ExistsRamsey(xs, ys, Box::new(Formula::and(parts))),
            )
        }
        Family::Imp => {
            let xs = vars("x", sort);
            let ys = vars("y", sort);
            let kk = spec.param.unwrap();
            let body = Formula::and(
                xs.iter()
                    .zip(&ys)
                    .map(|(x, y)| {
                        Formula::or([
                            Formula::Cmp(Rel::Lt, v(x), k(0)),
                            Formula::and([
                                Formula::Cmp(Rel::Ge, Term::Add(vec![v(x), v(y)]), k(kk)),
                                Formula::Cmp(Rel::Ge, v(y), k(0)),
                            ]),
                        ])
                    })
                    .collect::<Vec<_>>(),
            );
            let mut s = Script::new(name, xs.into_iter().chain(ys).collect(), body);
            s.kind = ScriptKind::Mondec;
            s
        }
        Family::Diagonal => {
            if d < 2 {
                return Err(Error::Unsupported("diagonal needs dimension >= 2".into()));
            }
            let xs = vars("x", sort);
            let kk = spec.param.unwrap();
            let body = Formula::and(
                [
                    Formula::Cmp(Rel::Le, k(0), v(&xs[0])),
                    Formula::Cmp(Rel::Le, v(&xs[0]), k(kk)),
                ]
                .into_iter()
                .chain(
                    xs.windows(2)
                        .map(|w| Formula::Cmp(Rel::Eq, v(&w[0]), v(&w[1]))),
                ),
            );
            let mut s = Script::new(name, xs, body);
            s.kind = ScriptKind::Mondec;
            s
        }
        Family::Cubes2d => {
            // k unit-overlapping cubes along the diagonal, cut by the
            // half-plane x1 + x2 ≤ k
            let x1 = SortedVar::new("x1", sort);
            let x2 = SortedVar::new("x2", sort);
            let kk = spec.param.unwrap();
            let cubes = Formula::or((1..=kk).map(|i| {
                Formula::and([&x1, &x2].into_iter().flat_map(|x| {
                    [
                        Formula::Cmp(Rel::Le, k(i), v(x)),
                        Formula::Cmp(Rel::Le, v(x), k(i + 2)),
                    ]
                }))
            }));
            let body = Formula::and([
                Formula::Cmp(Rel::Le, Term::Add(vec![v(&x1), v(&x2)]), k(kk)),
                cubes,
            ]);
            let mut s = Script::new(name, vec![x1, x2], body);
            s.kind = ScriptKind::Mondec;
            s
        }
        Family::Cubes10 => {
            // the union of ten overlapping cubes [i, i+2]^d
            let xs = vars("x", sort);
            let body = Formula::or((1..=10).map(|i| {
                Formula::and(xs.iter().flat_map(|x| {
                    [
                        Formula::Cmp(Rel::Le, k(i), v(x)),
                        Formula::Cmp(Rel::Le, v(x), k(i + 2)),
                    ]
                }))
            }));
            let mut s = Script::new(name, xs, body);
            s.kind = ScriptKind::Mondec;
            s
        }
        Family::Mixed => {
            let xs = vars("x", Sort::Int);
            let ys = vars("y", Sort::Real);
            let kk = spec.param.unwrap();
            let body = Formula::and(xs.iter().zip(&ys).flat_map(|(x, y)| {
                [
                    Formula::Cmp(Rel::Eq, v(x), Term::floor(v(y))),
                    Formula::Cmp(Rel::Le, k(0), v(y)),
                    Formula::Cmp(Rel::Le, v(y), k(kk)),
                ]
            }));
            let mut s = Script::new(name, xs.into_iter().chain(ys).collect(), body);
            s.kind = ScriptKind::Mondec;
            s
        }
    };
    Ok(script)
}

/// Runs one spec through eliminate → solve and reports counts and timings.
pub fn run_spec(spec: &BenchSpec, cfg: &SolverConfig) -> Result<BenchReport> {
    let script = generate_benchmark(spec)?;
    if script.kind == ScriptKind::Mondec {
        run_mondec_spec(spec, &script, cfg)
    } else {
        run_sat_spec(spec, &script, cfg)
    }
}

fn report_base(spec: &BenchSpec) -> BenchReport {
    BenchReport {
        family: spec.family.name(),
        domain: spec.domain,
        dim: spec.dim,
        param: spec.param,
        input_vars: 0,
        input_atoms: 0,
        output_vars: 0,
        output_atoms: 0,
        eliminate_ms: 0,
        solve_ms: 0,
        verdict: String::new(),
    }
}

fn run_sat_spec(spec: &BenchSpec, script: &Script, cfg: &SolverConfig) -> Result<BenchReport> {
    let mut report = report_base(spec);
    let t0 = Instant::now();
    let eliminated = ramsey::eliminate_script(script, Some(spec.domain))?;
    report.eliminate_ms = t0.elapsed().as_millis();
    report.input_vars = eliminated.stats.input_vars;
    report.input_atoms = eliminated.stats.input_atoms;
    report.output_vars = eliminated.stats.output_vars;
    report.output_atoms = eliminated.stats.output_atoms;
    let t1 = Instant::now();
    let verdict = check_sat(&eliminated.script.goal, cfg)?;
    report.solve_ms = t1.elapsed().as_millis();
    report.verdict = verdict.word().to_string();
    Ok(report)
}

/// Mondec benchmarks use group mode, as the experiment tables do. The size
/// columns report the first variable's query before and after elimination.
fn run_mondec_spec(
    spec: &BenchSpec,
    script: &Script,
    cfg: &SolverConfig,
) -> Result<BenchReport> {
    let mut report = report_base(spec);
    let vars: Vec<SortedVar> = script.goal.free_vars().into_iter().collect();
    if vars.len() < 2 {
        // single-variable formulas are monadic by definition
        report.verdict = "yes".to_string();
        report.input_vars = script.goal.count_vars();
        report.input_atoms = script.goal.count_atoms();
        return Ok(report);
    }
    let mut verdict = "yes".to_string();
    for i in 0..vars.len() {
        let mut gen = VarGen::new();
        let (_, query) = mondec_query(&script.goal, &vars, i, MondecMode::Group, &mut gen)?;
        let t0 = Instant::now();
        let (eliminated, _) = ramsey::eliminate_in_formula(&query, None, &mut gen)?;
        report.eliminate_ms += t0.elapsed().as_millis();
        if i == 0 {
            report.input_vars = query.count_vars();
            report.input_atoms = query.count_atoms();
            report.output_vars = eliminated.count_vars();
            report.output_atoms = eliminated.count_atoms();
        }
        let t1 = Instant::now();
        let v = check_sat(&eliminated, cfg)?;
        report.solve_ms += t1.elapsed().as_millis();
        match v {
            Verdict::Sat(_) => {
                verdict = "no".to_string();
                break;
            }
            Verdict::Unsat => {}
            Verdict::Unknown(_) => {
                verdict = "unknown".to_string();
                break;
            }
        }
    }
    report.verdict = verdict;
    Ok(report)
}

/// Runs a suite on a bounded worker pool; reports keep the input order, and
/// per-spec failures are isolated into their report row.
pub fn run_suite(specs: &[BenchSpec], cfg: &SolverConfig) -> Vec<BenchReport> {
    specs
        .par_iter()
        .map(|spec| {
            run_spec(spec, cfg).unwrap_or_else(|e| {
                let mut r = report_base(spec);
                r.verdict = format!("error: {e}");
                r
            })
        })
        .collect()
}

/// Plain-text table in the layout of the benchmark reports.
pub fn render_table(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} {:<6} {:>4} {:>6} {:>8} {:>8} {:>9} {:>9} {:>8} {:>8}  {}\n",
        "family", "dom", "d", "param", "in_vars", "in_atoms", "out_vars", "out_atoms",
        "elim_ms", "solve_ms", "verdict"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<10} {:<6} {:>4} {:>6} {:>8} {:>8} {:>9} {:>9} {:>8} {:>8}  {}\n",
            r.family,
            r.domain.to_string(),
            r.dim,
            r.param.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
            r.input_vars,
            r.input_atoms,
            r.output_vars,
            r.output_atoms,
            r.eliminate_ms,
            r.solve_ms,
            r.verdict
        ));
    }
    out
}
