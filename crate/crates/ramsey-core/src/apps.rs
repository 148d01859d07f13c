//! Decision procedures built on the eliminators: monadic decomposability,
//! well-quasi-ordering checks, and linear-liveness condition generation.

use std::collections::BTreeMap;

use crate::ast::{Formula, Sort, SortedVar, Term, VarGen};
use crate::error::{Error, Result};
use crate::ramsey::{self, Domain};
use crate::solver::{check_sat, SolverConfig, Verdict};

/// How the decomposability test quantifies: `PerVariable` checks one
/// variable against the rest (the default decision procedure); `Group`
/// checks the rest against one variable, which leaves only a single
/// existentially quantified variable to lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MondecMode {
    #[default]
    PerVariable,
    Group,
}

impl std::str::FromStr for MondecMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "per-var" | "per-variable" => Ok(MondecMode::PerVariable),
            "group" => Ok(MondecMode::Group),
            other => Err(format!("unknown mondec mode `{other}` (expected per-var|group)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MondecOutcome {
    Decomposable,
    NotDecomposable { variable: SortedVar },
    /// The solver answered `unknown` for this variable; never coerced.
    Inconclusive { variable: SortedVar, reason: String },
}

/// The Ramsey query for one variable of the decomposability check:
/// `∃ram (x,x'): ∃rest: ¬(φ(x,rest) ↔ φ(x',rest))`, with the roles of `x`
/// and `rest` swapped in group mode. Returns the checked variable and the
/// query before elimination.
pub fn mondec_query(
    f: &Formula,
    vars: &[SortedVar],
    index: usize,
    mode: MondecMode,
    gen: &mut VarGen,
) -> Result<(SortedVar, Formula)> {
    let target = vars[index].clone();
    let rest: Vec<SortedVar> = vars
        .iter()
        .filter(|v| **v != target)
        .cloned()
        .collect();
    let (tuple, inner): (Vec<SortedVar>, Vec<SortedVar>) = match mode {
        MondecMode::PerVariable => (vec![target.clone()], rest.clone()),
        MondecMode::Group => (rest.clone(), vec![target.clone()]),
    };
    let primed: Vec<SortedVar> = tuple.iter().map(|v| gen.fresh("m", v.sort)).collect();
    let map: BTreeMap<SortedVar, Term> = tuple
        .iter()
        .cloned()
        .zip(primed.iter().cloned().map(Term::Var))
        .collect();
    let other = f.substitute(&map, gen)?;
    // ¬(φ ↔ φ'), with the biconditional expanded before NNF
    let iff = Formula::and([
        Formula::or([Formula::not(f.clone()), other.clone()]),
        Formula::or([Formula::not(other), f.clone()]),
    ]);
    let body = Formula::exists(inner, Formula::not(iff));
    Ok((target, Formula::ExistsRamsey(tuple, primed, Box::new(body))))
}

/// Decides monadic decomposability of a quantifier-free formula by checking,
/// for every free variable, whether the distinguishability relation has an
/// infinite clique. Variables are processed in name order; the first
/// satisfiable query wins.
pub fn mondec_check(
    f: &Formula,
    mode: MondecMode,
    cfg: &SolverConfig,
) -> Result<MondecOutcome> {
    if !f.is_quantifier_free() {
        return Err(Error::Unsupported(
            "mondec expects a quantifier-free formula".into(),
        ));
    }
    let vars: Vec<SortedVar> = f.free_vars().into_iter().collect();
    if vars.len() <= 1 {
        return Ok(MondecOutcome::Decomposable);
    }
    let mut inconclusive: Option<(SortedVar, String)> = None;
    for i in 0..vars.len() {
        let mut gen = VarGen::new();
        let (variable, query) = mondec_query(f, &vars, i, mode, &mut gen)?;
        let (eliminated, _) = ramsey::eliminate_in_formula(&query, None, &mut gen)?;
        match check_sat(&eliminated, cfg)? {
            Verdict::Sat(_) => return Ok(MondecOutcome::NotDecomposable { variable }),
            Verdict::Unsat => {}
            Verdict::Unknown(reason) => {
                inconclusive.get_or_insert((variable, reason));
            }
        }
    }
    Ok(match inconclusive {
        Some((variable, reason)) => MondecOutcome::Inconclusive { variable, reason },
        None => MondecOutcome::Decomposable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WqoViolation {
    Reflexivity,
    Transitivity,
    BadSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WqoOutcome {
    Wqo,
    NotWqo(WqoViolation),
    Inconclusive(String),
}

/// Checks whether `φ(xs, ys)` defines a well-quasi-ordering on `Z^k`:
/// reflexivity, transitivity, and absence of an infinite bad sequence, in
/// that order. The first violated condition is reported.
pub fn wqo_check(
    f: &Formula,
    xs: &[SortedVar],
    ys: &[SortedVar],
    cfg: &SolverConfig,
) -> Result<WqoOutcome> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Sort("wqo relation needs matching tuples".into()));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| v.sort != Sort::Int) {
        return Err(Error::Sort(format!(
            "wqo check is defined over integers; `{}` is real",
            v.name
        )));
    }
    let mut gen = VarGen::new();

    // (1) ∃x: ¬φ(x, x)
    let diag = rename(f, ys, xs, &mut gen)?;
    match check_sat(&Formula::not(diag), cfg)? {
        Verdict::Sat(_) => return Ok(WqoOutcome::NotWqo(WqoViolation::Reflexivity)),
        Verdict::Unknown(r) => return Ok(WqoOutcome::Inconclusive(r)),
        Verdict::Unsat => {}
    }

    // (2) ∃x,y,z: φ(x,y) ∧ φ(y,z) ∧ ¬φ(x,z)
    let zs = gen.fresh_tuple("z", xs);
    let second = rename2(f, (xs, ys), (ys, &zs), &mut gen)?;
    let third = rename(f, ys, &zs, &mut gen)?;
    let trans = Formula::and([f.clone(), second, Formula::not(third)]);
    match check_sat(&trans, cfg)? {
        Verdict::Sat(_) => return Ok(WqoOutcome::NotWqo(WqoViolation::Transitivity)),
        Verdict::Unknown(r) => return Ok(WqoOutcome::Inconclusive(r)),
        Verdict::Unsat => {}
    }

    // (3) ∃ram x,y: ¬φ(x,y)
    let bad = ramsey::eliminate_node(
        xs,
        ys,
        &Formula::not(f.clone()),
        Domain::Int,
        &mut gen,
    )?;
    match check_sat(&bad, cfg)? {
        Verdict::Sat(_) => Ok(WqoOutcome::NotWqo(WqoViolation::BadSequence)),
        Verdict::Unknown(r) => Ok(WqoOutcome::Inconclusive(r)),
        Verdict::Unsat => Ok(WqoOutcome::Wqo),
    }
}

fn rename(
    f: &Formula,
    from: &[SortedVar],
    to: &[SortedVar],
    gen: &mut VarGen,
) -> Result<Formula> {
    let map: BTreeMap<SortedVar, Term> = from
        .iter()
        .cloned()
        .zip(to.iter().cloned().map(Term::Var))
        .collect();
    f.substitute(&map, gen)
}

/// Simultaneous renaming along two tuple pairs, e.g. `(x,y) ↦ (y,z)`.
fn rename2(
    f: &Formula,
    a: (&[SortedVar], &[SortedVar]),
    b: (&[SortedVar], &[SortedVar]),
    gen: &mut VarGen,
) -> Result<Formula> {
    let mut map: BTreeMap<SortedVar, Term> = BTreeMap::new();
    for (from, to) in a.0.iter().zip(a.1).chain(b.0.iter().zip(b.1)) {
        map.insert(from.clone(), Term::Var(to.clone()));
    }
    f.substitute(&map, gen)
}

/// `∃z: ∃ram (x,y): reach(x,y) ∧ constraint(x,y,z)`, with the Ramsey binder
/// eliminated: satisfiability of the result is the linear liveness property.
pub fn liveness_condition(
    reach: &Formula,
    constraint: &Formula,
    xs: &[SortedVar],
    ys: &[SortedVar],
) -> Result<Formula> {
    for (x, y) in xs.iter().zip(ys) {
        if x.sort != y.sort {
            return Err(Error::Sort(format!(
                "liveness tuples disagree on sorts: `{}` vs `{}`",
                x.name, y.name
            )));
        }
    }
    let mut gen = VarGen::new();
    let body = Formula::and([reach.clone(), constraint.clone()]);
    let bound: std::collections::BTreeSet<SortedVar> =
        xs.iter().chain(ys).cloned().collect();
    let zs: Vec<SortedVar> = body
        .free_vars()
        .into_iter()
        .filter(|v| !bound.contains(v))
        .collect();
    let query = Formula::exists(
        zs,
        Formula::ExistsRamsey(xs.to_vec(), ys.to_vec(), Box::new(body)),
    );
    let (eliminated, _) = ramsey::eliminate_in_formula(&query, None, &mut gen)?;
    Ok(eliminated)
}

/// The three verification conditions of the inductive-relation termination
/// rule. Joint unsatisfiability certifies termination of `R`.
#[derive(Debug, Clone)]
pub struct TerminationConditions {
    /// `[R ∧ ¬T] ∨ [T(x,x') ∧ R(x',x'') ∧ ¬T(x,x'')]`
    pub inductivity: Formula,
    /// `T(x,x') ∧ T(x',x')`
    pub loop_free: Formula,
    /// `∃ram (x,x'): T`, eliminated
    pub clique: Formula,
}

pub fn termination_conditions(
    r: &Formula,
    t: &Formula,
    xs: &[SortedVar],
    xs2: &[SortedVar],
) -> Result<TerminationConditions> {
    if xs.len() != xs2.len() || xs.is_empty() {
        return Err(Error::Sort("termination tuples must match".into()));
    }
    let mut gen = VarGen::new();
    let xs3 = gen.fresh_tuple("n", xs);

    let r_shift = rename2(r, (xs, xs2), (xs2, &xs3), &mut gen)?;
    let t_skip = rename(t, xs2, &xs3, &mut gen)?;
    let inductivity = Formula::or([
        Formula::and([r.clone(), Formula::not(t.clone())]),
        Formula::and([t.clone(), r_shift, Formula::not(t_skip)]),
    ]);

    let loop_free = Formula::and([t.clone(), rename(t, xs, xs2, &mut gen)?]);

    let clique = ramsey::eliminate_node(
        xs,
        xs2,
        t,
        resolve_termination_domain(t, xs, xs2),
        &mut gen,
    )?;
    Ok(TerminationConditions { inductivity, loop_free, clique })
}

fn resolve_termination_domain(t: &Formula, xs: &[SortedVar], xs2: &[SortedVar]) -> Domain {
    let mut has_int = false;
    let mut has_real = false;
    for v in t
        .all_vars()
        .into_iter()
        .chain(xs.iter().cloned())
        .chain(xs2.iter().cloned())
    {
        match v.sort {
            Sort::Int => has_int = true,
            Sort::Real => has_real = true,
        }
    }
    if t.contains_floor() || (has_int && has_real) {
        Domain::Mixed
    } else if has_real {
        Domain::Real
    } else {
        Domain::Int
    }
}
