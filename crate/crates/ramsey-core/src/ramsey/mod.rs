//! The Ramsey quantifier elimination pipeline.
//!
//! The driver locates the (single) `exists-ramsey` binder, brings its body
//! into shape — negation normal form, decomposition for mixed input, inner
//! existentials lifted by the `v1 + w2` doubling — and hands the selector
//! skeleton to the eliminator of the matching domain. The output is an
//! equivalent existential formula of linear size, free of Ramsey binders.

pub mod int;
pub mod mixed;
pub mod real;

use std::collections::BTreeMap;

use crate::ast::{rat, Formula, Sort, SortedVar, Term, VarGen};
use crate::decompose;
use crate::error::{Error, Result};
use crate::normalize::{self, Partition};
use crate::qe;
use crate::script::Script;

/// Which eliminator a goal runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Int,
    Real,
    Mixed,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Int => write!(f, "int"),
            Domain::Real => write!(f, "real"),
            Domain::Mixed => write!(f, "mixed"),
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "int" => Ok(Domain::Int),
            "real" => Ok(Domain::Real),
            "mixed" => Ok(Domain::Mixed),
            other => Err(format!("unknown domain `{other}` (expected int|real|mixed)")),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ElimStats {
    pub domain: Domain,
    pub input_vars: usize,
    pub input_atoms: usize,
    pub output_vars: usize,
    pub output_atoms: usize,
}

pub struct Eliminated {
    pub script: Script,
    pub stats: ElimStats,
}

/// Eliminates the Ramsey binder from a script's goal. Ramsey-free goals pass
/// through unchanged.
pub fn eliminate_script(script: &Script, force: Option<Domain>) -> Result<Eliminated> {
    let mut gen = VarGen::new();
    let input_vars = script.goal.count_vars();
    let input_atoms = script.goal.count_atoms();
    let (goal, domain) = eliminate_in_formula(&script.goal, force, &mut gen)?;
    let goal = prune_unused_binders(&goal);
    debug_assert!(!goal.contains_ramsey());
    let mut out = script.clone();
    out.goal = goal;
    out.logic = None;
    Ok(Eliminated {
        stats: ElimStats {
            domain,
            input_vars,
            input_atoms,
            output_vars: out.goal.count_vars(),
            output_atoms: out.goal.count_atoms(),
        },
        script: out,
    })
}

/// Walks the goal, replacing the Ramsey node in place. Returns the domain
/// the eliminator ran in (the goal's overall domain when no binder exists).
pub fn eliminate_in_formula(
    f: &Formula,
    force: Option<Domain>,
    gen: &mut VarGen,
) -> Result<(Formula, Domain)> {
    match f {
        Formula::ExistsRamsey(xs, ys, body) => {
            let domain = resolve_domain(xs, body, force)?;
            Ok((eliminate_node(xs, ys, body, domain, gen)?, domain))
        }
        Formula::And(fs) | Formula::Or(fs) => {
            let mut domain = force.unwrap_or(Domain::Mixed);
            let mut out = Vec::with_capacity(fs.len());
            for g in fs {
                let (g2, d) = eliminate_in_formula(g, force, gen)?;
                if g.contains_ramsey() {
                    domain = d;
                }
                out.push(g2);
            }
            Ok((
                if matches!(f, Formula::And(_)) {
                    Formula::and(out)
                } else {
                    Formula::or(out)
                },
                domain,
            ))
        }
        Formula::Exists(vs, g) => {
            let (g2, d) = eliminate_in_formula(g, force, gen)?;
            Ok((Formula::exists(vs.clone(), g2), d))
        }
        Formula::Not(g) if !g.contains_ramsey() => Ok((f.clone(), force.unwrap_or(Domain::Mixed))),
        Formula::Not(_) => Err(Error::NotExistential),
        _ => Ok((f.clone(), force.unwrap_or(Domain::Mixed))),
    }
}

fn resolve_domain(xs: &[SortedVar], body: &Formula, force: Option<Domain>) -> Result<Domain> {
    let mut has_int = xs.iter().any(|v| v.sort == Sort::Int);
    let mut has_real = xs.iter().any(|v| v.sort == Sort::Real);
    for v in body.all_vars() {
        match v.sort {
            Sort::Int => has_int = true,
            Sort::Real => has_real = true,
        }
    }
    let natural = if body.contains_floor() || (has_int && has_real) {
        Domain::Mixed
    } else if has_real {
        Domain::Real
    } else {
        Domain::Int
    };
    match (force, natural) {
        (None, d) => Ok(d),
        (Some(Domain::Mixed), _) => Ok(Domain::Mixed),
        (Some(d), n) if d == n => Ok(d),
        (Some(d), n) => Err(Error::Sort(format!(
            "requested domain {d} but the formula needs {n}"
        ))),
    }
}

/// Eliminates one `∃ram xs,ys: body` node.
pub fn eliminate_node(
    xs: &[SortedVar],
    ys: &[SortedVar],
    body: &Formula,
    domain: Domain,
    gen: &mut VarGen,
) -> Result<Formula> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::Sort("ramsey tuples must be nonempty and equal-length".into()));
    }
    for (x, y) in xs.iter().zip(ys) {
        if x.sort != y.sort {
            return Err(Error::Sort(format!(
                "ramsey tuple sorts differ: `{}` vs `{}`",
                x.name, y.name
            )));
        }
    }
    // Alpha-rename the tuple variables so no user-chosen name can collide
    // with the fresh variables generated below.
    let xs2 = gen.fresh_tuple("rx_", xs);
    let ys2 = gen.fresh_tuple("ry_", ys);
    let map: BTreeMap<SortedVar, Term> = xs
        .iter()
        .chain(ys)
        .cloned()
        .zip(xs2.iter().chain(&ys2).cloned().map(Term::Var))
        .collect();
    let body = body.substitute(&map, gen)?;
    match domain {
        Domain::Int => eliminate_pure(&xs2, &ys2, &body, Sort::Int, gen),
        Domain::Real => eliminate_pure(&xs2, &ys2, &body, Sort::Real, gen),
        Domain::Mixed => eliminate_mixed(&xs2, &ys2, &body, gen),
    }
}

fn eliminate_pure(
    xs: &[SortedVar],
    ys: &[SortedVar],
    body: &Formula,
    sort: Sort,
    gen: &mut VarGen,
) -> Result<Formula> {
    let body = normalize::nnf(body)?;
    let lifted = qe::lift_inner_existentials(xs, ys, &body, gen)?;
    let pos = normalize::nnf_positive(&lifted.body, sort)?;
    let part = Partition::new(&lifted.xs, &lifted.ys);
    let canon = normalize::canonize(&pos, &part, sort)?;
    let skel = normalize::build_selector_skeleton(&canon, sort, gen);
    match sort {
        Sort::Int => int::eliminate_ramsey_int(skel, &lifted.xs, &lifted.ys, gen),
        Sort::Real => real::eliminate_ramsey_real(skel, &lifted.xs, &lifted.ys, gen),
    }
}

fn eliminate_mixed(
    xs: &[SortedVar],
    ys: &[SortedVar],
    body: &Formula,
    gen: &mut VarGen,
) -> Result<Formula> {
    let body = normalize::nnf(body)?;
    let (ws, matrix) = qe::hoist_existentials(&body, gen)?;

    let already_separated = decompose::is_separated(&matrix) && !matrix.contains_floor();
    let (xs2, ys2, ws2, matrix2, param_constraints, params) = if already_separated {
        (
            xs.to_vec(),
            ys.to_vec(),
            ws,
            matrix,
            Formula::tt(),
            Vec::new(),
        )
    } else {
        let flat = decompose::flatten_atoms(&matrix, gen)?;
        let (chain_vars, flat_matrix) = qe::hoist_existentials(&flat, gen)?;
        let mut all_ws = ws;
        all_ws.extend(chain_vars);
        let (sep, ws2) = decompose::separate_problem(xs, ys, &all_ws, &flat_matrix, gen)?;
        (
            sep.xs,
            sep.ys,
            ws2,
            sep.body,
            sep.param_constraints,
            sep.params,
        )
    };

    let inner = Formula::exists(ws2, matrix2);
    let lifted = qe::lift_inner_existentials(&xs2, &ys2, &inner, gen)?;
    let eliminated = mixed::eliminate_ramsey_mixed(&lifted.xs, &lifted.ys, &lifted.body, gen)?;
    let with_ranges = Formula::and([param_constraints, eliminated]);

    // Undo the parameter split: z_int ↦ ⌊z⌋, z_real ↦ z − ⌊z⌋ (for integer
    // parameters simply z and 0).
    let mut undo: BTreeMap<SortedVar, Term> = BTreeMap::new();
    for (orig, split) in &params {
        match orig.sort {
            Sort::Int => {
                undo.insert(split.int.clone(), Term::Var(orig.clone()));
            }
            Sort::Real => {
                let floor = Term::floor(Term::Var(orig.clone()));
                undo.insert(split.int.clone(), floor.clone());
                if let Some(r) = &split.real {
                    undo.insert(
                        r.clone(),
                        Term::Add(vec![
                            Term::Var(orig.clone()),
                            Term::Mul(-rat(1), Box::new(floor)),
                        ]),
                    );
                }
            }
        }
    }
    with_ranges.substitute(&undo, gen)
}

/// Drops existential binders that no longer occur in their body.
pub fn prune_unused_binders(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Cmp(..) => f.clone(),
        Formula::And(fs) => Formula::and(fs.iter().map(prune_unused_binders)),
        Formula::Or(fs) => Formula::or(fs.iter().map(prune_unused_binders)),
        Formula::Not(g) => Formula::not(prune_unused_binders(g)),
        Formula::Exists(vs, g) => {
            let g = prune_unused_binders(g);
            let free = g.free_vars();
            let vs: Vec<SortedVar> = vs.iter().filter(|v| free.contains(v)).cloned().collect();
            Formula::exists(vs, g)
        }
        Formula::ExistsRamsey(xs, ys, g) => {
            Formula::ExistsRamsey(xs.clone(), ys.clone(), Box::new(prune_unused_binders(g)))
        }
    }
}
