//! Formulas over linear atoms, with the Ramsey binder.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{Int, LinTerm, Rational, Sort, SortedVar, Term, VarGen};
use crate::error::{Error, Result};

/// Comparison relations of the input syntax. After normalization only `<`,
/// `=`, and the modulo kinds remain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Neq,
}

impl Rel {
    /// The complement relation, used when pushing negations inward.
    pub fn negate(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
            Rel::Eq => Rel::Neq,
            Rel::Neq => Rel::Eq,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Gt => lhs > rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Neq => lhs != rhs,
        }
    }
}

/// Congruence data `term ≡ residue (mod modulus)`, with `modulus ≥ 1` and
/// `0 ≤ residue < modulus`. Only integer coefficients and Int-sorted
/// variables are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModAtom {
    term: LinTerm,
    modulus: Int,
    residue: Int,
}

impl ModAtom {
    pub fn new(term: LinTerm, modulus: Int, residue: Int) -> Result<Self> {
        if modulus < Int::from(1) {
            return Err(Error::Sort(format!("modulus must be positive, got {modulus}")));
        }
        if !term.is_integral() {
            return Err(Error::Sort(format!(
                "modulo constraint over non-integer coefficients: {term}"
            )));
        }
        if let Some(v) = term.vars().find(|v| v.sort != Sort::Int) {
            return Err(Error::Sort(format!(
                "modulo constraint over real variable `{}`",
                v.name
            )));
        }
        let residue = residue.mod_floor(&modulus);
        Ok(ModAtom { term, modulus, residue })
    }

    pub fn term(&self) -> &LinTerm {
        &self.term
    }

    pub fn modulus(&self) -> &Int {
        &self.modulus
    }

    pub fn residue(&self) -> &Int {
        &self.residue
    }

    pub fn rename(&self, map: &BTreeMap<SortedVar, SortedVar>) -> ModAtom {
        ModAtom {
            term: self.term.rename(map),
            modulus: self.modulus.clone(),
            residue: self.residue.clone(),
        }
    }

    /// True when `term ≡ residue (mod modulus)` under `env`.
    pub fn holds(&self, env: &BTreeMap<SortedVar, Rational>) -> Result<bool> {
        let val = self
            .term
            .eval(env)
            .ok_or_else(|| Error::UnboundVariable(format!("{}", self.term)))?;
        if !val.is_integer() {
            return Err(Error::NonIntegerValue(format!("{}", self.term)));
        }
        let diff = val.to_integer() - &self.residue;
        Ok(diff.mod_floor(&self.modulus).is_zero())
    }
}

/// Normalized atoms. `Lt(t)` and `Eq(t)` mean `t < 0` and `t = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Lt(LinTerm),
    Eq(LinTerm),
    DivCong(ModAtom),
    NotDivCong(ModAtom),
}

impl Atom {
    pub fn visit_vars(&self, f: &mut dyn FnMut(&SortedVar)) {
        match self {
            Atom::Lt(t) | Atom::Eq(t) => t.vars().for_each(|v| f(v)),
            Atom::DivCong(m) | Atom::NotDivCong(m) => m.term().vars().for_each(|v| f(v)),
        }
    }

    /// The sort of the variables occurring in the atom, if uniform.
    /// Constant atoms report `None`.
    pub fn uniform_sort(&self) -> Option<Option<Sort>> {
        let mut sort: Option<Sort> = None;
        let mut mixed = false;
        self.visit_vars(&mut |v| match sort {
            None => sort = Some(v.sort),
            Some(s) if s != v.sort => mixed = true,
            _ => {}
        });
        if mixed {
            None
        } else {
            Some(sort)
        }
    }
}

/// Formula AST. `Cmp` is the pre-normalization atom over syntactic terms;
/// normalization turns every `Cmp` into core [`Atom`]s.
///
/// In `ExistsRamsey(xs, ys, body)` the two vectors have equal length and
/// pairwise equal sorts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(Atom),
    Cmp(Rel, Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(Vec<SortedVar>, Box<Formula>),
    ExistsRamsey(Vec<SortedVar>, Vec<SortedVar>, Box<Formula>),
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::And(vec![])
    }

    pub fn ff() -> Formula {
        Formula::Or(vec![])
    }

    pub fn is_tt(&self) -> bool {
        matches!(self, Formula::And(fs) if fs.is_empty())
    }

    pub fn is_ff(&self) -> bool {
        matches!(self, Formula::Or(fs) if fs.is_empty())
    }

    /// Conjunction; flattens nested conjunctions and folds constants.
    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            if f.is_ff() {
                return Formula::ff();
            }
            match f {
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::And(out)
        }
    }

    /// Disjunction; flattens nested disjunctions and folds constants.
    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            if f.is_tt() {
                return Formula::tt();
            }
            match f {
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::Or(out)
        }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(vars: Vec<SortedVar>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Atom `v = k` for an integer constant `k`.
    pub fn var_eq(v: &SortedVar, k: i64) -> Formula {
        let mut t = LinTerm::var(v.clone());
        t.add_constant(super::rat(-k));
        Formula::Atom(Atom::Eq(t))
    }

    /// Free variables under standard binder scoping; both `Exists` and
    /// `ExistsRamsey` bind.
    pub fn free_vars(&self) -> BTreeSet<SortedVar> {
        let mut out = BTreeSet::new();
        self.visit_free(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_free(&self, f: &mut dyn FnMut(&SortedVar)) {
        match self {
            Formula::Atom(a) => a.visit_vars(f),
            Formula::Cmp(_, s, t) => {
                s.visit_vars(f);
                t.visit_vars(f);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit_free(f)),
            Formula::Not(g) => g.visit_free(f),
            Formula::Exists(vs, g) => {
                let bound: BTreeSet<&SortedVar> = vs.iter().collect();
                g.visit_free(&mut |v| {
                    if !bound.contains(v) {
                        f(v);
                    }
                });
            }
            Formula::ExistsRamsey(xs, ys, g) => {
                let bound: BTreeSet<&SortedVar> = xs.iter().chain(ys).collect();
                g.visit_free(&mut |v| {
                    if !bound.contains(v) {
                        f(v);
                    }
                });
            }
        }
    }

    /// All variables, free and bound.
    pub fn all_vars(&self) -> BTreeSet<SortedVar> {
        let mut out = BTreeSet::new();
        self.visit_all(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_all(&self, f: &mut dyn FnMut(&SortedVar)) {
        match self {
            Formula::Atom(a) => a.visit_vars(f),
            Formula::Cmp(_, s, t) => {
                s.visit_vars(f);
                t.visit_vars(f);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit_all(f)),
            Formula::Not(g) => g.visit_all(f),
            Formula::Exists(vs, g) => {
                vs.iter().for_each(&mut *f);
                g.visit_all(f);
            }
            Formula::ExistsRamsey(xs, ys, g) => {
                xs.iter().chain(ys).for_each(&mut *f);
                g.visit_all(f);
            }
        }
    }

    pub fn contains_ramsey(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Cmp(..) => false,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::contains_ramsey),
            Formula::Not(g) | Formula::Exists(_, g) => g.contains_ramsey(),
            Formula::ExistsRamsey(..) => true,
        }
    }

    pub fn contains_floor(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Cmp(_, s, t) => s.has_floor() || t.has_floor(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::contains_floor),
            Formula::Not(g) | Formula::Exists(_, g) => g.contains_floor(),
            Formula::ExistsRamsey(_, _, g) => g.contains_floor(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Cmp(..) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::Exists(..) | Formula::ExistsRamsey(..) => false,
        }
    }

    /// Number of atom occurrences. Variable counts and atom counts are the
    /// size measure used in benchmark reports.
    pub fn count_atoms(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Cmp(..) => 1,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::count_atoms).sum(),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::ExistsRamsey(_, _, g) => {
                g.count_atoms()
            }
        }
    }

    pub fn count_vars(&self) -> usize {
        self.all_vars().len()
    }

    /// Simultaneous capture-avoiding substitution. Substituted terms must be
    /// sort-correct: an Int variable may only receive an integer-valued term.
    pub fn substitute(
        &self,
        map: &BTreeMap<SortedVar, Term>,
        gen: &mut VarGen,
    ) -> Result<Formula> {
        for (v, t) in map {
            if v.sort == Sort::Int && t.sort() != Sort::Int {
                return Err(Error::Sort(format!(
                    "cannot substitute real-valued term for integer variable `{}`",
                    v.name
                )));
            }
        }
        self.subst_inner(map, gen)
    }

    fn subst_inner(&self, map: &BTreeMap<SortedVar, Term>, gen: &mut VarGen) -> Result<Formula> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        match self {
            Formula::Atom(a) => subst_atom(a, map),
            Formula::Cmp(rel, s, t) => Ok(Formula::Cmp(*rel, s.subst(map), t.subst(map))),
            Formula::And(fs) => Ok(Formula::and(
                fs.iter()
                    .map(|g| g.subst_inner(map, gen))
                    .collect::<Result<Vec<_>>>()?,
            )),
            Formula::Or(fs) => Ok(Formula::or(
                fs.iter()
                    .map(|g| g.subst_inner(map, gen))
                    .collect::<Result<Vec<_>>>()?,
            )),
            Formula::Not(g) => Ok(Formula::not(g.subst_inner(map, gen)?)),
            Formula::Exists(vs, g) => {
                let (vs, g, map) = rebind(vs, g, map, gen)?;
                Ok(Formula::Exists(vs, Box::new(g.subst_inner(&map, gen)?)))
            }
            Formula::ExistsRamsey(xs, ys, g) => {
                let all: Vec<SortedVar> = xs.iter().chain(ys).cloned().collect();
                let (all, g, map) = rebind(&all, g, map, gen)?;
                let (xs, ys) = all.split_at(xs.len());
                Ok(Formula::ExistsRamsey(
                    xs.to_vec(),
                    ys.to_vec(),
                    Box::new(g.subst_inner(&map, gen)?),
                ))
            }
        }
    }
}

/// Shadows bound variables out of the substitution and renames any binder
/// that would capture a free variable of the substituted terms.
fn rebind(
    vs: &[SortedVar],
    body: &Formula,
    map: &BTreeMap<SortedVar, Term>,
    gen: &mut VarGen,
) -> Result<(Vec<SortedVar>, Formula, BTreeMap<SortedVar, Term>)> {
    let mut map: BTreeMap<SortedVar, Term> = map
        .iter()
        .filter(|(v, _)| !vs.contains(v))
        .map(|(v, t)| (v.clone(), t.clone()))
        .collect();
    let mut incoming: BTreeSet<SortedVar> = BTreeSet::new();
    for t in map.values() {
        t.visit_vars(&mut |v| {
            incoming.insert(v.clone());
        });
    }
    let mut new_vs = Vec::with_capacity(vs.len());
    let mut renaming: BTreeMap<SortedVar, Term> = BTreeMap::new();
    for v in vs {
        if incoming.contains(v) {
            let fresh = gen.fresh("r", v.sort);
            renaming.insert(v.clone(), Term::Var(fresh.clone()));
            new_vs.push(fresh);
        } else {
            new_vs.push(v.clone());
        }
    }
    let body = if renaming.is_empty() {
        body.clone()
    } else {
        body.subst_inner(&renaming, gen)?
    };
    // A renamed binder must not collide with a key of the outer map; fresh
    // names cannot, by construction.
    map.retain(|v, _| !new_vs.contains(v));
    Ok((new_vs, body, map))
}

fn subst_atom(a: &Atom, map: &BTreeMap<SortedVar, Term>) -> Result<Formula> {
    // When every replacement relevant to this atom is floor-free the atom
    // stays linear; otherwise it becomes a term-level comparison again.
    let mut touched: BTreeSet<&SortedVar> = BTreeSet::new();
    a.visit_vars(&mut |v| {
        if let Some((k, _)) = map.get_key_value(v) {
            touched.insert(k);
        }
    });
    let linear: Option<BTreeMap<SortedVar, LinTerm>> = touched
        .iter()
        .map(|v| {
            map[*v]
                .to_linterm()
                .ok()
                .map(|l| ((*v).clone(), l))
        })
        .collect();
    match a {
        Atom::Lt(t) | Atom::Eq(t) => {
            let rel = if matches!(a, Atom::Lt(_)) { Rel::Lt } else { Rel::Eq };
            match &linear {
                Some(lmap) => {
                    let t = t.subst(lmap);
                    // lt0/eq0 fold atoms that became ground
                    Ok(match rel {
                        Rel::Lt => lt0(t),
                        _ => eq0(t),
                    })
                }
                None => {
                    let term = Term::from_linterm(t).subst(map);
                    Ok(Formula::Cmp(rel, term, Term::Const(Rational::zero())))
                }
            }
        }
        Atom::DivCong(m) | Atom::NotDivCong(m) => {
            let lmap = linear.ok_or(Error::FloorNotAllowed)?;
            let term = m.term().subst(&lmap);
            let m2 = ModAtom::new(term, m.modulus().clone(), m.residue().clone())?;
            Ok(Formula::Atom(if matches!(a, Atom::DivCong(_)) {
                Atom::DivCong(m2)
            } else {
                Atom::NotDivCong(m2)
            }))
        }
    }
}

/// `t < 0` atom.
pub(crate) fn lt0(t: LinTerm) -> Formula {
    if t.is_constant() {
        return if t.get_constant().is_negative() {
            Formula::tt()
        } else {
            Formula::ff()
        };
    }
    Formula::Atom(Atom::Lt(t))
}

/// `t = 0` atom.
pub(crate) fn eq0(t: LinTerm) -> Formula {
    if t.is_constant() {
        return if t.get_constant().is_zero() {
            Formula::tt()
        } else {
            Formula::ff()
        };
    }
    Formula::Atom(Atom::Eq(t))
}
