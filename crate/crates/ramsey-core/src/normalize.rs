//! Normalization into the positive atom algebra the eliminators consume:
//! negations pushed into atoms, non-strict and disequality atoms desugared,
//! atoms rearranged into the x-side / y-side / parameter-side shape, and the
//! selector-variable Boolean abstraction.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::ast::formula::{eq0, lt0};
use crate::ast::{
    rat, Atom, Formula, Int, LinTerm, ModAtom, Rational, Rel, Sort, SortedVar, Term, VarGen,
};
use crate::error::{Error, Result};

/// Pushes negations inward to the atoms, flipping comparison relations and
/// congruence polarity. Fails on a negated quantifier: the input would leave
/// the existential fragment.
pub fn nnf(f: &Formula) -> Result<Formula> {
    nnf_signed(f, false)
}

fn nnf_signed(f: &Formula, negate: bool) -> Result<Formula> {
    match f {
        Formula::Atom(a) => Ok(Formula::Atom(if negate { negate_atom(a) } else { a.clone() })),
        Formula::Cmp(rel, s, t) => {
            let rel = if negate { rel.negate() } else { *rel };
            Ok(Formula::Cmp(rel, s.clone(), t.clone()))
        }
        Formula::And(fs) => {
            let parts = fs
                .iter()
                .map(|g| nnf_signed(g, negate))
                .collect::<Result<Vec<_>>>()?;
            Ok(if negate { Formula::or(parts) } else { Formula::and(parts) })
        }
        Formula::Or(fs) => {
            let parts = fs
                .iter()
                .map(|g| nnf_signed(g, negate))
                .collect::<Result<Vec<_>>>()?;
            Ok(if negate { Formula::and(parts) } else { Formula::or(parts) })
        }
        Formula::Not(g) => nnf_signed(g, !negate),
        Formula::Exists(vs, g) => {
            if negate {
                return Err(Error::NotExistential);
            }
            Ok(Formula::exists(vs.clone(), nnf_signed(g, false)?))
        }
        Formula::ExistsRamsey(xs, ys, g) => {
            if negate {
                return Err(Error::NotExistential);
            }
            Ok(Formula::ExistsRamsey(
                xs.clone(),
                ys.clone(),
                Box::new(nnf_signed(g, false)?),
            ))
        }
    }
}

fn negate_atom(a: &Atom) -> Atom {
    match a {
        Atom::DivCong(m) => Atom::NotDivCong(m.clone()),
        Atom::NotDivCong(m) => Atom::DivCong(m.clone()),
        // Lt/Eq atoms only exist after desugaring, which runs on
        // negation-free input.
        Atom::Lt(_) | Atom::Eq(_) => unreachable!("core atom under a negation"),
    }
}

/// Brings a quantifier-free, floor-free formula into a negation-free positive
/// combination of atoms with kinds {Lt, Eq, DivCong, NotDivCong}.
///
/// Over Int the complement of `<` tightens to a strict inequality
/// (`¬(a<b) → b < a+1`); over Real it splits into `< ∨ =`. Disequalities
/// split into `< ∨ >` in both domains.
pub fn nnf_positive(f: &Formula, domain: Sort) -> Result<Formula> {
    let f = nnf(f)?;
    desugar(&f, &|_| Ok(domain))
}

/// Per-atom variant for separated mixed formulas: each atom is desugared by
/// the sort of its own variables.
pub fn nnf_positive_mixed(f: &Formula) -> Result<Formula> {
    let f = nnf(f)?;
    desugar(&f, &|l: &LinTerm| {
        let mut sort: Option<Sort> = None;
        for v in l.vars() {
            match sort {
                None => sort = Some(v.sort),
                Some(s) if s != v.sort => {
                    return Err(Error::Sort(format!(
                        "atom mixes integer and real variables: {l}"
                    )))
                }
                _ => {}
            }
        }
        // Constant atoms fold away regardless of the domain choice.
        Ok(sort.unwrap_or(Sort::Real))
    })
}

fn desugar(f: &Formula, domain_of: &dyn Fn(&LinTerm) -> Result<Sort>) -> Result<Formula> {
    match f {
        Formula::Atom(a) => {
            // fold variable-free atoms
            let mut ground = true;
            a.visit_vars(&mut |_| ground = false);
            if ground {
                let v = f.evaluate(&BTreeMap::new())?;
                return Ok(if v { Formula::tt() } else { Formula::ff() });
            }
            Ok(f.clone())
        }
        Formula::Cmp(rel, s, t) => {
            let l = Term::sub(s.clone(), t.clone()).to_linterm()?;
            let domain = domain_of(&l)?;
            Ok(desugar_cmp(*rel, l, domain))
        }
        Formula::And(fs) => Ok(Formula::and(
            fs.iter()
                .map(|g| desugar(g, domain_of))
                .collect::<Result<Vec<_>>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::or(
            fs.iter()
                .map(|g| desugar(g, domain_of))
                .collect::<Result<Vec<_>>>()?,
        )),
        Formula::Not(_) => Err(Error::Unsupported(
            "negation reached atom desugaring; run nnf first".into(),
        )),
        Formula::Exists(vs, g) => Ok(Formula::exists(vs.clone(), desugar(g, domain_of)?)),
        Formula::ExistsRamsey(..) => Err(Error::Unsupported(
            "ramsey binder reached atom desugaring".into(),
        )),
    }
}

/// `l REL 0` as a positive combination of core atoms.
fn desugar_cmp(rel: Rel, l: LinTerm, domain: Sort) -> Formula {
    let one = LinTerm::constant(rat(1));
    match (rel, domain) {
        (Rel::Lt, _) => lt0(l),
        (Rel::Eq, _) => eq0(l),
        (Rel::Gt, _) => lt0(-l),
        (Rel::Le, Sort::Int) => lt0(l - one),
        (Rel::Ge, Sort::Int) => lt0(-l - one),
        (Rel::Le, Sort::Real) => Formula::or([lt0(l.clone()), eq0(l)]),
        (Rel::Ge, Sort::Real) => Formula::or([lt0(-l.clone()), eq0(l)]),
        (Rel::Neq, _) => Formula::or([lt0(l.clone()), lt0(-l)]),
    }
}

// ---------------------------------------------------------------------------
// Canonical atoms
// ---------------------------------------------------------------------------

/// Atom kinds after canonization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonKind {
    /// `rx < sy + tz + h`
    Lt,
    /// `rx = sy + tz + h`
    Eq,
    /// `rx ≡_e sy + tz + h`
    DivCong(Int),
    /// `rx ≢_e sy + tz + h`
    NotDivCong(Int),
}

/// An atom rearranged so the x-variables sit on the left and the y- and
/// parameter-variables on the right: `r^T x REL s^T y + t^T z + h`.
/// Integer atoms are denominator-cleared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonAtom {
    pub kind: CanonKind,
    pub rx: LinTerm,
    pub sy: LinTerm,
    pub tz: LinTerm,
    pub h: Rational,
}

impl CanonAtom {
    /// The plain formula this canon atom denotes, for reassembly in tests
    /// and in the degenerate single-element branches of the mixed eliminator.
    pub fn to_formula(&self) -> Formula {
        let l = self.rx.clone() - self.sy.clone() - self.tz.clone()
            - LinTerm::constant(self.h.clone());
        match &self.kind {
            CanonKind::Lt => lt0(l),
            CanonKind::Eq => eq0(l),
            CanonKind::DivCong(e) | CanonKind::NotDivCong(e) => {
                let m = ModAtom::new(l, e.clone(), Int::zero()).expect("integral by construction");
                Formula::Atom(match &self.kind {
                    CanonKind::DivCong(_) => Atom::DivCong(m),
                    _ => Atom::NotDivCong(m),
                })
            }
        }
    }

    /// The sort of the variables mentioned; canon atoms never mix sorts.
    pub fn sort(&self) -> Sort {
        self.rx
            .vars()
            .chain(self.sy.vars())
            .chain(self.tz.vars())
            .map(|v| v.sort)
            .next()
            .unwrap_or(Sort::Real)
    }
}

/// Positive Boolean combination over canonical atoms.
#[derive(Debug, Clone)]
pub enum CanonFormula {
    Atom(CanonAtom),
    And(Vec<CanonFormula>),
    Or(Vec<CanonFormula>),
}

/// Role of each variable in the Ramsey elimination.
pub struct Partition {
    xs: BTreeSet<SortedVar>,
    ys: BTreeSet<SortedVar>,
}

impl Partition {
    pub fn new(xs: &[SortedVar], ys: &[SortedVar]) -> Self {
        Partition {
            xs: xs.iter().cloned().collect(),
            ys: ys.iter().cloned().collect(),
        }
    }
}

/// Rearranges every atom of a positive formula into [`CanonAtom`] shape.
/// Variables outside `xs ∪ ys` are parameters.
pub fn canonize(f: &Formula, part: &Partition, domain: Sort) -> Result<CanonFormula> {
    match f {
        Formula::Atom(a) => Ok(CanonFormula::Atom(canonize_atom(a, part, domain)?)),
        Formula::And(fs) => Ok(CanonFormula::And(
            fs.iter()
                .map(|g| canonize(g, part, domain))
                .collect::<Result<_>>()?,
        )),
        Formula::Or(fs) => Ok(CanonFormula::Or(
            fs.iter()
                .map(|g| canonize(g, part, domain))
                .collect::<Result<_>>()?,
        )),
        _ => Err(Error::Unsupported(
            "canonize expects a positive quantifier-free combination of core atoms".into(),
        )),
    }
}

pub fn canonize_atom(a: &Atom, part: &Partition, domain: Sort) -> Result<CanonAtom> {
    let (l, kind) = match a {
        Atom::Lt(l) => (l.clone(), CanonKind::Lt),
        Atom::Eq(l) => (l.clone(), CanonKind::Eq),
        Atom::DivCong(m) => (
            m.term().clone() - LinTerm::constant(Rational::from_integer(m.residue().clone())),
            CanonKind::DivCong(m.modulus().clone()),
        ),
        Atom::NotDivCong(m) => (
            m.term().clone() - LinTerm::constant(Rational::from_integer(m.residue().clone())),
            CanonKind::NotDivCong(m.modulus().clone()),
        ),
    };
    // l REL 0 becomes rx REL sy + tz + h with the x-part kept left and
    // everything else negated across the relation.
    let rx = l.restrict(|v| part.xs.contains(v));
    let sy = -l.restrict(|v| part.ys.contains(v));
    let tz = -l.restrict(|v| !part.xs.contains(v) && !part.ys.contains(v));
    let h = -l.get_constant().clone();
    let mut atom = CanonAtom { kind, rx, sy, tz, h };
    if domain == Sort::Int {
        clear_denominators(&mut atom);
    }
    Ok(atom)
}

/// Multiplies an integer-domain atom through by the lcm of its coefficient
/// denominators. The multiplier is positive, so the relation is preserved;
/// congruences scale their modulus along.
fn clear_denominators(atom: &mut CanonAtom) {
    use num_integer::Integer;
    let mut l: Int = atom.h.denom().clone();
    for t in [&atom.rx, &atom.sy, &atom.tz] {
        l = l.lcm(&t.denominator_lcm());
    }
    if l.is_one() {
        return;
    }
    let k = Rational::from_integer(l.clone());
    atom.rx = atom.rx.scale(&k);
    atom.sy = atom.sy.scale(&k);
    atom.tz = atom.tz.scale(&k);
    atom.h = &atom.h * &k;
    match &mut atom.kind {
        CanonKind::DivCong(e) | CanonKind::NotDivCong(e) => *e *= l,
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// Selector skeleton
// ---------------------------------------------------------------------------

/// The Boolean-structure abstraction: each atom occurrence is replaced by a
/// fresh 0/1 selector variable, avoiding any DNF expansion. The skeleton
/// contains selector equations and range constraints only; the eliminators
/// re-attach each atom's profile constraints under its selector guard.
#[derive(Debug, Clone)]
pub struct SelectorSkeleton {
    /// Selector variable per abstracted atom occurrence, aligned with `atoms`.
    pub selectors: Vec<SortedVar>,
    /// `φ'` plus the 0/1 range constraints.
    pub skeleton: Formula,
    pub atoms: Vec<CanonAtom>,
    pub domain: Sort,
}

impl SelectorSkeleton {
    /// `∃q: φ' ∧ ⋀ (q_i = 1 → atom_i)` re-assembled as a plain formula; used
    /// by the equisatisfiability tests.
    pub fn reconstruct(&self) -> Formula {
        let guards: Vec<Formula> = self
            .selectors
            .iter()
            .zip(&self.atoms)
            .map(|(q, a)| guard(q, a.to_formula()))
            .collect();
        Formula::exists(
            self.selectors.clone(),
            Formula::and(std::iter::once(self.skeleton.clone()).chain(guards)),
        )
    }
}

/// `q = 1 → body`, encoded positively as `q = 0 ∨ body` (the skeleton keeps
/// every selector in {0, 1}).
pub fn guard(q: &SortedVar, body: Formula) -> Formula {
    Formula::or([Formula::var_eq(q, 0), body])
}

pub fn build_selector_skeleton(
    f: &CanonFormula,
    domain: Sort,
    gen: &mut VarGen,
) -> SelectorSkeleton {
    let mut selectors = Vec::new();
    let mut atoms = Vec::new();
    let skeleton = abstract_atoms(f, domain, gen, &mut selectors, &mut atoms);
    let ranges: Vec<Formula> = selectors
        .iter()
        .map(|q| Formula::or([Formula::var_eq(q, 0), Formula::var_eq(q, 1)]))
        .collect();
    SelectorSkeleton {
        selectors,
        skeleton: Formula::and(std::iter::once(skeleton).chain(ranges)),
        atoms,
        domain,
    }
}

fn abstract_atoms(
    f: &CanonFormula,
    domain: Sort,
    gen: &mut VarGen,
    selectors: &mut Vec<SortedVar>,
    atoms: &mut Vec<CanonAtom>,
) -> Formula {
    match f {
        CanonFormula::Atom(a) => {
            let q = gen.fresh("q", domain);
            selectors.push(q.clone());
            atoms.push(a.clone());
            Formula::var_eq(&q, 1)
        }
        CanonFormula::And(fs) => Formula::And(
            fs.iter()
                .map(|g| abstract_atoms(g, domain, gen, selectors, atoms))
                .collect(),
        ),
        CanonFormula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|g| abstract_atoms(g, domain, gen, selectors, atoms))
                .collect(),
        ),
    }
}
