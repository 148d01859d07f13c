//! Integer/fractional separation of mixed formulas.
//!
//! Every atom is first flattened to one of the five primitive forms
//! `v = 0`, `v = 1`, `v1 + v2 = v3`, `v < 0`, `v1 = ⌊v2⌋` over single
//! variables, with constant multiples expanded by double-and-add chains so
//! the result stays linear in the bit-length of the coefficients. Each
//! variable `v` is then split into `v_int + v_real` with `0 ≤ v_real < 1`,
//! and each primitive atom is rewritten into a Boolean combination whose
//! atoms are purely integer or purely real.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::ast::formula::{eq0, lt0};
use crate::ast::{
    rat, Atom, Formula, Int, LinTerm, Rational, Rel, Sort, SortedVar, Term, VarGen,
};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Flattening to primitive atoms
// ---------------------------------------------------------------------------

/// Rewrites every comparison atom into primitive form, wrapping the result
/// in an existential block for the chain variables. Modulo atoms pass
/// through untouched; they are already purely integer.
pub fn flatten_atoms(f: &Formula, gen: &mut VarGen) -> Result<Formula> {
    let mut ctx = ChainCtx {
        gen,
        defs: Vec::new(),
        vars: Vec::new(),
        memo: HashMap::new(),
    };
    let body = flatten(f, &mut ctx)?;
    let ChainCtx { defs, vars, .. } = ctx;
    Ok(Formula::exists(
        vars,
        Formula::and(defs.into_iter().chain([body])),
    ))
}

fn flatten(f: &Formula, ctx: &mut ChainCtx) -> Result<Formula> {
    match f {
        Formula::Atom(Atom::DivCong(_)) | Formula::Atom(Atom::NotDivCong(_)) => Ok(f.clone()),
        Formula::Atom(Atom::Lt(l)) => flatten_cmp(Rel::Lt, &Term::from_linterm(l), ctx),
        Formula::Atom(Atom::Eq(l)) => flatten_cmp(Rel::Eq, &Term::from_linterm(l), ctx),
        Formula::Cmp(rel, a, b) => {
            // x = ⌊y⌋ over single variables is already primitive
            if *rel == Rel::Eq {
                if let Some(p) = as_floor_primitive(a, b) {
                    return Ok(p);
                }
            }
            flatten_cmp(*rel, &Term::sub(a.clone(), b.clone()), ctx)
        }
        Formula::And(fs) => Ok(Formula::and(
            fs.iter().map(|g| flatten(g, ctx)).collect::<Result<Vec<_>>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::or(
            fs.iter().map(|g| flatten(g, ctx)).collect::<Result<Vec<_>>>()?,
        )),
        Formula::Not(_) => Err(Error::Unsupported(
            "negation reached flattening; run nnf first".into(),
        )),
        Formula::Exists(..) | Formula::ExistsRamsey(..) => Err(Error::Unsupported(
            "quantifier reached flattening; hoist first".into(),
        )),
    }
}

fn as_floor_primitive(a: &Term, b: &Term) -> Option<Formula> {
    match (a, b) {
        (Term::Var(u), Term::Floor(t)) | (Term::Floor(t), Term::Var(u)) => match t.as_ref() {
            Term::Var(v) => Some(Formula::Cmp(
                Rel::Eq,
                Term::Var(u.clone()),
                Term::floor(Term::Var(v.clone())),
            )),
            _ => None,
        },
        _ => None,
    }
}

/// `t REL 0` in primitive form. Floor-free comparisons are linearized and
/// denominator-cleared first, so only integer double-and-add chains remain;
/// the desugaring is the dense (real) one, which is sound for every LIRA
/// variable.
fn flatten_cmp(rel: Rel, t: &Term, ctx: &mut ChainCtx) -> Result<Formula> {
    if !t.has_floor() {
        let l = t.to_linterm()?;
        if l.is_constant() {
            let z = Rational::zero();
            return Ok(if rel.holds(l.get_constant(), &z) {
                Formula::tt()
            } else {
                Formula::ff()
            });
        }
        // positive multiplier: the relation is preserved
        let l = l.scale(&Rational::from_integer(l.denominator_lcm()));
        let (rel, l) = match rel {
            Rel::Gt => (Rel::Lt, -l),
            Rel::Ge => (Rel::Le, -l),
            other => (other, l),
        };
        let diff = ctx.diff_var(&l)?;
        let lt = || lt0(LinTerm::var(diff.clone()));
        let zero = || eq0(LinTerm::var(diff.clone()));
        return Ok(match rel {
            Rel::Lt => lt(),
            Rel::Le => Formula::or([lt(), zero()]),
            Rel::Eq => zero(),
            Rel::Neq => {
                let neg = ctx.diff_var(&-l)?;
                Formula::or([lt(), lt0(LinTerm::var(neg))])
            }
            Rel::Gt | Rel::Ge => unreachable!("normalized above"),
        });
    }
    // floor subterms: build the chain over the term tree
    let vt = ctx.var_of(t)?;
    let pos = || lt0(LinTerm::var(vt.clone()));
    let zero = || eq0(LinTerm::var(vt.clone()));
    Ok(match rel {
        Rel::Lt => pos(),
        Rel::Eq => zero(),
        Rel::Le => Formula::or([pos(), zero()]),
        Rel::Gt => lt0(LinTerm::var(ctx.var_of(&Term::neg(t.clone()))?)),
        Rel::Ge => {
            let n = ctx.var_of(&Term::neg(t.clone()))?;
            Formula::or([lt0(LinTerm::var(n)), zero()])
        }
        Rel::Neq => {
            let n = ctx.var_of(&Term::neg(t.clone()))?;
            Formula::or([pos(), lt0(LinTerm::var(n))])
        }
    })
}

struct ChainCtx<'a> {
    gen: &'a mut VarGen,
    defs: Vec<Formula>,
    vars: Vec<SortedVar>,
    /// Shares the chain variable of repeated subterms.
    memo: HashMap<Term, SortedVar>,
}

impl ChainCtx<'_> {
    /// Integer-valued chains stay Int-sorted, which spares them a
    /// fractional part and its range constraints after separation.
    fn fresh_sorted(&mut self, sort: Sort) -> SortedVar {
        let v = self.gen.fresh("c", sort);
        self.vars.push(v.clone());
        v
    }

    /// Chain variable for the value of an integral linear combination,
    /// expressed as `m + N = P` over the positive parts `P` and `-N` of `l`.
    fn diff_var(&mut self, l: &LinTerm) -> Result<SortedVar> {
        debug_assert!(l.is_integral());
        let mut pos = LinTerm::zero();
        let mut neg = LinTerm::zero();
        for (v, c) in l.iter() {
            if c.is_positive() {
                pos.add_term(v.clone(), c.clone());
            } else {
                neg.add_term(v.clone(), -c.clone());
            }
        }
        if l.get_constant().is_positive() {
            pos.add_constant(l.get_constant().clone());
        } else {
            neg.add_constant(-l.get_constant().clone());
        }
        // single positive unit variable and nothing else: already a chain var
        if neg.is_zero() && pos.num_terms() == 1 && pos.get_constant().is_zero() {
            let (v, c) = pos.iter().next().map(|(v, c)| (v.clone(), c.clone())).unwrap();
            if c.is_one() {
                return Ok(v);
            }
        }
        let vp = self.side_var(&pos)?;
        let vn = self.side_var(&neg)?;
        let sort = if vp.sort == Sort::Int && vn.sort == Sort::Int {
            Sort::Int
        } else {
            Sort::Real
        };
        let m = self.fresh_sorted(sort);
        self.def_sum(&m, &vn, &vp);
        Ok(m)
    }

    /// Chain variable for a nonnegative combination `Σ c_i v_i + c`.
    fn side_var(&mut self, side: &LinTerm) -> Result<SortedVar> {
        let term = Term::from_linterm(side);
        self.var_of(&term)
    }

    /// `v1 + v2 = v3` definition atom.
    fn def_sum(&mut self, a: &SortedVar, b: &SortedVar, c: &SortedVar) {
        let mut l = LinTerm::var(a.clone());
        l.add_term(b.clone(), rat(1));
        l.add_term(c.clone(), rat(-1));
        self.defs.push(Formula::Atom(Atom::Eq(l)));
    }

    fn zero_var(&mut self) -> SortedVar {
        self.var_of(&Term::Const(Rational::zero())).expect("constant chain")
    }

    fn var_of(&mut self, t: &Term) -> Result<SortedVar> {
        if let Term::Var(v) = t {
            return Ok(v.clone());
        }
        if let Some(v) = self.memo.get(t) {
            return Ok(v.clone());
        }
        let v = match t {
            Term::Var(_) => unreachable!(),
            Term::Const(c) => self.const_var(c)?,
            Term::Add(ts) => {
                if ts.is_empty() {
                    self.zero_var()
                } else {
                    let mut acc = self.var_of(&ts[0])?;
                    for s in &ts[1..] {
                        let vs = self.var_of(s)?;
                        let sort = if acc.sort == Sort::Int && vs.sort == Sort::Int {
                            Sort::Int
                        } else {
                            Sort::Real
                        };
                        let sum = self.fresh_sorted(sort);
                        self.def_sum(&acc, &vs, &sum);
                        acc = sum;
                    }
                    acc
                }
            }
            Term::Mul(c, s) => self.scaled_var(c, s)?,
            Term::Floor(s) => {
                let vs = self.var_of(s)?;
                let u = self.fresh_sorted(Sort::Int);
                self.defs.push(Formula::Cmp(
                    Rel::Eq,
                    Term::Var(u.clone()),
                    Term::floor(Term::Var(vs)),
                ));
                u
            }
        };
        self.memo.insert(t.clone(), v.clone());
        Ok(v)
    }

    fn const_var(&mut self, c: &Rational) -> Result<SortedVar> {
        if c.is_zero() {
            let v = self.fresh_sorted(Sort::Int);
            self.defs.push(Formula::Atom(Atom::Eq(LinTerm::var(v.clone()))));
            return Ok(v);
        }
        if c.is_one() {
            let v = self.fresh_sorted(Sort::Int);
            self.defs.push(Formula::Atom(Atom::Eq(
                LinTerm::var(v.clone()) - LinTerm::constant(rat(1)),
            )));
            return Ok(v);
        }
        // c = p/q over the unit chain
        let one = self.var_of(&Term::Const(Rational::one()))?;
        self.scaled_var(c, &Term::Var(one))
    }

    /// Chain variable for `c · s`, by double-and-add on the integer parts.
    fn scaled_var(&mut self, c: &Rational, s: &Term) -> Result<SortedVar> {
        if c.is_one() {
            return self.var_of(s);
        }
        if c.is_zero() {
            return Ok(self.zero_var());
        }
        if c.is_integer() {
            let n = c.numer();
            if n.is_negative() {
                // m + (−n)·s = 0
                let pos = self.scaled_var(&-c.clone(), s)?;
                let z = self.zero_var();
                let m = self.fresh_sorted(pos.sort);
                self.def_sum(&m, &pos, &z);
                return Ok(m);
            }
            return self.double_and_add(n, s);
        }
        // (p/q)·s: introduce r with q·r = p·s
        let num = Rational::from_integer(c.numer().clone());
        let den = c.denom().clone();
        let vnum = self.scaled_var(&num, s)?;
        let r = self.fresh_sorted(Sort::Real);
        let qr = self.double_and_add(&den, &Term::Var(r.clone()))?;
        let z = self.zero_var();
        self.def_sum(&qr, &z, &vnum);
        Ok(r)
    }

    /// `n · s` for n ≥ 1 via MSB-first double-and-add; O(log n) fresh
    /// variables and definitions.
    fn double_and_add(&mut self, n: &Int, s: &Term) -> Result<SortedVar> {
        debug_assert!(n.is_positive());
        let base = self.var_of(s)?;
        let bits = n.bits();
        let mut acc = base.clone();
        for i in (0..bits.saturating_sub(1)).rev() {
            let doubled = self.fresh_sorted(acc.sort);
            self.def_sum(&acc, &acc, &doubled);
            acc = doubled;
            if n.bit(i) {
                let sort = if acc.sort == Sort::Int && base.sort == Sort::Int {
                    Sort::Int
                } else {
                    Sort::Real
                };
                let bumped = self.fresh_sorted(sort);
                self.def_sum(&acc, &base, &bumped);
                acc = bumped;
            }
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Separation into integer and fractional parts
// ---------------------------------------------------------------------------

/// The integer/real split of one variable. Int-sorted variables keep only an
/// integer part; their fractional part is identically zero.
#[derive(Debug, Clone)]
pub struct Split {
    pub int: SortedVar,
    pub real: Option<SortedVar>,
}

impl Split {
    fn real_lin(&self) -> LinTerm {
        match &self.real {
            Some(r) => LinTerm::var(r.clone()),
            None => LinTerm::zero(),
        }
    }

    pub fn parts(&self) -> Vec<SortedVar> {
        let mut out = vec![self.int.clone()];
        out.extend(self.real.clone());
        out
    }
}

/// Variable-splitting context shared across one separation.
pub struct Separator<'a> {
    gen: &'a mut VarGen,
    map: BTreeMap<SortedVar, Split>,
}

/// Outcome of separating a Ramsey elimination problem.
pub struct Separated {
    pub xs: Vec<SortedVar>,
    pub ys: Vec<SortedVar>,
    /// Body over split variables; atoms are pure. Range constraints for the
    /// tuple variables are conjoined in.
    pub body: Formula,
    /// `0 ≤ z_real < 1` constraints for the split free parameters; these sit
    /// outside the Ramsey binder.
    pub param_constraints: Formula,
    /// Free-parameter splits, for the final `z_int ↦ ⌊z⌋` substitution.
    pub params: Vec<(SortedVar, Split)>,
}

impl<'a> Separator<'a> {
    pub fn new(gen: &'a mut VarGen) -> Self {
        Separator { gen, map: BTreeMap::new() }
    }

    fn split(&mut self, v: &SortedVar) -> Split {
        if let Some(s) = self.map.get(v) {
            return s.clone();
        }
        let s = Split {
            int: self.gen.fresh("xi", Sort::Int),
            real: match v.sort {
                Sort::Int => None,
                Sort::Real => Some(self.gen.fresh("xr", Sort::Real)),
            },
        };
        self.map.insert(v.clone(), s.clone());
        s
    }

    /// `0 ≤ v_real < 1` for a split variable; empty for integer variables.
    fn range(&self, s: &Split) -> Formula {
        match &s.real {
            None => Formula::tt(),
            Some(r) => {
                let rv = LinTerm::var(r.clone());
                Formula::and([
                    Formula::or([lt0(-rv.clone()), eq0(rv.clone())]),
                    lt0(rv - LinTerm::constant(rat(1))),
                ])
            }
        }
    }
}

/// Separates `∃ram xs,ys: ∃ws: body` (already flattened, quantifier-free
/// matrix). Every variable is split; the tuple and inner-block ranges are
/// conjoined into the body, parameter ranges are returned separately.
pub fn separate_problem(
    xs: &[SortedVar],
    ys: &[SortedVar],
    ws: &[SortedVar],
    body: &Formula,
    gen: &mut VarGen,
) -> Result<(Separated, Vec<SortedVar>)> {
    let mut sep = Separator::new(gen);
    let xs2: Vec<SortedVar> = xs.iter().flat_map(|v| sep.split(v).parts()).collect();
    let ys2: Vec<SortedVar> = ys.iter().flat_map(|v| sep.split(v).parts()).collect();
    let ws2: Vec<SortedVar> = ws.iter().flat_map(|v| sep.split(v).parts()).collect();
    let rewritten = separate_formula(body, &mut sep)?;

    let mut tuple_ranges = Vec::new();
    for v in xs.iter().chain(ys) {
        let s = sep.map[v].clone();
        tuple_ranges.push(sep.range(&s));
    }
    let mut inner_ranges = Vec::new();
    for v in ws {
        let s = sep.map[v].clone();
        inner_ranges.push(sep.range(&s));
    }

    let bound: std::collections::BTreeSet<&SortedVar> =
        xs.iter().chain(ys).chain(ws).collect();
    let mut params = Vec::new();
    let mut param_constraints = Vec::new();
    for (v, s) in &sep.map {
        if !bound.contains(v) {
            params.push((v.clone(), s.clone()));
            param_constraints.push(sep.range(s));
        }
    }

    let body = Formula::and(
        tuple_ranges
            .into_iter()
            .chain(inner_ranges)
            .chain([rewritten]),
    );
    Ok((
        Separated {
            xs: xs2,
            ys: ys2,
            body,
            param_constraints: Formula::and(param_constraints),
            params,
        },
        ws2,
    ))
}

/// Separation of a bare flattened formula, as used by the decomposition
/// tests: returns the rewritten formula (with all range constraints
/// conjoined) and the split map.
pub fn separate(
    f: &Formula,
    gen: &mut VarGen,
) -> Result<(Formula, BTreeMap<SortedVar, Split>)> {
    let (ws, matrix) = crate::qe::hoist_existentials(f, gen)?;
    let (sep, ws2) = separate_problem(&[], &[], &ws, &matrix, gen)?;
    let out = Formula::and([sep.param_constraints, Formula::exists(ws2, sep.body)]);
    let map: BTreeMap<SortedVar, Split> = sep.params.into_iter().collect();
    Ok((out, map))
}

fn separate_formula(f: &Formula, sep: &mut Separator) -> Result<Formula> {
    match f {
        Formula::And(fs) => Ok(Formula::and(
            fs.iter()
                .map(|g| separate_formula(g, sep))
                .collect::<Result<Vec<_>>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::or(
            fs.iter()
                .map(|g| separate_formula(g, sep))
                .collect::<Result<Vec<_>>>()?,
        )),
        Formula::Atom(Atom::Lt(l)) => separate_lt(l, sep),
        Formula::Atom(Atom::Eq(l)) => separate_eq(l, sep),
        Formula::Atom(Atom::DivCong(m)) | Formula::Atom(Atom::NotDivCong(m)) => {
            let renaming: BTreeMap<SortedVar, SortedVar> = m
                .term()
                .vars()
                .map(|v| (v.clone(), sep.split(v).int.clone()))
                .collect();
            let renamed = m.rename(&renaming);
            Ok(Formula::Atom(match f {
                Formula::Atom(Atom::DivCong(_)) => Atom::DivCong(renamed),
                _ => Atom::NotDivCong(renamed),
            }))
        }
        Formula::Cmp(Rel::Eq, a, b) => {
            // v1 = ⌊v2⌋ → v1_real = 0 ∧ v1_int = v2_int
            let (u, v) = match (a, b) {
                (Term::Var(u), Term::Floor(t)) | (Term::Floor(t), Term::Var(u)) => match t.as_ref()
                {
                    Term::Var(v) => (u, v),
                    _ => return Err(Error::Unsupported("non-primitive floor atom".into())),
                },
                _ => return Err(Error::Unsupported("non-primitive term atom".into())),
            };
            let su = sep.split(u);
            let sv = sep.split(v);
            Ok(Formula::and([
                eq0(su.real_lin()),
                eq0(LinTerm::var(su.int) - LinTerm::var(sv.int)),
            ]))
        }
        other => Err(Error::Unsupported(format!(
            "separation expects flattened atoms, found {other:?}"
        ))),
    }
}

/// Primitive form (iv): `v < 0` becomes `v_int < 0`.
fn separate_lt(l: &LinTerm, sep: &mut Separator) -> Result<Formula> {
    let vars: Vec<SortedVar> = l.vars().cloned().collect();
    if vars.len() == 1 && l.coeff(&vars[0]).is_one() && l.get_constant().is_zero() {
        let s = sep.split(&vars[0]);
        return Ok(lt0(LinTerm::var(s.int)));
    }
    Err(Error::Unsupported(format!("non-primitive inequality: {l} < 0")))
}

/// Primitive forms (i)–(iii).
fn separate_eq(l: &LinTerm, sep: &mut Separator) -> Result<Formula> {
    let terms: Vec<(SortedVar, Rational)> = l.iter().map(|(v, c)| (v.clone(), c.clone())).collect();
    let k = l.get_constant();

    // (i) v = 0 and (ii) v = 1   (stored as v − 1 = 0)
    if terms.len() == 1 && terms[0].1.is_one() {
        let s = sep.split(&terms[0].0);
        if k.is_zero() {
            return Ok(Formula::and([
                eq0(LinTerm::var(s.int.clone())),
                eq0(s.real_lin()),
            ]));
        }
        if k == &-rat(1) {
            return Ok(Formula::and([
                eq0(LinTerm::var(s.int.clone()) - LinTerm::constant(rat(1))),
                eq0(s.real_lin()),
            ]));
        }
    }

    // (iii) v1 + v2 = v3, also in the doubled shape 2·v1 = v3
    if k.is_zero() {
        let (plus, minus): (Vec<_>, Vec<_>) =
            terms.iter().partition(|(_, c)| c.is_positive());
        let summands: Option<(SortedVar, SortedVar)> = match plus.as_slice() {
            [(a, c)] if *c == rat(2) => Some((a.clone(), a.clone())),
            [(a, ca), (b, cb)] if ca.is_one() && cb.is_one() => Some((a.clone(), b.clone())),
            _ => None,
        };
        if let (Some((v1, v2)), [(v3, c3)]) = (summands, minus.as_slice()) {
            if *c3 == -rat(1) {
                return Ok(separate_sum(&v1, &v2, v3, sep));
            }
        }
    }
    Err(Error::Unsupported(format!("non-primitive equality: {l} = 0")))
}

/// The carry split for `v1 + v2 = v3`.
fn separate_sum(v1: &SortedVar, v2: &SortedVar, v3: &SortedVar, sep: &mut Separator) -> Formula {
    let s1 = sep.split(v1);
    let s2 = sep.split(v2);
    let s3 = sep.split(v3);
    let ints_carry = |carry: i64| {
        eq0(LinTerm::var(s1.int.clone()) + LinTerm::var(s2.int.clone())
            + LinTerm::constant(rat(carry))
            - LinTerm::var(s3.int.clone()))
    };
    let fracs = s1.real_lin() + s2.real_lin();
    let frac_eq = |carry: i64| {
        eq0(fracs.clone() - LinTerm::constant(rat(carry)) - s3.real_lin())
    };
    // s ≥ 1 and s < 1 over the fractional sum, in positive form
    let ge_one = Formula::or([
        lt0(LinTerm::constant(rat(1)) - fracs.clone()),
        eq0(fracs.clone() - LinTerm::constant(rat(1))),
    ]);
    let lt_one = lt0(fracs.clone() - LinTerm::constant(rat(1)));
    Formula::and([
        Formula::or([ge_one, Formula::and([ints_carry(0), frac_eq(0)])]),
        Formula::or([lt_one, Formula::and([ints_carry(1), frac_eq(1)])]),
    ])
}

/// True when every atom is already pure (all variables of one sort) and no
/// floor occurs: such bodies skip decomposition entirely.
pub fn is_separated(f: &Formula) -> bool {
    match f {
        Formula::Atom(a) => a.uniform_sort().is_some(),
        Formula::Cmp(..) => {
            if f.contains_floor() {
                return false;
            }
            let mut sorts = std::collections::BTreeSet::new();
            if let Formula::Cmp(_, s, t) = f {
                s.visit_vars(&mut |v| {
                    sorts.insert(v.sort);
                });
                t.visit_vars(&mut |v| {
                    sorts.insert(v.sort);
                });
            }
            sorts.len() <= 1
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().all(is_separated),
        Formula::Not(g) | Formula::Exists(_, g) => is_separated(g),
        Formula::ExistsRamsey(_, _, g) => is_separated(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{rat_frac, Assignment};

    #[test]
    fn small_coefficient_flattens_to_primitives() {
        // 3x < 1
        let x = SortedVar::real("x");
        let f = Formula::Cmp(
            Rel::Lt,
            Term::Mul(rat(3), Box::new(Term::var(x.clone()))),
            Term::Const(rat(1)),
        );
        let mut gen = VarGen::new();
        let flat = flatten_atoms(&f, &mut gen).unwrap();
        // every atom must now be primitive
        fn all_primitive(f: &Formula) -> bool {
            match f {
                Formula::Atom(Atom::Lt(l)) => l.num_terms() == 1,
                Formula::Atom(Atom::Eq(l)) => l.num_terms() <= 3,
                Formula::Cmp(Rel::Eq, _, _) => true,
                Formula::Atom(_) => true,
                Formula::And(fs) | Formula::Or(fs) => fs.iter().all(all_primitive),
                Formula::Exists(_, g) => all_primitive(g),
                _ => false,
            }
        }
        assert!(all_primitive(&flat));
        // and the flattened formula agrees with the original on samples
        for num in -6..6 {
            let env: Assignment = [(x.clone(), rat_frac(num, 4))].into_iter().collect();
            let expect = rat_frac(3 * num, 4) < rat(1);
            assert_eq!(eval_exists(&flat, &env), expect, "x = {num}/4");
        }
    }

    /// Brute-force the chain variables: they are all functionally determined,
    /// so evaluating the matrix under the forced values decides the formula.
    fn eval_exists(f: &Formula, env: &Assignment) -> bool {
        match f {
            Formula::Exists(vs, body) => {
                let mut env = env.clone();
                // chain definitions are in dependency order inside the And
                if let Formula::And(parts) = body.as_ref() {
                    for _ in 0..vs.len() + 1 {
                        for p in parts {
                            force_def(p, &mut env);
                        }
                    }
                    return body.evaluate(&env).unwrap_or(false);
                }
                body.evaluate(&env).unwrap_or(false)
            }
            _ => f.evaluate(env).unwrap(),
        }
    }

    fn force_def(f: &Formula, env: &mut Assignment) {
        match f {
            Formula::Atom(Atom::Eq(l)) => {
                // solve for the single unknown, if any
                let unknowns: Vec<SortedVar> =
                    l.vars().filter(|v| !env.contains_key(*v)).cloned().collect();
                if let [u] = unknowns.as_slice() {
                    let coeff = l.coeff(u);
                    let mut rest = l.clone();
                    rest.add_term(u.clone(), -coeff.clone());
                    if let Some(val) = rest.eval(env) {
                        env.insert(u.clone(), -val / coeff);
                    }
                }
            }
            Formula::Cmp(Rel::Eq, Term::Var(u), Term::Floor(t)) => {
                if let Term::Var(v) = t.as_ref() {
                    if let Some(val) = env.get(v).cloned() {
                        env.insert(u.clone(), val.floor());
                    }
                }
            }
            _ => {}
        }
    }

    #[test]
    fn separation_of_floor_atom() {
        // x = ⌊y⌋ → x_real = 0 ∧ x_int = y_int
        let x = SortedVar::real("x");
        let y = SortedVar::real("y");
        let f = Formula::Cmp(
            Rel::Eq,
            Term::var(x.clone()),
            Term::floor(Term::var(y.clone())),
        );
        let mut gen = VarGen::new();
        let (out, map) = separate(&f, &mut gen).unwrap();
        assert!(map.contains_key(&x) && map.contains_key(&y));
        assert!(purity(&out));
    }

    /// No atom may mix integer-part and real-part variables.
    fn purity(f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => a.uniform_sort().is_some(),
            Formula::Cmp(..) => false,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(purity),
            Formula::Not(g) | Formula::Exists(_, g) => purity(g),
            Formula::ExistsRamsey(_, _, g) => purity(g),
        }
    }

    #[test]
    fn sum_atom_gets_carry_split() {
        // the flattened shape of a + b = c
        let (a, b, c) = (
            SortedVar::real("a"),
            SortedVar::real("b"),
            SortedVar::real("c"),
        );
        let f = Formula::Atom(Atom::Eq(
            LinTerm::var(a.clone()) + LinTerm::var(b.clone())
                - LinTerm::var(c.clone()),
        ));
        let mut gen = VarGen::new();
        let (out, map) = separate(&f, &mut gen).unwrap();
        assert!(purity(&out));
        assert_eq!(map.len(), 3);
        // the separated formula agrees with a + b = c under the split
        // assignment v_int = ⌊v⌋, v_real = v − ⌊v⌋
        for (av, bv) in [(rat_frac(1, 2), rat_frac(1, 2)), (rat_frac(1, 4), rat_frac(1, 4))] {
            let cv = &av + &bv;
            let mut env = Assignment::new();
            for (orig, val) in [(&a, &av), (&b, &bv), (&c, &cv)] {
                let split = &map[orig];
                env.insert(split.int.clone(), val.floor());
                if let Some(r) = &split.real {
                    env.insert(r.clone(), val - val.floor());
                }
            }
            assert!(out.evaluate(&env).unwrap(), "a={av} b={bv}");
            // and disagrees when c is off by one
            let split = &map[&c];
            env.insert(split.int.clone(), cv.floor() + rat(1));
            assert!(!out.evaluate(&env).unwrap());
        }
    }

    #[test]
    fn linear_size_in_coefficient_bits() {
        // size of the expansion of k·x grows with log k, not k
        let x = SortedVar::real("x");
        let size_for = |k: i64| {
            let f = Formula::Cmp(
                Rel::Lt,
                Term::Mul(rat(k), Box::new(Term::var(x.clone()))),
                Term::Const(rat(1)),
            );
            let mut gen = VarGen::new();
            flatten_atoms(&f, &mut gen).unwrap().count_atoms()
        };
        let s256 = size_for(256);
        let s65536 = size_for(65536);
        // doubling the bit-length roughly doubles the chain
        assert!(s65536 < 3 * s256, "{s256} vs {s65536}");
    }
}
