//! Ramsey quantifier elimination over the integers.
//!
//! Every inequality atom `r^T x < s^T y + t^T z + h` contributes a profile:
//! a bound `p_lo` on the values `r^T a_k` (or unbounded, flagged by a 0/1
//! variable) and a bound `p_hi` below the values `s^T a_k + t^T z + h`.
//! A clique compatible with an admissible profile can always be chosen as an
//! arithmetic progression `x0 + k·x`, so the output formula only has to find
//! `x0` and `x != 0` together with the profile.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::ast::formula::lt0;
use crate::ast::{rat, Formula, Int, LinTerm, ModAtom, Rational, Sort, SortedVar, VarGen};
use crate::error::{Error, Result};
use crate::normalize::{guard, CanonAtom, CanonKind, SelectorSkeleton};

/// One inequality row `rx < sy + tz + h` of the profile system.
struct Row {
    selector: SortedVar,
    rx: LinTerm,
    sy: LinTerm,
    tz: LinTerm,
    h: Rational,
}

/// Builds the Ramsey-free equivalent of `∃ram xs,ys: skeleton`. All atoms
/// must be purely integer; equality atoms are split into two strict
/// inequalities on the spot.
pub fn eliminate_ramsey_int(
    skel: SelectorSkeleton,
    xs: &[SortedVar],
    ys: &[SortedVar],
    gen: &mut VarGen,
) -> Result<Formula> {
    let (fresh, parts) = eliminate_rows_int(&skel, xs, ys, gen)?;
    let mut bound = skel.selectors;
    bound.extend(fresh);
    Ok(Formula::exists(
        bound,
        Formula::and([skel.skeleton].into_iter().chain(parts)),
    ))
}

/// The profile rows alone, leaving the selectors free (see the real-side
/// counterpart).
pub(crate) fn eliminate_rows_int(
    skel: &SelectorSkeleton,
    xs: &[SortedVar],
    ys: &[SortedVar],
    gen: &mut VarGen,
) -> Result<(Vec<SortedVar>, Vec<Formula>)> {
    if skel.domain != Sort::Int {
        return Err(Error::Sort("integer eliminator on non-integer skeleton".into()));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| v.sort != Sort::Int) {
        return Err(Error::Sort(format!(
            "integer eliminator met real variable `{}`",
            v.name
        )));
    }
    if xs.is_empty() {
        // no tuple components: no infinite sequence of distinct tuples
        return Ok((vec![], vec![Formula::ff()]));
    }

    let x0 = gen.fresh_tuple("x0_", xs);
    let x = gen.fresh_tuple("x_", xs);
    let to_x0 = remap(xs, ys, &x0);
    let to_x = remap(xs, ys, &x);

    let mut rows: Vec<Row> = Vec::new();
    let mut mod_guards: Vec<Formula> = Vec::new();
    for (q, atom) in skel.selectors.iter().zip(&skel.atoms) {
        match &atom.kind {
            CanonKind::Lt => rows.push(Row {
                selector: q.clone(),
                rx: atom.rx.clone(),
                sy: atom.sy.clone(),
                tz: atom.tz.clone(),
                h: atom.h.clone(),
            }),
            // a = b over Z splits into a < b + 1 and b < a + 1, both under
            // the same selector
            CanonKind::Eq => {
                rows.push(Row {
                    selector: q.clone(),
                    rx: atom.rx.clone(),
                    sy: atom.sy.clone(),
                    tz: atom.tz.clone(),
                    h: atom.h.clone() + rat(1),
                });
                rows.push(Row {
                    selector: q.clone(),
                    rx: -atom.rx.clone(),
                    sy: -atom.sy.clone(),
                    tz: -atom.tz.clone(),
                    h: -atom.h.clone() + rat(1),
                });
            }
            CanonKind::DivCong(e) | CanonKind::NotDivCong(e) => {
                let negated = matches!(atom.kind, CanonKind::NotDivCong(_));
                mod_guards.push(guard(
                    q,
                    mod_row(atom, e, negated, &to_x0, &to_x)?,
                ));
            }
        }
    }

    let mut theta: Vec<Formula> = Vec::new();
    let mut row_guards: Vec<Formula> = Vec::new();
    let mut profile_vars: Vec<SortedVar> = Vec::new();
    for row in &rows {
        let p_lo = gen.fresh("p", Sort::Int);
        let p_hi = gen.fresh("p", Sort::Int);
        let w_lo = gen.fresh("om", Sort::Int);
        let w_hi = gen.fresh("om", Sort::Int);
        profile_vars.extend([p_lo.clone(), p_hi.clone(), w_lo.clone(), w_hi.clone()]);
        for w in [&w_lo, &w_hi] {
            theta.push(Formula::or([Formula::var_eq(w, 0), Formula::var_eq(w, 1)]));
        }
        // admissibility: p_lo < ω ∧ p_lo < p_hi, or p_hi = ω
        theta.push(Formula::or([
            Formula::and([
                Formula::var_eq(&w_lo, 0),
                Formula::var_eq(&w_hi, 0),
                lt0(LinTerm::var(p_lo.clone()) - LinTerm::var(p_hi.clone())),
            ]),
            Formula::var_eq(&w_hi, 1),
        ]));

        let rx0 = row.rx.rename(&to_x0);
        let rxp = row.rx.rename(&to_x);
        let sx0 = row.sy.rename(&to_x0);
        let sxp = row.sy.rename(&to_x);
        // p_lo < ω → r x0 ≤ p_lo ∧ r x ≤ 0
        let lo = Formula::or([
            Formula::var_eq(&w_lo, 1),
            Formula::and([
                le0(rx0 - LinTerm::var(p_lo.clone())),
                le0(rxp.clone()),
            ]),
        ]);
        // p_hi < ω → p_hi ≤ s x0 + t z + h ∧ s x ≥ 0
        let hi = Formula::or([
            Formula::var_eq(&w_hi, 1),
            Formula::and([
                le0(LinTerm::var(p_hi.clone())
                    - sx0
                    - row.tz.clone()
                    - LinTerm::constant(row.h.clone())),
                le0(-sxp.clone()),
            ]),
        ]);
        // p_hi = ω → s x > 0
        let unbounded = Formula::or([Formula::var_eq(&w_hi, 0), lt0(-sxp)]);
        row_guards.push(guard(
            &row.selector,
            Formula::and([lo, hi, unbounded]),
        ));
    }

    let x_nonzero = Formula::or(x.iter().flat_map(|xi| {
        let v = LinTerm::var(xi.clone());
        [lt0(v.clone()), lt0(-v)]
    }));

    let mut fresh = profile_vars;
    fresh.extend(x0);
    fresh.extend(x);
    let parts: Vec<Formula> = theta
        .into_iter()
        .chain([x_nonzero])
        .chain(row_guards)
        .chain(mod_guards)
        .collect();
    Ok((fresh, parts))
}

/// `t ≤ 0` over the integers, tightened to `t − 1 < 0`.
fn le0(t: LinTerm) -> Formula {
    lt0(t - LinTerm::constant(rat(1)))
}

/// Position-wise renaming of both tuple sides onto a shared fresh vector.
fn remap(
    xs: &[SortedVar],
    ys: &[SortedVar],
    target: &[SortedVar],
) -> BTreeMap<SortedVar, SortedVar> {
    xs.iter()
        .chain(ys)
        .cloned()
        .zip(target.iter().chain(target).cloned())
        .collect()
}

/// `u x0 ≈_e v (x0 + x) + w z + d  ∧  u x ≡_e 0  ∧  v x ≡_e 0`.
fn mod_row(
    atom: &CanonAtom,
    e: &Int,
    negated: bool,
    to_x0: &BTreeMap<SortedVar, SortedVar>,
    to_x: &BTreeMap<SortedVar, SortedVar>,
) -> Result<Formula> {
    let u_x0 = atom.rx.rename(to_x0);
    let u_x = atom.rx.rename(to_x);
    let v_x0 = atom.sy.rename(to_x0);
    let v_x = atom.sy.rename(to_x);
    let main_term = u_x0 - v_x0 - v_x.clone() - atom.tz.clone();
    let residue = atom.h.clone();
    if !residue.is_integer() {
        return Err(Error::Sort("modulo atom with fractional offset".into()));
    }
    let main = ModAtom::new(main_term, e.clone(), residue.to_integer())?;
    let main = Formula::Atom(if negated {
        crate::ast::Atom::NotDivCong(main)
    } else {
        crate::ast::Atom::DivCong(main)
    });
    let u_cong = ModAtom::new(u_x, e.clone(), Int::zero())?;
    let v_cong = ModAtom::new(v_x, e.clone(), Int::zero())?;
    Ok(Formula::and([
        main,
        Formula::Atom(crate::ast::Atom::DivCong(u_cong)),
        Formula::Atom(crate::ast::Atom::DivCong(v_cong)),
    ]))
}
