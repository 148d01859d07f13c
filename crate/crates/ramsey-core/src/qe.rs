//! Eliminating an existential block nested under a Ramsey quantifier.
//!
//! Instead of classical quantifier elimination (and its blow-up), the inner
//! block `∃w` is moved under the Ramsey binder: each tuple gains fresh
//! components `v1, v2` on the x-side and `w1, w2` on the y-side, `w` is
//! replaced by `v1 + w2`, and the original tuples are required distinct.

use std::collections::BTreeMap;

use crate::ast::formula::lt0;
use crate::ast::{Formula, LinTerm, SortedVar, Term, VarGen};
use crate::error::{Error, Result};

/// Pulls every inner existential block up into one prenex block, renaming
/// each hoisted variable fresh. The input must be negation-normal.
pub fn hoist_existentials(f: &Formula, gen: &mut VarGen) -> Result<(Vec<SortedVar>, Formula)> {
    let mut ws = Vec::new();
    let body = hoist(f, gen, &mut ws)?;
    Ok((ws, body))
}

fn hoist(f: &Formula, gen: &mut VarGen, ws: &mut Vec<SortedVar>) -> Result<Formula> {
    match f {
        Formula::Atom(_) | Formula::Cmp(..) => Ok(f.clone()),
        Formula::And(fs) => Ok(Formula::and(
            fs.iter().map(|g| hoist(g, gen, ws)).collect::<Result<Vec<_>>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::or(
            fs.iter().map(|g| hoist(g, gen, ws)).collect::<Result<Vec<_>>>()?,
        )),
        Formula::Not(g) if g.is_quantifier_free() => Ok(f.clone()),
        Formula::Not(_) => Err(Error::NotExistential),
        Formula::Exists(vs, g) => {
            let fresh: Vec<SortedVar> = vs.iter().map(|v| gen.fresh("w", v.sort)).collect();
            let map: BTreeMap<SortedVar, Term> = vs
                .iter()
                .cloned()
                .zip(fresh.iter().cloned().map(Term::Var))
                .collect();
            let renamed = g.substitute(&map, gen)?;
            ws.extend(fresh);
            hoist(&renamed, gen, ws)
        }
        Formula::ExistsRamsey(..) => Err(Error::Unsupported(
            "nested ramsey binder while hoisting existentials".into(),
        )),
    }
}

/// Result of [`lift_inner_existentials`]: the widened Ramsey binder and its
/// body. `lifted` is false when there was no inner block and the input was
/// returned unchanged.
pub struct Lifted {
    pub xs: Vec<SortedVar>,
    pub ys: Vec<SortedVar>,
    pub body: Formula,
    pub lifted: bool,
}

/// `∃ram x,y: ∃w: φ(x,y,w,z)`  →  `∃ram (x,v1,v2),(y,w1,w2): φ(x,y,v1+w2,z) ∧ x ≠ y`.
///
/// When the body has no inner existential block the formula is returned
/// unchanged: pairwise distinctness of the original tuple is the Ramsey
/// semantics itself and no `x ≠ y` conjunct is added.
pub fn lift_inner_existentials(
    xs: &[SortedVar],
    ys: &[SortedVar],
    body: &Formula,
    gen: &mut VarGen,
) -> Result<Lifted> {
    let (ws, inner) = hoist_existentials(body, gen)?;
    if ws.is_empty() {
        return Ok(Lifted {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            body: inner,
            lifted: false,
        });
    }
    let v1 = gen.fresh_tuple("v1_", &ws);
    let v2 = gen.fresh_tuple("v2_", &ws);
    let w1 = gen.fresh_tuple("w1_", &ws);
    let w2 = gen.fresh_tuple("w2_", &ws);
    let map: BTreeMap<SortedVar, Term> = ws
        .iter()
        .cloned()
        .zip(
            v1.iter()
                .zip(&w2)
                .map(|(a, b)| Term::Add(vec![Term::Var(a.clone()), Term::Var(b.clone())])),
        )
        .collect();
    let replaced = inner.substitute(&map, gen)?;
    let body = Formula::and([replaced, tuples_distinct(xs, ys)]);
    let mut xs2 = xs.to_vec();
    xs2.extend(v1);
    xs2.extend(v2);
    let mut ys2 = ys.to_vec();
    ys2.extend(w1);
    ys2.extend(w2);
    Ok(Lifted { xs: xs2, ys: ys2, body, lifted: true })
}

/// `x ≠ y` as a disjunction of strict inequalities over the components.
pub fn tuples_distinct(xs: &[SortedVar], ys: &[SortedVar]) -> Formula {
    Formula::or(xs.iter().zip(ys).flat_map(|(x, y)| {
        let d = LinTerm::var(x.clone()) - LinTerm::var(y.clone());
        [lt0(d.clone()), lt0(-d)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Rel, Sort};

    #[test]
    fn lift_introduces_four_fresh_copies_and_distinctness() {
        // ∃ram x,y: ∃w: x<w ∧ w<y
        let x = SortedVar::int("x");
        let y = SortedVar::int("y");
        let w = SortedVar::int("w");
        let body = Formula::exists(
            vec![w.clone()],
            Formula::and([
                Formula::Cmp(Rel::Lt, Term::var(x.clone()), Term::var(w.clone())),
                Formula::Cmp(Rel::Lt, Term::var(w.clone()), Term::var(y.clone())),
            ]),
        );
        let mut gen = VarGen::new();
        let lifted = lift_inner_existentials(&[x.clone()], &[y.clone()], &body, &mut gen).unwrap();
        assert!(lifted.lifted);
        assert_eq!(lifted.xs.len(), 3); // x, v1, v2
        assert_eq!(lifted.ys.len(), 3); // y, w1, w2
        for (a, b) in lifted.xs.iter().zip(&lifted.ys) {
            assert_eq!(a.sort, b.sort);
        }
        // the substituted body mentions v1 (x-side) and w2 (y-side) but not
        // the dead duplicates v2 and w1
        let free = lifted.body.free_vars();
        assert!(free.contains(&lifted.xs[1]));
        assert!(free.contains(&lifted.ys[2]));
        assert!(!free.contains(&lifted.xs[2]));
        assert!(!free.contains(&lifted.ys[1]));
    }

    #[test]
    fn no_inner_block_is_identity() {
        let x = SortedVar::int("x");
        let y = SortedVar::int("y");
        let body = Formula::Cmp(Rel::Lt, Term::var(x.clone()), Term::var(y.clone()));
        let mut gen = VarGen::new();
        let lifted = lift_inner_existentials(&[x], &[y], &body, &mut gen).unwrap();
        assert!(!lifted.lifted);
        assert_eq!(lifted.body, body);
        assert_eq!(lifted.xs.len(), 1);
    }

    #[test]
    fn lift_size_is_linear_in_block_and_tuple() {
        // |body'| ≤ |body| + O(|ws| + |xs|): atoms grow by exactly 2·|xs|
        let dims = 4;
        let xs: Vec<SortedVar> = (0..dims).map(|i| SortedVar::int(format!("x{i}"))).collect();
        let ys: Vec<SortedVar> = (0..dims).map(|i| SortedVar::int(format!("y{i}"))).collect();
        let w = SortedVar::int("w");
        let atoms: Vec<Formula> = xs
            .iter()
            .map(|x| Formula::Cmp(Rel::Lt, Term::var(x.clone()), Term::var(w.clone())))
            .collect();
        let body = Formula::exists(vec![w], Formula::and(atoms));
        let before = body.count_atoms();
        let mut gen = VarGen::new();
        let lifted = lift_inner_existentials(&xs, &ys, &body, &mut gen).unwrap();
        assert_eq!(lifted.body.count_atoms(), before + 2 * dims);
        assert_eq!(lifted.xs.len(), dims + 2);
    }

    #[test]
    fn hoisting_is_capture_free() {
        // ∃w: (x < w) ∧ ∃w: w < x  — the two w's stay independent
        let x = SortedVar::int("x");
        let w = SortedVar::int("w");
        let f = Formula::and([
            Formula::exists(
                vec![w.clone()],
                Formula::Cmp(Rel::Lt, Term::var(x.clone()), Term::var(w.clone())),
            ),
            Formula::exists(
                vec![w.clone()],
                Formula::Cmp(Rel::Lt, Term::var(w.clone()), Term::var(x.clone())),
            ),
        ]);
        let mut gen = VarGen::new();
        let (ws, body) = hoist_existentials(&f, &mut gen).unwrap();
        assert_eq!(ws.len(), 2);
        assert_ne!(ws[0], ws[1]);
        assert!(ws.iter().all(|v| v.sort == Sort::Int));
        assert!(body.is_quantifier_free());
    }
}
