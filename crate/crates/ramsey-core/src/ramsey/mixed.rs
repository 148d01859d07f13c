//! Ramsey quantifier elimination over mixed integer/real tuples.
//!
//! The body must already be separated: every atom purely integer or purely
//! real. Real atoms get real 0/1 selectors `p`, integer atoms integer ones
//! `q`; both sub-Ramsey eliminations consume those selectors directly. A
//! flag `r` distinguishes whether the clique may keep its real or its
//! integer components constant.

use std::collections::BTreeMap;

use crate::ast::{Formula, Sort, SortedVar, Term, VarGen};
use crate::error::{Error, Result};
use crate::normalize::{self, guard, CanonAtom, SelectorSkeleton};
use crate::ramsey::{int::eliminate_rows_int, real::eliminate_rows_real};

/// Eliminates `∃ram xs,ys: body` where `body` is a separated, quantifier-free
/// positive combination of pure atoms.
pub fn eliminate_ramsey_mixed(
    xs: &[SortedVar],
    ys: &[SortedVar],
    body: &Formula,
    gen: &mut VarGen,
) -> Result<Formula> {
    let body = normalize::nnf_positive_mixed(body)?;

    let (xs_int, xs_real): (Vec<_>, Vec<_>) = xs.iter().cloned().partition(|v| v.sort == Sort::Int);
    let (ys_int, ys_real): (Vec<_>, Vec<_>) = ys.iter().cloned().partition(|v| v.sort == Sort::Int);

    // Selector abstraction over the full body: p's are real, q's integer.
    let mut selectors: Vec<SortedVar> = Vec::new();
    let mut atoms: Vec<(SortedVar, Formula, Sort)> = Vec::new();
    let skeleton = abstract_mixed(&body, gen, &mut selectors, &mut atoms)?;
    let ranges: Vec<Formula> = selectors
        .iter()
        .map(|q| Formula::or([Formula::var_eq(q, 0), Formula::var_eq(q, 1)]))
        .collect();

    let r = gen.fresh("rflag", Sort::Int);
    let real_part = branch(Sort::Real, &xs_real, &ys_real, &atoms, &r, 0, gen)?;
    let int_part = branch(Sort::Int, &xs_int, &ys_int, &atoms, &r, 1, gen)?;

    let mut bound = selectors;
    bound.push(r.clone());
    Ok(Formula::exists(
        bound,
        Formula::and([skeleton].into_iter().chain(ranges).chain([
            Formula::or([Formula::var_eq(&r, 0), Formula::var_eq(&r, 1)]),
            real_part,
            int_part,
        ])),
    ))
}

/// One conjunct of the flag split:
/// `(∃ram xs,ys: ⋀(p_i = 1 → α_i)) ∨ (r = flag ∧ ∃x: ⋀(p_i = 1 → α_i(x, x)))`.
///
/// The first disjunct reuses the outer selectors: the sub-elimination's
/// skeleton is the atom table guarded by them, nothing is re-abstracted.
fn branch(
    sort: Sort,
    xs: &[SortedVar],
    ys: &[SortedVar],
    atoms: &[(SortedVar, Formula, Sort)],
    r: &SortedVar,
    flag: i64,
    gen: &mut VarGen,
) -> Result<Formula> {
    let side: Vec<&(SortedVar, Formula, Sort)> =
        atoms.iter().filter(|(_, _, s)| *s == sort).collect();

    let ram = if xs.is_empty() {
        Formula::ff()
    } else {
        let part = normalize::Partition::new(xs, ys);
        let canon: Vec<CanonAtom> = side
            .iter()
            .map(|(_, a, _)| match a {
                Formula::Atom(atom) => normalize::canonize_atom(atom, &part, sort),
                _ => Err(Error::Unsupported("mixed branch expects core atoms".into())),
            })
            .collect::<Result<_>>()?;
        let skel = SelectorSkeleton {
            selectors: side.iter().map(|(q, _, _)| q.clone()).collect(),
            // structure and selector ranges live outside, shared with the
            // singleton branch
            skeleton: Formula::tt(),
            atoms: canon,
            domain: sort,
        };
        let (fresh, parts) = match sort {
            Sort::Int => eliminate_rows_int(&skel, xs, ys, gen)?,
            Sort::Real => eliminate_rows_real(&skel, xs, ys, gen)?,
        };
        Formula::exists(fresh, Formula::and(parts))
    };

    // the constant-component case: substitute the y-side by the x-side and
    // bind fresh singles
    let guarded = Formula::and(
        side.iter()
            .map(|(q, a, _)| guard(q, (*a).clone()))
            .collect::<Vec<_>>(),
    );
    let singles = gen.fresh_tuple("s", xs);
    let map: BTreeMap<SortedVar, Term> = xs
        .iter()
        .chain(ys)
        .cloned()
        .zip(singles.iter().chain(&singles).cloned().map(Term::Var))
        .collect();
    let diag = guarded.substitute(&map, gen)?;
    let single = Formula::and([Formula::var_eq(r, flag), Formula::exists(singles, diag)]);
    Ok(Formula::or([ram, single]))
}

/// Replaces each pure atom by a fresh selector of the atom's own sort.
fn abstract_mixed(
    f: &Formula,
    gen: &mut VarGen,
    selectors: &mut Vec<SortedVar>,
    atoms: &mut Vec<(SortedVar, Formula, Sort)>,
) -> Result<Formula> {
    match f {
        Formula::Atom(a) => {
            let sort = match a.uniform_sort() {
                Some(Some(s)) => s,
                // constant atoms land in the real component; both branches
                // carry them verbatim
                Some(None) => Sort::Real,
                None => {
                    return Err(Error::Sort(
                        "mixed eliminator met an unseparated atom".into(),
                    ))
                }
            };
            let q = gen.fresh(if sort == Sort::Real { "p" } else { "q" }, sort);
            selectors.push(q.clone());
            atoms.push((q.clone(), f.clone(), sort));
            Ok(Formula::var_eq(&q, 1))
        }
        Formula::And(fs) => Ok(Formula::And(
            fs.iter()
                .map(|g| abstract_mixed(g, gen, selectors, atoms))
                .collect::<Result<_>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::Or(
            fs.iter()
                .map(|g| abstract_mixed(g, gen, selectors, atoms))
                .collect::<Result<_>>()?,
        )),
        other => Err(Error::Unsupported(format!(
            "mixed eliminator expects a positive quantifier-free body, found {other:?}"
        ))),
    }
}
