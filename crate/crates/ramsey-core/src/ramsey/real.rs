//! Ramsey quantifier elimination over the reals.
//!
//! Cliques are sought in the form `a − (1/k)·d_c + k·d_inf`: the vector
//! `d_c` produces strict convergence from above or below, `d_inf` produces
//! divergence. Each inequality atom gets limit variables `ρ, σ` and type
//! codes `t_ρ ∈ {−2,−1,0,1,2}`, `t_σ ∈ {−1,0,1,2}` (±2 standing for ±ω),
//! realized as real variables over an explicit finite-set disjunction.

use std::collections::BTreeMap;

use crate::ast::formula::{eq0, lt0};
use crate::ast::{Formula, LinTerm, Rational, Sort, SortedVar, VarGen};
use crate::error::{Error, Result};
use crate::normalize::{guard, CanonKind, SelectorSkeleton};

const ALL_CODES: [i64; 5] = [-2, -1, 0, 1, 2];

/// Builds the Ramsey-free equivalent of `∃ram xs,ys: skeleton` over the
/// reals. Atom kinds are restricted to strict inequalities and equalities;
/// modulo atoms are illegal here.
pub fn eliminate_ramsey_real(
    skel: SelectorSkeleton,
    xs: &[SortedVar],
    ys: &[SortedVar],
    gen: &mut VarGen,
) -> Result<Formula> {
    let (fresh, parts) = eliminate_rows_real(&skel, xs, ys, gen)?;
    let mut bound = skel.selectors;
    bound.extend(fresh);
    Ok(Formula::exists(
        bound,
        Formula::and([skel.skeleton].into_iter().chain(parts)),
    ))
}

/// The profile rows alone: admissibility, `x_c ≠ 0`, and the guarded
/// constraint families, with their fresh variables. The selectors stay
/// free, so the mixed eliminator can share them across both branches.
pub(crate) fn eliminate_rows_real(
    skel: &SelectorSkeleton,
    xs: &[SortedVar],
    ys: &[SortedVar],
    gen: &mut VarGen,
) -> Result<(Vec<SortedVar>, Vec<Formula>)> {
    if skel.domain != Sort::Real {
        return Err(Error::Sort("real eliminator on non-real skeleton".into()));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| v.sort != Sort::Real) {
        return Err(Error::Sort(format!(
            "real eliminator met integer variable `{}`",
            v.name
        )));
    }
    if xs.is_empty() {
        return Ok((vec![], vec![Formula::ff()]));
    }

    let x = gen.fresh_tuple("x_", xs);
    let xc = gen.fresh_tuple("xc_", xs);
    let xinf = gen.fresh_tuple("xinf_", xs);
    let to_x = remap(xs, ys, &x);
    let to_xc = remap(xs, ys, &xc);
    let to_xinf = remap(xs, ys, &xinf);

    let mut fresh: Vec<SortedVar> = Vec::new();
    let mut parts: Vec<Formula> = Vec::new();

    for (q, atom) in skel.selectors.iter().zip(&skel.atoms) {
        match &atom.kind {
            CanonKind::DivCong(_) | CanonKind::NotDivCong(_) => {
                return Err(Error::ModAtomOverReal)
            }
            CanonKind::Eq => {
                // ε: u x_c = u x_inf = v x_c = v x_inf = 0 ∧ (u − v) x = w z + d
                let mut lhs = atom.rx.rename(&to_x) - atom.sy.rename(&to_x);
                lhs = lhs - atom.tz.clone();
                lhs.add_constant(-atom.h.clone());
                let eps = Formula::and([
                    eq0(atom.rx.rename(&to_xc)),
                    eq0(atom.rx.rename(&to_xinf)),
                    eq0(atom.sy.rename(&to_xc)),
                    eq0(atom.sy.rename(&to_xinf)),
                    eq0(lhs),
                ]);
                parts.push(guard(q, eps));
            }
            CanonKind::Lt => {
                let rho = gen.fresh("rho", Sort::Real);
                let sigma = gen.fresh("sig", Sort::Real);
                let t_rho = Codes::new(gen.fresh("tr", Sort::Real));
                let t_sigma = Codes::new(gen.fresh("ts", Sort::Real));
                fresh.extend([
                    rho.clone(),
                    sigma.clone(),
                    t_rho.var.clone(),
                    t_sigma.var.clone(),
                ]);

                parts.push(admissibility(
                    &rho,
                    &sigma,
                    &t_rho,
                    &t_sigma,
                    atom.tz.clone(),
                    atom.h.clone(),
                ));

                let r = Side {
                    codes: &t_rho,
                    limit: &rho,
                    at_x: atom.rx.rename(&to_x),
                    at_xc: atom.rx.rename(&to_xc),
                    at_xinf: atom.rx.rename(&to_xinf),
                };
                let s = Side {
                    codes: &t_sigma,
                    limit: &sigma,
                    at_x: atom.sy.rename(&to_x),
                    at_xc: atom.sy.rename(&to_xc),
                    at_xinf: atom.sy.rename(&to_xinf),
                };
                parts.push(guard(q, Formula::and([r.constraints(), s.constraints()])));
            }
        }
    }

    let xc_nonzero = Formula::or(xc.iter().flat_map(|v| {
        let l = LinTerm::var(v.clone());
        [lt0(l.clone()), lt0(-l)]
    }));
    parts.push(xc_nonzero);

    fresh.extend(x);
    fresh.extend(xc);
    fresh.extend(xinf);
    Ok((fresh, parts))
}

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

/// A type-code variable with its five equality atoms `t = −2 … t = 2`
/// built once and cloned into every membership disjunction.
struct Codes {
    var: SortedVar,
    eqs: [Formula; 5],
}

impl Codes {
    fn new(var: SortedVar) -> Self {
        let eqs = [-2i64, -1, 0, 1, 2].map(|c| Formula::var_eq(&var, c));
        Codes { var, eqs }
    }

    fn eq(&self, code: i64) -> Formula {
        self.eqs[(code + 2) as usize].clone()
    }

    /// `t ∈ S` as a finite disjunction.
    fn within(&self, codes: &[i64]) -> Formula {
        Formula::or(codes.iter().map(|c| self.eq(*c)))
    }

    /// `t ∈ S → body`, encoded positively via the complement of `S`.
    fn unless(&self, active: &[i64], body: Formula) -> Formula {
        let complement: Vec<Formula> = ALL_CODES
            .iter()
            .filter(|c| !active.contains(c))
            .map(|c| self.eq(*c))
            .collect();
        Formula::or(complement.into_iter().chain([body]))
    }
}

/// The λ/χ/δ/μ constraint family of one side (ρ or σ) of one atom.
struct Side<'a> {
    codes: &'a Codes,
    limit: &'a SortedVar,
    at_x: LinTerm,
    at_xc: LinTerm,
    at_xinf: LinTerm,
}

impl Side<'_> {
    fn constraints(&self) -> Formula {
        let mut at_limit = self.at_x.clone();
        at_limit.add_term(self.limit.clone(), -Rational::from_integer(1.into()));
        Formula::and([
            // λ: converging sides pin the limit on x and kill x_inf
            self.codes.unless(
                &[-1, 1],
                Formula::and([eq0(at_limit.clone()), eq0(self.at_xinf.clone())]),
            ),
            // χ: constant sides also kill x_c
            self.codes.unless(
                &[0],
                Formula::and([
                    eq0(at_limit),
                    eq0(self.at_xc.clone()),
                    eq0(self.at_xinf.clone()),
                ]),
            ),
            // δ: convergence direction on x_c
            self.codes.unless(&[-1], lt0(self.at_xc.clone())),
            self.codes.unless(&[1], lt0(-self.at_xc.clone())),
            // μ: divergence direction on x_inf
            self.codes.unless(&[-2], lt0(self.at_xinf.clone())),
            self.codes.unless(&[2], lt0(-self.at_xinf.clone())),
        ])
    }
}

/// Admissibility θ for one inequality atom: code ranges, `t_ρ = 2 → t_σ = 2`,
/// and the strict/non-strict limit comparisons against `σ + t^T z + h`.
fn admissibility(
    rho: &SortedVar,
    sigma: &SortedVar,
    t_rho: &Codes,
    t_sigma: &Codes,
    tz: LinTerm,
    h: Rational,
) -> Formula {
    let mut gap = -tz;
    gap.add_term(rho.clone(), Rational::from_integer(1.into()));
    gap.add_term(sigma.clone(), -Rational::from_integer(1.into()));
    gap.add_constant(-h);
    let strict = lt0(gap.clone());
    let weak = Formula::or([lt0(gap.clone()), eq0(gap)]);
    Formula::and([
        t_rho.within(&ALL_CODES),
        t_sigma.within(&[-1, 0, 1, 2]),
        // t_ρ = 2 → t_σ = 2
        t_rho.unless(&[2], t_sigma.eq(2)),
        // (t_ρ ∈ {−1,0} ∧ t_σ ∈ {0,1}) → ρ < σ + tz + h
        Formula::or([
            t_rho.within(&[-2, 1, 2]),
            t_sigma.within(&[-2, -1, 2]),
            strict.clone(),
        ]),
        // (t_ρ = −1 ∧ t_σ = −1) → ρ < σ + tz + h
        Formula::or([
            t_rho.within(&[-2, 0, 1, 2]),
            t_sigma.within(&[-2, 0, 1, 2]),
            strict,
        ]),
        // (t_ρ = 0 ∧ t_σ = −1) → ρ ≤ σ + tz + h
        Formula::or([
            t_rho.within(&[-2, -1, 1, 2]),
            t_sigma.within(&[-2, 0, 1, 2]),
            weak.clone(),
        ]),
        // t_ρ = 1 → ρ ≤ σ + tz + h
        t_rho.unless(&[1], weak),
    ])
}
