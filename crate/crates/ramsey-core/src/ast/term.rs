//! Syntactic terms as they appear in input, before linearization.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{LinTerm, Rational, Sort, SortedVar};
use crate::error::{Error, Result};

/// Term tree of the input language: variables, rational constants, sums,
/// rational-scalar multiples, and floor. Floor nodes may appear only in
/// mixed-domain input (and in mixed output, where the parameter split is
/// undone with `z ↦ ⌊z⌋`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(SortedVar),
    Const(Rational),
    Add(Vec<Term>),
    Mul(Rational, Box<Term>),
    Floor(Box<Term>),
}

impl Term {
    pub fn var(v: SortedVar) -> Term {
        Term::Var(v)
    }

    pub fn floor(t: Term) -> Term {
        Term::Floor(Box::new(t))
    }

    pub fn neg(t: Term) -> Term {
        Term::Mul(-Rational::from_integer(1.into()), Box::new(t))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Add(vec![a, Term::neg(b)])
    }

    /// The sort of the value this term denotes: `Int` exactly when the term
    /// is guaranteed integer-valued (all variables Int, all scalars integral,
    /// or an outermost floor).
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Const(c) => {
                if c.is_integer() {
                    Sort::Int
                } else {
                    Sort::Real
                }
            }
            Term::Add(ts) => {
                if ts.iter().all(|t| t.sort() == Sort::Int) {
                    Sort::Int
                } else {
                    Sort::Real
                }
            }
            Term::Mul(c, t) => {
                if c.is_integer() && t.sort() == Sort::Int {
                    Sort::Int
                } else {
                    Sort::Real
                }
            }
            Term::Floor(_) => Sort::Int,
        }
    }

    pub fn has_floor(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::Add(ts) => ts.iter().any(Term::has_floor),
            Term::Mul(_, t) => t.has_floor(),
            Term::Floor(_) => true,
        }
    }

    pub fn visit_vars(&self, f: &mut dyn FnMut(&SortedVar)) {
        match self {
            Term::Var(v) => f(v),
            Term::Const(_) => {}
            Term::Add(ts) => ts.iter().for_each(|t| t.visit_vars(f)),
            Term::Mul(_, t) | Term::Floor(t) => t.visit_vars(f),
        }
    }

    /// Flattens to a linear term. Fails on floor nodes.
    pub fn to_linterm(&self) -> Result<LinTerm> {
        match self {
            Term::Var(v) => Ok(LinTerm::var(v.clone())),
            Term::Const(c) => Ok(LinTerm::constant(c.clone())),
            Term::Add(ts) => {
                let mut acc = LinTerm::zero();
                for t in ts {
                    acc = acc + t.to_linterm()?;
                }
                Ok(acc)
            }
            Term::Mul(c, t) => Ok(t.to_linterm()?.scale(c)),
            Term::Floor(_) => Err(Error::FloorNotAllowed),
        }
    }

    pub fn from_linterm(l: &LinTerm) -> Term {
        let mut parts: Vec<Term> = Vec::new();
        for (v, c) in l.iter() {
            if c == &Rational::from_integer(1.into()) {
                parts.push(Term::Var(v.clone()));
            } else {
                parts.push(Term::Mul(c.clone(), Box::new(Term::Var(v.clone()))));
            }
        }
        if !l.get_constant().is_zero() || parts.is_empty() {
            parts.push(Term::Const(l.get_constant().clone()));
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Add(parts)
        }
    }

    pub fn subst(&self, map: &BTreeMap<SortedVar, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Add(ts) => Term::Add(ts.iter().map(|t| t.subst(map)).collect()),
            Term::Mul(c, t) => Term::Mul(c.clone(), Box::new(t.subst(map))),
            Term::Floor(t) => Term::Floor(Box::new(t.subst(map))),
        }
    }

    /// Exact evaluation; floor computed on rationals.
    pub fn eval(&self, env: &BTreeMap<SortedVar, Rational>) -> Result<Rational> {
        match self {
            Term::Var(v) => env
                .get(v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(v.name.to_string())),
            Term::Const(c) => Ok(c.clone()),
            Term::Add(ts) => {
                let mut acc = Rational::zero();
                for t in ts {
                    acc += t.eval(env)?;
                }
                Ok(acc)
            }
            Term::Mul(c, t) => Ok(c * t.eval(env)?),
            Term::Floor(t) => Ok(t.eval(env)?.floor()),
        }
    }
}
