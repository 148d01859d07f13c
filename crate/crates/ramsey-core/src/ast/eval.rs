//! Ground evaluation of quantifier-free, Ramsey-free formulas.
//!
//! This is the reference semantics the rest of the pipeline is tested
//! against, so it stays deliberately small and independent of the
//! transformation code.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{Atom, Formula, Rational, Sort, SortedVar};
use crate::error::{Error, Result};

/// Ground assignment of rationals to variables.
pub type Assignment = BTreeMap<SortedVar, Rational>;

impl Formula {
    /// Evaluates under `env`. The assignment must cover all free variables
    /// and assign integers to Int-sorted variables; quantifiers are rejected.
    pub fn evaluate(&self, env: &Assignment) -> Result<bool> {
        for v in self.free_vars() {
            match env.get(&v) {
                None => return Err(Error::UnboundVariable(v.name.to_string())),
                Some(val) if v.sort == Sort::Int && !val.is_integer() => {
                    return Err(Error::NonIntegerValue(v.name.to_string()))
                }
                _ => {}
            }
        }
        self.eval_inner(env)
    }

    fn eval_inner(&self, env: &Assignment) -> Result<bool> {
        match self {
            Formula::Atom(a) => eval_atom(a, env),
            Formula::Cmp(rel, s, t) => Ok(rel.holds(&s.eval(env)?, &t.eval(env)?)),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval_inner(env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval_inner(env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Not(f) => Ok(!f.eval_inner(env)?),
            Formula::Exists(..) | Formula::ExistsRamsey(..) => Err(Error::Unsupported(
                "evaluate is only defined for quantifier-free formulas".into(),
            )),
        }
    }
}

fn eval_atom(a: &Atom, env: &Assignment) -> Result<bool> {
    match a {
        Atom::Lt(t) => {
            let v = t
                .eval(env)
                .ok_or_else(|| Error::UnboundVariable(format!("{t}")))?;
            Ok(v.is_negative())
        }
        Atom::Eq(t) => {
            let v = t
                .eval(env)
                .ok_or_else(|| Error::UnboundVariable(format!("{t}")))?;
            Ok(v.is_zero())
        }
        Atom::DivCong(m) => m.holds(env),
        Atom::NotDivCong(m) => Ok(!m.holds(env)?),
    }
}
