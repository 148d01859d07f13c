//! Linear combinations of variables with exact rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Int, Rational, SortedVar};

/// `Σ coeff_i · var_i + constant`. Zero coefficients are never stored, so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinTerm {
    coeffs: BTreeMap<SortedVar, Rational>,
    constant: Rational,
}

impl LinTerm {
    pub fn zero() -> Self {
        LinTerm::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinTerm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(v: SortedVar) -> Self {
        Self::scaled_var(v, Rational::one())
    }

    pub fn scaled_var(v: SortedVar, coeff: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(v, coeff);
        }
        LinTerm { coeffs, constant: Rational::zero() }
    }

    pub fn get_constant(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, v: &SortedVar) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SortedVar, &Rational)> {
        self.coeffs.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &SortedVar> {
        self.coeffs.keys()
    }

    pub fn var_set(&self) -> BTreeSet<SortedVar> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add_term(&mut self, v: SortedVar, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(v) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_constant(&mut self, c: Rational) {
        self.constant += c;
    }

    pub fn scale(&self, k: &Rational) -> LinTerm {
        if k.is_zero() {
            return LinTerm::zero();
        }
        LinTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Keeps only the coefficients whose variable satisfies `keep`; drops the
    /// constant.
    pub fn restrict<F: Fn(&SortedVar) -> bool>(&self, keep: F) -> LinTerm {
        LinTerm {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(v, _)| keep(v))
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
            constant: Rational::zero(),
        }
    }

    /// Renames variables according to `map`; variables not in the map stay.
    pub fn rename(&self, map: &BTreeMap<SortedVar, SortedVar>) -> LinTerm {
        let mut out = LinTerm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            let w = map.get(v).unwrap_or(v).clone();
            out.add_term(w, c.clone());
        }
        out
    }

    /// Substitutes each variable in the domain of `map` by a linear term.
    pub fn subst(&self, map: &BTreeMap<SortedVar, LinTerm>) -> LinTerm {
        let mut out = LinTerm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match map.get(v) {
                Some(t) => out = out + t.scale(c),
                None => out.add_term(v.clone(), c.clone()),
            }
        }
        out
    }

    /// True if all coefficients and the constant are integers.
    pub fn is_integral(&self) -> bool {
        self.constant.is_integer() && self.coeffs.values().all(|c| c.is_integer())
    }

    /// Least common multiple of all denominators; 1 when already integral.
    pub fn denominator_lcm(&self) -> Int {
        let mut l: Int = self.constant.denom().clone();
        for c in self.coeffs.values() {
            l = l.lcm(c.denom());
        }
        l.abs()
    }

    pub fn eval(&self, env: &BTreeMap<SortedVar, Rational>) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * env.get(v)?;
        }
        Some(acc)
    }
}

impl Add for LinTerm {
    type Output = LinTerm;
    fn add(mut self, rhs: LinTerm) -> LinTerm {
        for (v, c) in rhs.coeffs {
            self.add_term(v, c);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for LinTerm {
    type Output = LinTerm;
    fn sub(self, rhs: LinTerm) -> LinTerm {
        self + (-rhs)
    }
}

impl Neg for LinTerm {
    type Output = LinTerm;
    fn neg(self) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.into_iter().map(|(v, c)| (v, -c)).collect(),
            constant: -self.constant,
        }
    }
}

impl Mul<Rational> for LinTerm {
    type Output = LinTerm;
    fn mul(self, k: Rational) -> LinTerm {
        self.scale(&k)
    }
}

impl std::fmt::Display for LinTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                if c.is_one() {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{c}*{v}")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*{v}", -c.clone())?;
            } else {
                write!(f, " + {c}*{v}")?;
            }
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if !self.constant.is_zero() {
            if self.constant.is_negative() {
                write!(f, " - {}", -self.constant.clone())?;
            } else {
                write!(f, " + {}", self.constant)?;
            }
        }
        Ok(())
    }
}
