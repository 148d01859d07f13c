//! Exact-arithmetic terms, atoms, and formulas.
//!
//! All coefficients are arbitrary-precision rationals; there is no floating
//! point anywhere in the pipeline. Values are immutable after construction
//! and safe to share between threads. The only mutable piece of state is
//! [`VarGen`], the fresh-name generator threaded through one pipeline run.

mod eval;
pub(crate) mod formula;
mod linterm;
mod term;

pub use eval::Assignment;
pub use formula::{Atom, Formula, ModAtom, Rel};
pub use linterm::LinTerm;
pub use term::Term;

use std::sync::Arc;

pub type Int = num_bigint::BigInt;
/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

/// Variable sorts of the two-sorted language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Real,
}

impl std::fmt::Display for Sort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Real => write!(f, "Real"),
        }
    }
}

/// A sorted variable. Cheap to clone; ordered by name, then sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SortedVar {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl SortedVar {
    pub fn new(name: impl Into<Arc<str>>, sort: Sort) -> Self {
        SortedVar { name: name.into(), sort }
    }

    pub fn int(name: impl Into<Arc<str>>) -> Self {
        Self::new(name, Sort::Int)
    }

    pub fn real(name: impl Into<Arc<str>>) -> Self {
        Self::new(name, Sort::Real)
    }
}

impl PartialOrd for SortedVar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SortedVar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.sort.cmp(&other.sort))
    }
}

impl std::fmt::Display for SortedVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Names starting with this prefix are reserved for generated variables;
/// the parser rejects them in user input.
pub const FRESH_PREFIX: &str = "%";

/// Fresh-name generator. A monotone counter guarantees that generated names
/// are unique within one pipeline invocation and, thanks to the reserved
/// prefix, never collide with user names.
#[derive(Debug, Default)]
pub struct VarGen {
    next: u64,
}

impl VarGen {
    pub fn new() -> Self {
        VarGen::default()
    }

    pub fn fresh(&mut self, stem: &str, sort: Sort) -> SortedVar {
        let n = self.next;
        self.next += 1;
        SortedVar::new(format!("{FRESH_PREFIX}{stem}{n}"), sort)
    }

    /// One fresh variable per entry of `vars`, with matching sorts.
    pub fn fresh_tuple(&mut self, stem: &str, vars: &[SortedVar]) -> Vec<SortedVar> {
        vars.iter().map(|v| self.fresh(stem, v.sort)).collect()
    }
}
