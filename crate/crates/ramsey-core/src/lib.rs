//! Ramsey quantifier elimination for linear integer, real, and mixed
//! arithmetic.
//!
//! The library turns `∃ram x,y: φ(x,y,z)` — "the relation φ has an infinite
//! directed clique" — into an ordinary existential formula of linear size,
//! in polynomial time, for quantifier-free and existential bodies over
//! LIA, LRA, and LIRA. On top of the eliminators sit decision procedures
//! for monadic decomposability and well-quasi-orderings, liveness/termination
//! condition generation, an extended SMT-LIB2 front end (`exists-ramsey`
//! binder), an external-solver backend, and the benchmark harness.

pub mod apps;
pub mod ast;
pub mod bench;
pub mod decompose;
pub mod error;
pub mod normalize;
pub mod parse;
pub mod print;
pub mod qe;
pub mod ramsey;
pub mod script;
pub mod solver;

pub use ast::{Assignment, Atom, Formula, LinTerm, ModAtom, Rational, Rel, Sort, SortedVar, Term,
              VarGen};
pub use error::{Error, ParseError, Result, SolverError};
pub use ramsey::{eliminate_script, Domain, Eliminated};
pub use script::Script;
pub use solver::{check_sat, find_k_clique, SolverConfig, Verdict};
