//! Shared helpers for the solver-backed integration suites.

use std::time::Duration;

use ramsey_core::{SolverConfig, Verdict};

/// Resolves the solver, with a pointed message when none is installed.
pub fn solver() -> SolverConfig {
    SolverConfig::detect()
        .expect("no SMT solver: install z3, set RAMSEY_SOLVER, or run `npm install` in tools/z3-wasm")
        .with_timeout(Duration::from_secs(120))
}

#[allow(dead_code)]
pub fn assert_sat(v: &Verdict, what: &str) {
    assert!(v.is_sat(), "{what}: expected sat, got {}", v.word());
}

#[allow(dead_code)]
pub fn assert_unsat(v: &Verdict, what: &str) {
    assert!(v.is_unsat(), "{what}: expected unsat, got {}", v.word());
}
