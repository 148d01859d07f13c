//! End-to-end elimination checks against the solver, at small scale.

mod common;

use common::{assert_sat, assert_unsat, solver};
use ramsey_core::ast::{rat, rat_frac};
use ramsey_core::{
    check_sat, eliminate_script, parse, print, Domain, Rational, Script, SortedVar, VarGen,
};

fn parse_str(text: &str) -> Script {
    parse::parse(text.as_bytes(), "test").expect("parse")
}

fn eliminate_and_check(text: &str, domain: Option<Domain>) -> ramsey_core::Verdict {
    let script = parse_str(text);
    let result = eliminate_script(&script, domain).expect("eliminate");
    assert!(
        !result.script.goal.contains_ramsey(),
        "output must be ramsey-free"
    );
    check_sat(&result.script.goal, &solver()).expect("solver")
}

#[test]
fn ascending_chain_over_int_is_sat() {
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (< x y)))",
        None,
    );
    assert_sat(&v, "∃ram x,y: x<y over Z");
}

#[test]
fn contradictory_atoms_are_unsat() {
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (and (< x y) (< y x))))",
        None,
    );
    assert_unsat(&v, "∃ram x,y: x<y ∧ y<x over Z");
}

#[test]
fn doubling_chain_over_int_is_sat() {
    // y ≥ 2x has cliques even though none is definable by a linear formula
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (>= y (* 2 x))))",
        None,
    );
    assert_sat(&v, "∃ram x,y: y ≥ 2x over Z");
}

#[test]
fn dense_interval_over_real_is_sat() {
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Real)) ((y Real)) (and (< x y) (> x 99) (< y 100))))",
        None,
    );
    assert_sat(&v, "infinitely many reals between 99 and 100");
}

#[test]
fn same_interval_over_int_is_unsat() {
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (and (< x y) (> x 99) (< y 100))))",
        None,
    );
    assert_unsat(&v, "no integers strictly between 99 and 100 ascending forever");
}

#[test]
fn inner_existential_block_is_lifted() {
    // ∃ram x,y: ∃z: x ≪ y ∧ x = z — satisfiable over both domains
    for sort in ["Int", "Real"] {
        let text = format!(
            "(assert (exists-ramsey ((x {sort})) ((y {sort})) \
             (exists ((z {sort})) (and (< x y) (= x z)))))"
        );
        let v = eliminate_and_check(&text, None);
        assert_sat(&v, &format!("eq_ex over {sort}"));
    }
}

#[test]
fn free_parameter_equality_is_unsat() {
    for sort in ["Int", "Real"] {
        let text = format!(
            "(declare-const z {sort})\
             (assert (exists-ramsey ((x {sort})) ((y {sort})) (and (< x y) (= x z))))"
        );
        let v = eliminate_and_check(&text, None);
        assert_unsat(&v, &format!("eq_free over {sort}"));
    }
}

#[test]
fn modulo_constraints_restrict_cliques() {
    // ascending even chain exists
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) \
          (and (< x y) (= (mod x 2) 0) (= (mod y 2) 0))))",
        None,
    );
    assert_sat(&v, "even ascending chain");
    // x even and y odd cannot both hold along one clique
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) \
          (and (< x y) (= (mod x 2) 0) (= (mod y 2) 1))))",
        None,
    );
    assert_unsat(&v, "parity clash along a clique");
}

#[test]
fn ramsey_under_outer_existential() {
    // liveness-style shape: ∃z: ∃ram x,y: x < y ∧ x > z
    let v = eliminate_and_check(
        "(assert (exists ((z Int)) (exists-ramsey ((x Int)) ((y Int)) \
          (and (< x y) (> x z)))))",
        None,
    );
    assert_sat(&v, "ramsey under an outer exists");
}

#[test]
fn forced_mixed_domain_agrees_with_pure() {
    let text = "(assert (exists-ramsey ((x Int)) ((y Int)) (< x y)))";
    let pure = eliminate_and_check(text, Some(Domain::Int));
    let mixed = eliminate_and_check(text, Some(Domain::Mixed));
    assert_eq!(pure.word(), mixed.word());
}

#[test]
fn mixed_worked_example_matches_closed_form() {
    // φ(x,y,z) with x,y,z ∈ R²; eliminating ∃ram x,y leaves ψ(z) whose
    // verdicts split on whether z1 is an integer: z2 = ⌊z1⌋ for fractional
    // z1, z2 = z1 − 1 for integer z1. (The overlapping case "z1 integer and
    // z2 = z1" admits no infinite clique: the floors are eventually the
    // constant z1, forcing the tuples to repeat.)
    let script = parse_str(WORKED_EXAMPLE);
    let result = eliminate_script(&script, None).expect("eliminate");
    assert!(!result.script.goal.contains_ramsey());
    let cfg = solver();
    let z1 = SortedVar::real("z1");
    let z2 = SortedVar::real("z2");
    let samples: Vec<(Rational, Rational)> = vec![
        (rat_frac(5, 2), rat(2)),         // z2 = ⌊z1⌋: true
        (rat_frac(5, 2), rat_frac(5, 2)), // false
        (rat(3), rat(2)),                 // z1 integer, z2 = z1 − 1: true
        (rat(3), rat(3)),                 // the overlap case: false
        (rat(3), rat(1)),                 // false
        (rat_frac(-7, 2), rat(-4)),       // ⌊−7/2⌋ = −4: true
        (rat_frac(-7, 2), rat(-3)),       // false
    ];
    for (a, b) in samples {
        let expected = closed_form(&a, &b);
        let mut gen = VarGen::new();
        let map = [
            (z1.clone(), ramsey_core::Term::Const(a.clone())),
            (z2.clone(), ramsey_core::Term::Const(b.clone())),
        ]
        .into_iter()
        .collect();
        let grounded = result.script.goal.substitute(&map, &mut gen).unwrap();
        let v = check_sat(&grounded, &cfg).expect("solver");
        assert_eq!(
            v.is_sat(),
            expected,
            "ψ({a}, {b}) disagreed with the closed form"
        );
    }
}

pub const WORKED_EXAMPLE: &str = "\
(declare-const z1 Real)
(declare-const z2 Real)
(assert (exists-ramsey ((x1 Real) (x2 Real)) ((y1 Real) (y2 Real))
  (and (<= (+ x1 (* 0.5 (- z1 x1))) y1) (<= y1 z1)
       (<= (+ x2 (* 0.5 (- z2 x2))) y2) (<= y2 z2)
       (= y2 (to_int y1)))))
(check-sat)
";

/// Ground truth for the worked example, split by integrality of z1.
pub fn closed_form(z1: &Rational, z2: &Rational) -> bool {
    if *z1 == z1.floor() {
        *z2 == z1 - Rational::from_integer(1.into())
    } else {
        *z2 == z1.floor()
    }
}

#[test]
fn printed_output_reparses_and_roundtrips() {
    let script = parse_str(
        "(declare-const t Int)\
         (assert (exists-ramsey ((x Int)) ((y Int)) (and (<= (* 2 y) x) (>= x t))))",
    );
    let result = eliminate_script(&script, None).expect("eliminate");
    let printed = print::print_script(&result.script).expect("print");
    let reparsed = parse::parse(printed.as_bytes(), "roundtrip").expect("reparse");
    let printed2 = print::print_script(&reparsed).expect("print twice");
    assert_eq!(printed, printed2, "print ∘ parse must be idempotent");
}

#[test]
fn output_declares_only_original_parameters() {
    let script = parse_str(
        "(declare-const z Real)\
         (assert (exists-ramsey ((x Real)) ((y Real)) (and (< x y) (< y z))))",
    );
    let result = eliminate_script(&script, None).expect("eliminate");
    let free = result.script.goal.free_vars();
    assert!(free.iter().all(|v| &*v.name == "z"), "only z may stay free: {free:?}");
}

#[test]
fn pure_param_atoms_flow_through() {
    // an atom with empty x-part (pure parameter constraint) degrades
    // gracefully: sat iff the parameter constraint is satisfiable
    let sat = eliminate_and_check(
        "(declare-const z Int)\
         (assert (exists-ramsey ((x Int)) ((y Int)) (and (< x y) (> z 5))))",
        None,
    );
    assert_sat(&sat, "pure-parameter atom, satisfiable side");
    let unsat = eliminate_and_check(
        "(declare-const z Int)\
         (assert (exists-ramsey ((x Int)) ((y Int)) (and (< x y) (> z 5) (< z 0))))",
        None,
    );
    assert_unsat(&unsat, "pure-parameter contradiction");
}

#[test]
fn bounded_above_int_chain_is_unsat() {
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (and (< x y) (< y 10))))",
        None,
    );
    assert_unsat(&v, "ascending integer chain below 10");
}

#[test]
fn int_equality_atom_splits_locally() {
    // x = y along a clique of distinct values is impossible …
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (= x y)))",
        None,
    );
    assert_unsat(&v, "x = y forces equal components");
    // … but an equality with slack admits one
    let v = eliminate_and_check(
        "(assert (exists-ramsey ((x Int) (u Int)) ((y Int) (w Int)) \
          (and (= u w) (< x y))))",
        None,
    );
    assert_sat(&v, "constant second component");
}

#[test]
fn real_path_rejects_mod_atoms() {
    let script = parse_str(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (and (< x y) (= (mod x 2) 0))))",
    );
    let err = eliminate_script(&script, Some(Domain::Real));
    assert!(err.is_err(), "modulo atom must not reach the real eliminator");
}

#[test]
fn evaluate_agrees_with_solver_on_ground_mixed_formulas() {
    // a floor-heavy ground formula evaluated both ways
    let text = "(declare-const a Real)\
                (assert (and (= (to_int a) 2) (< a 3) (> (* 2 a) 4)))";
    let script = parse_str(text);
    let cfg = solver();
    let v = check_sat(&script.goal, &cfg).expect("solver");
    assert_sat(&v, "2 < a < 3 with ⌊a⌋ = 2");
    if let ramsey_core::Verdict::Sat(Some(model)) = &v {
        assert!(script.goal.evaluate(model).unwrap());
    } else {
        panic!("expected a model");
    }
}
