//! Printing formulas back to standard SMT-LIB2 v2.6.
//!
//! Floor is printed as `(to_int t)`, divisibility as `(= (mod t e) c)`, and
//! Int-sorted subterms are coerced with `(to_real …)` wherever they meet real
//! arithmetic, so the output is accepted verbatim by mainstream solvers.

use num_traits::{One, Signed, Zero};

use crate::ast::{Atom, Formula, LinTerm, Rational, Rel, Sort, SortedVar, Term};
use crate::error::{Error, Result};
use crate::script::Script;

/// Prints `(set-logic …)`, one `declare-const` per free variable, a single
/// `assert`, and `(check-sat)`. Rejects goals that still contain a Ramsey
/// binder.
pub fn print_script(script: &Script) -> Result<String> {
    if script.goal.contains_ramsey() {
        return Err(Error::ResidualRamsey);
    }
    let mut out = String::new();
    if !script.name.is_empty() {
        out.push_str(&format!("; {}\n", script.name));
    }
    out.push_str(&format!("(set-logic {})\n", script.effective_logic()));
    for v in &script.decls {
        out.push_str(&format!("(declare-const {} {})\n", sym(&v.name), v.sort));
    }
    out.push_str("(assert ");
    out.push_str(&print_formula(&script.goal)?);
    out.push_str(")\n(check-sat)\n");
    Ok(out)
}

pub fn print_formula(f: &Formula) -> Result<String> {
    let mut s = String::new();
    write_formula(f, &mut s)?;
    Ok(s)
}

fn write_formula(f: &Formula, out: &mut String) -> Result<()> {
    match f {
        Formula::Atom(a) => write_atom(a, out),
        Formula::Cmp(rel, s, t) => {
            let (op, swap) = match rel {
                Rel::Lt => ("<", false),
                Rel::Le => ("<=", false),
                Rel::Gt => ("<", true),
                Rel::Ge => ("<=", true),
                Rel::Eq => ("=", false),
                Rel::Neq => ("distinct", false),
            };
            let sort = join_sort(term_sort(s), term_sort(t));
            let (a, b) = if swap { (t, s) } else { (s, t) };
            out.push('(');
            out.push_str(op);
            out.push(' ');
            write_term(a, sort, out);
            out.push(' ');
            write_term(b, sort, out);
            out.push(')');
            Ok(())
        }
        Formula::And(fs) => write_nary("and", "true", fs, out),
        Formula::Or(fs) => write_nary("or", "false", fs, out),
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(g, out)?;
            out.push(')');
            Ok(())
        }
        Formula::Exists(vs, g) => {
            out.push_str("(exists (");
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("({} {})", sym(&v.name), v.sort));
            }
            out.push_str(") ");
            write_formula(g, out)?;
            out.push(')');
            Ok(())
        }
        Formula::ExistsRamsey(..) => Err(Error::ResidualRamsey),
    }
}

fn write_nary(op: &str, empty: &str, fs: &[Formula], out: &mut String) -> Result<()> {
    match fs.len() {
        0 => {
            out.push_str(empty);
            Ok(())
        }
        1 => write_formula(&fs[0], out),
        _ => {
            out.push('(');
            out.push_str(op);
            for f in fs {
                out.push(' ');
                write_formula(f, out)?;
            }
            out.push(')');
            Ok(())
        }
    }
}

fn write_atom(a: &Atom, out: &mut String) -> Result<()> {
    match a {
        Atom::Lt(t) => write_split_cmp("<", t, out),
        Atom::Eq(t) => write_split_cmp("=", t, out),
        Atom::DivCong(m) | Atom::NotDivCong(m) => {
            if matches!(a, Atom::NotDivCong(_)) {
                out.push_str("(not ");
            }
            out.push_str("(= (mod ");
            write_linterm_side(m.term(), false, Sort::Int, out);
            out.push(' ');
            out.push_str(&m.modulus().to_string());
            out.push_str(") ");
            out.push_str(&m.residue().to_string());
            out.push(')');
            if matches!(a, Atom::NotDivCong(_)) {
                out.push(')');
            }
            Ok(())
        }
    }
}

/// `t REL 0` printed as `pos REL neg` with the negative-coefficient part
/// moved across, which keeps the output readable and reparse-stable.
fn write_split_cmp(op: &str, t: &LinTerm, out: &mut String) -> Result<()> {
    let sort = linterm_sort(t);
    let mut pos = LinTerm::zero();
    let mut neg = LinTerm::zero();
    for (v, c) in t.iter() {
        if c.is_negative() {
            neg.add_term(v.clone(), -c.clone());
        } else {
            pos.add_term(v.clone(), c.clone());
        }
    }
    let k = t.get_constant();
    if k.is_negative() {
        neg.add_constant(-k.clone());
    } else {
        pos.add_constant(k.clone());
    }
    out.push('(');
    out.push_str(op);
    out.push(' ');
    write_linterm_side(&pos, pos.is_zero(), sort, out);
    out.push(' ');
    write_linterm_side(&neg, neg.is_zero(), sort, out);
    out.push(')');
    Ok(())
}

fn write_linterm_side(t: &LinTerm, force_zero: bool, sort: Sort, out: &mut String) {
    let mut parts: Vec<String> = Vec::new();
    for (v, c) in t.iter() {
        let var = coerce_var(v, sort);
        if c.is_one() {
            parts.push(var);
        } else {
            parts.push(format!("(* {} {})", rational(c, sort), var));
        }
    }
    if force_zero || !t.get_constant().is_zero() {
        parts.push(rational(t.get_constant(), sort));
    }
    match parts.len() {
        0 => out.push_str(&rational(&Rational::zero(), sort)),
        1 => out.push_str(&parts[0]),
        _ => {
            out.push_str("(+ ");
            out.push_str(&parts.join(" "));
            out.push(')');
        }
    }
}

fn coerce_var(v: &SortedVar, want: Sort) -> String {
    if v.sort == Sort::Int && want == Sort::Real {
        format!("(to_real {})", sym(&v.name))
    } else {
        sym(&v.name)
    }
}

/// Quotes names that are not SMT-LIB simple symbols.
fn sym(name: &str) -> String {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn linterm_sort(t: &LinTerm) -> Sort {
    if t.is_integral() && t.vars().all(|v| v.sort == Sort::Int) {
        Sort::Int
    } else {
        Sort::Real
    }
}

fn term_sort(t: &Term) -> Sort {
    t.sort()
}

fn join_sort(a: Sort, b: Sort) -> Sort {
    if a == Sort::Real || b == Sort::Real {
        Sort::Real
    } else {
        Sort::Int
    }
}

fn write_term(t: &Term, want: Sort, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(&coerce_var(v, want)),
        Term::Const(c) => out.push_str(&rational(c, want)),
        Term::Add(ts) => match ts.len() {
            0 => out.push_str(&rational(&Rational::zero(), want)),
            1 => write_term(&ts[0], want, out),
            _ => {
                out.push_str("(+");
                for s in ts {
                    out.push(' ');
                    write_term(s, want, out);
                }
                out.push(')');
            }
        },
        Term::Mul(c, s) => {
            if c.is_one() {
                write_term(s, want, out);
            } else {
                out.push_str("(* ");
                out.push_str(&rational(c, want));
                out.push(' ');
                write_term(s, want, out);
                out.push(')');
            }
        }
        Term::Floor(s) => {
            if want == Sort::Real {
                out.push_str("(to_real ");
            }
            out.push_str("(to_int ");
            write_term(s, Sort::Real, out);
            out.push(')');
            if want == Sort::Real {
                out.push(')');
            }
        }
    }
}

/// Renders a rational in the given sort context: plain numerals over Int,
/// decimal/quotient form over Real.
fn rational(c: &Rational, sort: Sort) -> String {
    let neg = c.is_negative();
    let a = c.abs();
    let body = match sort {
        Sort::Int => {
            debug_assert!(a.is_integer());
            a.numer().to_string()
        }
        Sort::Real => {
            if a.is_integer() {
                format!("{}.0", a.numer())
            } else {
                format!("(/ {}.0 {}.0)", a.numer(), a.denom())
            }
        }
    };
    if neg {
        format!("(- {body})")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{rat, rat_frac, Int, LinTerm, ModAtom};
    use crate::parse;

    #[test]
    fn mod_atom_concrete_syntax() {
        let x = SortedVar::int("x");
        let m = ModAtom::new(LinTerm::var(x), Int::from(3), Int::from(1)).unwrap();
        let f = Formula::Atom(Atom::DivCong(m));
        assert_eq!(print_formula(&f).unwrap(), "(= (mod x 3) 1)");
    }

    #[test]
    fn residual_ramsey_rejected() {
        let x = SortedVar::int("x");
        let y = SortedVar::int("y");
        let f = Formula::ExistsRamsey(
            vec![x.clone()],
            vec![y.clone()],
            Box::new(Formula::Cmp(Rel::Lt, Term::var(x), Term::var(y))),
        );
        let s = Script::new("t", vec![], f);
        assert!(matches!(print_script(&s), Err(Error::ResidualRamsey)));
    }

    #[test]
    fn mixed_atom_coerces_int_to_real() {
        let x = SortedVar::int("x");
        let y = SortedVar::real("y");
        let t = LinTerm::var(x) + LinTerm::var(y).scale(&rat(-2)) + LinTerm::constant(rat_frac(1, 2));
        let f = Formula::Atom(Atom::Lt(t));
        let printed = print_formula(&f).unwrap();
        assert_eq!(printed, "(< (+ (to_real x) (/ 1.0 2.0)) (* 2.0 y))");
    }

    #[test]
    fn roundtrip_is_idempotent_on_the_intro_example() {
        let text = "(declare-const z Real)\n(assert (exists ((x Real)) (and (< x z) (> x 99))))";
        let s1 = parse::parse(text.as_bytes(), "t").unwrap();
        let printed = print_script(&s1).unwrap();
        let s2 = parse::parse(printed.as_bytes(), "t").unwrap();
        let printed2 = print_script(&s2).unwrap();
        assert_eq!(printed, printed2);
    }
}
