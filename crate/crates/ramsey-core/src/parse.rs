//! Parser for the `.rsmt2` dialect: SMT-LIB2 over QF_LIA/QF_LRA/QF_LIRA term
//! syntax, extended with a single `exists-ramsey` binder.
//!
//! All errors carry a line/column position and no input can cause a panic.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::ast::{
    rat, Atom, Formula, Int, ModAtom, Rational, Rel, Sort, SortedVar, Term, FRESH_PREFIX,
};
use crate::error::{ParseError, Pos, Result};
use crate::script::Script;

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Sexp {
    Sym(String, Pos),
    Num(Int, Pos),
    Dec(Rational, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::Num(_, p) | Sexp::Dec(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Sym(s, _)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    at: usize,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    fn new(src: &'a [u8]) -> Self {
        Reader { src, at: 0, line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(ParseError::new(self.pos(), msg).into())
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.at).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.at += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.bump() {
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<Sexp>> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read_sexp()?);
        }
    }

    fn read_sexp(&mut self) -> Result<Sexp> {
        self.skip_trivia();
        let pos = self.pos();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return self.err("unclosed parenthesis"),
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexp::List(items, pos));
                        }
                        _ => items.push(self.read_sexp()?),
                    }
                }
            }
            Some(b')') => self.err("unexpected `)`"),
            Some(b'|') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return self.err("unterminated quoted symbol"),
                        Some(b'|') => return Ok(Sexp::Sym(s, pos)),
                        Some(c) => s.push(c as char),
                    }
                }
            }
            Some(b'"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return self.err("unterminated string literal"),
                        Some(b'"') => {
                            if self.peek() == Some(b'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                return Ok(Sexp::Sym(s, pos));
                            }
                        }
                        Some(c) => s.push(c as char),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => self.read_number(pos),
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    s.push(c as char);
                    self.bump();
                }
                Ok(Sexp::Sym(s, pos))
            }
        }
    }

    fn read_number(&mut self, pos: Pos) -> Result<Sexp> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() == Some(b'.') {
            self.bump();
            let mut frac = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    frac.push(c as char);
                    self.bump();
                } else {
                    break;
                }
            }
            if frac.is_empty() {
                return self.err("expected digits after decimal point");
            }
            let whole: Int = digits.parse().expect("digits");
            let num: Int = frac.parse().expect("digits");
            let den = Int::from(10u32).pow(frac.len() as u32);
            let value = Rational::from_integer(whole) + Rational::new(num, den);
            return Ok(Sexp::Dec(value, pos));
        }
        match self.peek() {
            Some(c) if !c.is_ascii_whitespace() && c != b'(' && c != b')' && c != b';' => {
                self.err(format!("malformed numeral near `{}`", digits))
            }
            _ => Ok(Sexp::Num(digits.parse().expect("digits"), pos)),
        }
    }
}

pub(crate) fn read_sexps(text: &[u8]) -> Result<Vec<Sexp>> {
    Reader::new(text).read_all()
}

// ---------------------------------------------------------------------------
// Script interpretation
// ---------------------------------------------------------------------------

fn perr<T>(pos: Pos, msg: impl Into<String>) -> Result<T> {
    Err(ParseError::new(pos, msg).into())
}

/// Parses a script. Asserts are conjoined into a single goal; at most one
/// `exists-ramsey` binder is allowed, and it may not be nested or negated.
pub fn parse(text: &[u8], name: &str) -> Result<Script> {
    let text = std::str::from_utf8(text)
        .map_err(|_| ParseError::new(Pos { line: 1, col: 1 }, "input is not valid UTF-8"))?;
    let sexps = read_sexps(text.as_bytes())?;
    let mut p = ScriptParser {
        logic: None,
        decls: Vec::new(),
        asserts: Vec::new(),
    };
    for s in &sexps {
        p.command(s)?;
    }
    let goal = Formula::and(p.asserts);
    let ramsey_count = count_ramsey(&goal);
    if ramsey_count > 1 {
        return perr(
            sexps.first().map(|s| s.pos()).unwrap_or(Pos { line: 1, col: 1 }),
            "at most one exists-ramsey binder is allowed per goal",
        );
    }
    let mut script = Script::new(name, p.decls, goal);
    script.logic = p.logic;
    Ok(script)
}

fn count_ramsey(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Cmp(..) => 0,
        Formula::And(fs) | Formula::Or(fs) => fs.iter().map(count_ramsey).sum(),
        Formula::Not(g) | Formula::Exists(_, g) => count_ramsey(g),
        Formula::ExistsRamsey(_, _, g) => 1 + count_ramsey(g),
    }
}

struct ScriptParser {
    logic: Option<String>,
    decls: Vec<SortedVar>,
    asserts: Vec<Formula>,
}

impl ScriptParser {
    fn command(&mut self, s: &Sexp) -> Result<()> {
        let items = match s {
            Sexp::List(items, _) => items,
            _ => return perr(s.pos(), "expected a command"),
        };
        let head = match items.first() {
            Some(Sexp::Sym(h, _)) => h.as_str(),
            _ => return perr(s.pos(), "expected a command name"),
        };
        match head {
            "set-logic" => {
                match items.get(1) {
                    Some(Sexp::Sym(l, _)) => self.logic = Some(l.clone()),
                    _ => return perr(s.pos(), "set-logic expects a symbol"),
                }
                Ok(())
            }
            "set-info" | "set-option" | "check-sat" | "get-model" | "exit" => Ok(()),
            "push" | "pop" => perr(s.pos(), "incremental commands are not supported"),
            "declare-const" => {
                if items.len() != 3 {
                    return perr(s.pos(), "declare-const expects a name and a sort");
                }
                let v = self.sorted_var(&items[1], &items[2])?;
                self.declare(v, items[1].pos())
            }
            "declare-fun" => {
                if items.len() != 4 {
                    return perr(s.pos(), "declare-fun expects name, arguments, sort");
                }
                match &items[2] {
                    Sexp::List(args, _) if args.is_empty() => {}
                    other => {
                        return perr(other.pos(), "only nullary declare-fun is supported")
                    }
                }
                let v = self.sorted_var(&items[1], &items[3])?;
                self.declare(v, items[1].pos())
            }
            "assert" => {
                if items.len() != 2 {
                    return perr(s.pos(), "assert expects exactly one formula");
                }
                let body = expand_lets(&items[1], &BTreeMap::new())?;
                let mut scope = Scope { frames: vec![], decls: &self.decls };
                let f = parse_formula(&body, &mut scope, false)?;
                self.asserts.push(f);
                Ok(())
            }
            other => perr(s.pos(), format!("unknown command `{other}`")),
        }
    }

    fn declare(&mut self, v: SortedVar, pos: Pos) -> Result<()> {
        if self.decls.iter().any(|d| d.name == v.name) {
            return perr(pos, format!("duplicate declaration of `{}`", v.name));
        }
        self.decls.push(v);
        Ok(())
    }

    fn sorted_var(&self, name: &Sexp, sort: &Sexp) -> Result<SortedVar> {
        let n = match name {
            Sexp::Sym(n, _) => n.clone(),
            _ => return perr(name.pos(), "expected a variable name"),
        };
        if n.starts_with(FRESH_PREFIX) {
            return perr(
                name.pos(),
                format!("names starting with `{FRESH_PREFIX}` are reserved"),
            );
        }
        Ok(SortedVar::new(n, parse_sort(sort)?))
    }
}

fn parse_sort(s: &Sexp) -> Result<Sort> {
    match s {
        Sexp::Sym(n, _) if n == "Int" => Ok(Sort::Int),
        Sexp::Sym(n, _) if n == "Real" => Ok(Sort::Real),
        other => perr(other.pos(), "expected sort Int or Real"),
    }
}

/// Parse-time expansion of `let`. Bindings are substituted at the
/// s-expression level, respecting shadowing by inner `let`s and binders.
fn expand_lets(s: &Sexp, env: &BTreeMap<String, Sexp>) -> Result<Sexp> {
    match s {
        Sexp::Sym(name, _) => Ok(env.get(name).cloned().unwrap_or_else(|| s.clone())),
        Sexp::Num(..) | Sexp::Dec(..) => Ok(s.clone()),
        Sexp::List(items, pos) => {
            match s.head() {
                Some("let") => {
                    if items.len() != 3 {
                        return perr(*pos, "let expects bindings and a body");
                    }
                    let bindings = match &items[1] {
                        Sexp::List(bs, _) => bs,
                        other => return perr(other.pos(), "let expects a binding list"),
                    };
                    let mut inner = env.clone();
                    for b in bindings {
                        match b {
                            Sexp::List(pair, _) if pair.len() == 2 => {
                                let name = match &pair[0] {
                                    Sexp::Sym(n, _) => n.clone(),
                                    other => return perr(other.pos(), "expected binding name"),
                                };
                                // simultaneous let: bindings see the outer env
                                let value = expand_lets(&pair[1], env)?;
                                inner.insert(name, value);
                            }
                            other => return perr(other.pos(), "malformed let binding"),
                        }
                    }
                    expand_lets(&items[2], &inner)
                }
                Some("exists") | Some("forall") | Some("exists-ramsey") => {
                    // binder names shadow let bindings inside the body
                    let mut inner = env.clone();
                    let nbinders = if s.head() == Some("exists-ramsey") { 2 } else { 1 };
                    for b in items.iter().skip(1).take(nbinders) {
                        if let Sexp::List(pairs, _) = b {
                            for p in pairs {
                                if let Sexp::List(pair, _) = p {
                                    if let Some(Sexp::Sym(n, _)) = pair.first() {
                                        inner.remove(n);
                                    }
                                }
                            }
                        }
                    }
                    let out = items
                        .iter()
                        .enumerate()
                        .map(|(i, item)| {
                            if i == 0 || (i >= 1 && i <= nbinders) {
                                Ok(item.clone())
                            } else {
                                expand_lets(item, &inner)
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Sexp::List(out, *pos))
                }
                _ => Ok(Sexp::List(
                    items
                        .iter()
                        .map(|i| expand_lets(i, env))
                        .collect::<Result<Vec<_>>>()?,
                    *pos,
                )),
            }
        }
    }
}

struct Scope<'a> {
    frames: Vec<Vec<SortedVar>>,
    decls: &'a [SortedVar],
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<&SortedVar> {
        for frame in self.frames.iter().rev() {
            if let Some(v) = frame.iter().rev().find(|v| &*v.name == name) {
                return Some(v);
            }
        }
        self.decls.iter().find(|v| &*v.name == name)
    }
}

fn parse_binders(s: &Sexp) -> Result<Vec<SortedVar>> {
    let items = match s {
        Sexp::List(items, _) => items,
        other => return perr(other.pos(), "expected a binder list"),
    };
    if items.is_empty() {
        return perr(s.pos(), "binder list may not be empty");
    }
    let mut out: Vec<SortedVar> = Vec::with_capacity(items.len());
    for b in items {
        match b {
            Sexp::List(pair, _) if pair.len() == 2 => {
                let name = match &pair[0] {
                    Sexp::Sym(n, _) => n.clone(),
                    other => return perr(other.pos(), "expected a variable name"),
                };
                // generated names are fine in binder position (our own
                // printed output has them); the pipeline alpha-renames every
                // binder before generating fresh names
                if out.iter().any(|v| *v.name == name) {
                    return perr(pair[0].pos(), format!("duplicate binder `{name}`"));
                }
                out.push(SortedVar::new(name, parse_sort(&pair[1])?));
            }
            other => return perr(other.pos(), "expected (name sort)"),
        }
    }
    Ok(out)
}

/// `inside_ramsey` guards against nested Ramsey binders.
fn parse_formula(s: &Sexp, scope: &mut Scope, inside_ramsey: bool) -> Result<Formula> {
    match s {
        Sexp::Sym(n, pos) => match n.as_str() {
            "true" => Ok(Formula::tt()),
            "false" => Ok(Formula::ff()),
            _ => perr(*pos, format!("expected a formula, found `{n}`")),
        },
        Sexp::Num(_, pos) | Sexp::Dec(_, pos) => perr(*pos, "expected a formula, found a number"),
        Sexp::List(items, pos) => {
            // ((_ divisible e) t)
            if let Some(Sexp::List(inner, _)) = items.first() {
                if let [Sexp::Sym(u, _), Sexp::Sym(d, _), Sexp::Num(e, _)] = inner.as_slice() {
                    if u == "_" && d == "divisible" {
                        if items.len() != 2 {
                            return perr(*pos, "divisible expects one argument");
                        }
                        if e <= &Int::zero() {
                            return perr(*pos, "divisible modulus must be positive");
                        }
                        let t = parse_term(&items[1], scope)?;
                        return mod_atom(&t, e.clone(), rat(0), false, *pos);
                    }
                }
                return perr(*pos, "expected an operator");
            }
            let head = match items.first() {
                Some(Sexp::Sym(h, _)) => h.as_str(),
                _ => return perr(*pos, "expected an operator"),
            };
            let args = &items[1..];
            match head {
                "and" => Ok(Formula::and(
                    args.iter()
                        .map(|a| parse_formula(a, scope, inside_ramsey))
                        .collect::<Result<Vec<_>>>()?,
                )),
                "or" => Ok(Formula::or(
                    args.iter()
                        .map(|a| parse_formula(a, scope, inside_ramsey))
                        .collect::<Result<Vec<_>>>()?,
                )),
                "not" => {
                    if args.len() != 1 {
                        return perr(*pos, "not expects one argument");
                    }
                    Ok(Formula::not(parse_formula(&args[0], scope, inside_ramsey)?))
                }
                "=>" => {
                    // implication desugars to ¬∨ at parse
                    if args.len() < 2 {
                        return perr(*pos, "=> expects at least two arguments");
                    }
                    let parsed = args
                        .iter()
                        .map(|a| parse_formula(a, scope, inside_ramsey))
                        .collect::<Result<Vec<_>>>()?;
                    let mut it = parsed.into_iter().rev();
                    let mut acc = it.next().unwrap();
                    for lhs in it {
                        acc = Formula::or([Formula::not(lhs), acc]);
                    }
                    Ok(acc)
                }
                "exists" => {
                    if args.len() != 2 {
                        return perr(*pos, "exists expects binders and a body");
                    }
                    let vars = parse_binders(&args[0])?;
                    scope.frames.push(vars.clone());
                    let body = parse_formula(&args[1], scope, inside_ramsey);
                    scope.frames.pop();
                    Ok(Formula::exists(vars, body?))
                }
                "forall" => perr(*pos, "universal quantification is not supported"),
                "exists-ramsey" => {
                    if inside_ramsey {
                        return perr(*pos, "nested exists-ramsey binders are not allowed");
                    }
                    if args.len() != 3 {
                        return perr(*pos, "exists-ramsey expects two binder lists and a body");
                    }
                    let xs = parse_binders(&args[0])?;
                    let ys = parse_binders(&args[1])?;
                    if xs.len() != ys.len() {
                        return perr(*pos, "exists-ramsey vectors must have equal length");
                    }
                    for (x, y) in xs.iter().zip(&ys) {
                        if x.sort != y.sort {
                            return perr(
                                *pos,
                                format!(
                                    "exists-ramsey vectors must have the same type: `{}` is {}, `{}` is {}",
                                    x.name, x.sort, y.name, y.sort
                                ),
                            );
                        }
                    }
                    let mut all = xs.clone();
                    for y in &ys {
                        if all.iter().any(|v| v.name == y.name) {
                            return perr(*pos, format!("duplicate binder `{}`", y.name));
                        }
                        all.push(y.clone());
                    }
                    scope.frames.push(all);
                    let body = parse_formula(&args[2], scope, true);
                    scope.frames.pop();
                    Ok(Formula::ExistsRamsey(xs, ys, Box::new(body?)))
                }
                "<" | "<=" | ">" | ">=" => {
                    let rel = match head {
                        "<" => Rel::Lt,
                        "<=" => Rel::Le,
                        ">" => Rel::Gt,
                        _ => Rel::Ge,
                    };
                    if args.len() < 2 {
                        return perr(*pos, format!("{head} expects at least two arguments"));
                    }
                    let terms = args
                        .iter()
                        .map(|a| parse_term(a, scope))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Formula::and(
                        terms
                            .windows(2)
                            .map(|w| Formula::Cmp(rel, w[0].clone(), w[1].clone()))
                            .collect::<Vec<_>>(),
                    ))
                }
                "=" => parse_equality(args, scope, *pos),
                "distinct" => {
                    if args.len() < 2 {
                        return perr(*pos, "distinct expects at least two arguments");
                    }
                    let terms = args
                        .iter()
                        .map(|a| parse_term(a, scope))
                        .collect::<Result<Vec<_>>>()?;
                    let mut out = Vec::new();
                    for i in 0..terms.len() {
                        for j in i + 1..terms.len() {
                            out.push(Formula::Cmp(Rel::Neq, terms[i].clone(), terms[j].clone()));
                        }
                    }
                    Ok(Formula::and(out))
                }
                "_" | "divisible" => perr(*pos, "divisibility is written ((_ divisible e) t)"),
                _ => perr(*pos, format!("unknown operator `{head}`")),
            }
        }
    }
}

/// `=` over terms; an operand shaped `(mod t e)` makes a modulo atom.
fn parse_equality(args: &[Sexp], scope: &mut Scope, pos: Pos) -> Result<Formula> {
    if args.len() < 2 {
        return perr(pos, "= expects at least two arguments");
    }
    let mut out = Vec::new();
    for w in args.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let mod_side = |s: &Sexp| matches!(s.head(), Some("mod"));
        if mod_side(a) || mod_side(b) {
            let (m, other) = if mod_side(a) { (a, b) } else { (b, a) };
            let (t, e) = parse_mod_term(m, scope)?;
            let c = parse_term(other, scope)?;
            let c = match c.to_linterm() {
                Ok(l) if l.is_constant() => l.get_constant().clone(),
                _ => {
                    return perr(
                        other.pos(),
                        "a mod comparison needs a constant on the other side",
                    )
                }
            };
            out.push(mod_atom(&t, e, c, false, m.pos())?);
        } else {
            out.push(Formula::Cmp(
                Rel::Eq,
                parse_term(a, scope)?,
                parse_term(b, scope)?,
            ));
        }
    }
    Ok(Formula::and(out))
}

fn parse_mod_term(s: &Sexp, scope: &mut Scope) -> Result<(Term, Int)> {
    let items = match s {
        Sexp::List(items, _) => items,
        _ => unreachable!("caller checked the head"),
    };
    if items.len() != 3 {
        return perr(s.pos(), "mod expects a term and a constant modulus");
    }
    let t = parse_term(&items[1], scope)?;
    match &items[2] {
        Sexp::Num(e, _) if e > &Int::zero() => Ok((t, e.clone())),
        other => perr(other.pos(), "modulus must be a positive integer constant"),
    }
}

fn mod_atom(t: &Term, e: Int, residue: Rational, negated: bool, pos: Pos) -> Result<Formula> {
    if !residue.is_integer() {
        return perr(pos, "mod residue must be an integer");
    }
    let r = residue.to_integer();
    // (mod t e) ranges over [0, e); a comparison against anything else is
    // simply false, not a congruence.
    if r.is_negative() || r >= e {
        return Ok(if negated { Formula::tt() } else { Formula::ff() });
    }
    let lin = t
        .to_linterm()
        .map_err(|_| ParseError::new(pos, "mod argument must be floor-free and linear"))?;
    let m = ModAtom::new(lin, e, r).map_err(|e| ParseError::new(pos, e.to_string()))?;
    Ok(Formula::Atom(if negated {
        Atom::NotDivCong(m)
    } else {
        Atom::DivCong(m)
    }))
}

fn parse_term(s: &Sexp, scope: &mut Scope) -> Result<Term> {
    match s {
        Sexp::Num(n, _) => Ok(Term::Const(Rational::from_integer(n.clone()))),
        Sexp::Dec(r, _) => Ok(Term::Const(r.clone())),
        Sexp::Sym(n, pos) => match scope.lookup(n) {
            Some(v) => Ok(Term::Var(v.clone())),
            None => perr(*pos, format!("undeclared variable `{n}`")),
        },
        Sexp::List(items, pos) => {
            let head = match items.first() {
                Some(Sexp::Sym(h, _)) => h.as_str(),
                _ => return perr(*pos, "expected a term operator"),
            };
            let args = &items[1..];
            match head {
                "+" => Ok(Term::Add(
                    args.iter()
                        .map(|a| parse_term(a, scope))
                        .collect::<Result<Vec<_>>>()?,
                )),
                "-" => {
                    if args.is_empty() {
                        return perr(*pos, "- expects at least one argument");
                    }
                    let mut terms = args
                        .iter()
                        .map(|a| parse_term(a, scope))
                        .collect::<Result<Vec<_>>>()?;
                    if terms.len() == 1 {
                        return Ok(Term::neg(terms.pop().unwrap()));
                    }
                    let first = terms.remove(0);
                    let mut out = vec![first];
                    out.extend(terms.into_iter().map(Term::neg));
                    Ok(Term::Add(out))
                }
                "*" => {
                    if args.is_empty() {
                        return perr(*pos, "* expects arguments");
                    }
                    let terms = args
                        .iter()
                        .map(|a| parse_term(a, scope))
                        .collect::<Result<Vec<_>>>()?;
                    let mut scalar = Rational::from_integer(1.into());
                    let mut non_const: Option<Term> = None;
                    for t in terms {
                        match t.to_linterm() {
                            Ok(l) if l.is_constant() => scalar *= l.get_constant().clone(),
                            _ => {
                                if non_const.is_some() {
                                    return perr(
                                        *pos,
                                        "nonlinear term: * allows at most one non-constant factor",
                                    );
                                }
                                non_const = Some(t);
                            }
                        }
                    }
                    Ok(match non_const {
                        None => Term::Const(scalar),
                        Some(t) => Term::Mul(scalar, Box::new(t)),
                    })
                }
                "/" => {
                    if args.len() != 2 {
                        return perr(*pos, "/ expects two arguments");
                    }
                    let num = parse_term(&args[0], scope)?;
                    let den = parse_term(&args[1], scope)?;
                    let den = match den.to_linterm() {
                        Ok(l) if l.is_constant() && !l.get_constant().is_zero() => {
                            l.get_constant().clone()
                        }
                        _ => {
                            return perr(
                                args[1].pos(),
                                "division only by a nonzero constant",
                            )
                        }
                    };
                    Ok(Term::Mul(den.recip(), Box::new(num)))
                }
                "to_int" => {
                    if args.len() != 1 {
                        return perr(*pos, "to_int expects one argument");
                    }
                    Ok(Term::floor(parse_term(&args[0], scope)?))
                }
                "to_real" => {
                    if args.len() != 1 {
                        return perr(*pos, "to_real expects one argument");
                    }
                    parse_term(&args[0], scope)
                }
                other => perr(*pos, format!("unknown term operator `{other}`")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(s: &str) -> Result<Script> {
        parse(s.as_bytes(), "test")
    }

    #[test]
    fn section_one_example() {
        let s = parse_str(
            "(set-logic QF_LRA)\n(assert (exists-ramsey ((x Real)) ((y Real)) \
             (and (< x y) (> x 99) (< y 100))))\n(check-sat)",
        )
        .unwrap();
        match &s.goal {
            Formula::ExistsRamsey(xs, ys, body) => {
                assert_eq!(xs.len(), 1);
                assert_eq!(ys.len(), 1);
                assert_eq!(body.count_atoms(), 3);
            }
            other => panic!("expected ramsey goal, got {other:?}"),
        }
    }

    #[test]
    fn implication_desugars_at_parse() {
        let s = parse_str(
            "(declare-const x Int)(declare-const y Int)\
             (assert (=> (>= x 0) (>= (+ x y) 2)))",
        )
        .unwrap();
        match &s.goal {
            Formula::Or(fs) => {
                assert!(matches!(fs[0], Formula::Not(_)));
                assert!(matches!(fs[1], Formula::Cmp(Rel::Ge, ..)));
            }
            other => panic!("expected ¬∨, got {other:?}"),
        }
    }

    #[test]
    fn ramsey_sort_mismatch_rejected() {
        let err = parse_str(
            "(assert (exists-ramsey ((x Int)) ((y Real)) (< x y)))",
        )
        .unwrap_err();
        assert!(err.to_string().contains("same type"), "{err}");
    }

    #[test]
    fn nested_ramsey_rejected() {
        let err = parse_str(
            "(assert (exists-ramsey ((x Int)) ((y Int)) \
             (exists-ramsey ((a Int)) ((b Int)) (< a b))))",
        )
        .unwrap_err();
        assert!(err.to_string().contains("nested"), "{err}");
    }

    #[test]
    fn ramsey_dimension_zero_rejected() {
        let err = parse_str("(assert (exists-ramsey () () true))").unwrap_err();
        assert!(err.to_string().contains("empty"), "{err}");
    }

    #[test]
    fn reserved_prefix_rejected() {
        let err = parse_str("(declare-const %x Int)").unwrap_err();
        assert!(err.to_string().contains("reserved"), "{err}");
    }

    #[test]
    fn divisible_and_mod_atoms() {
        let s = parse_str(
            "(declare-const x Int)\
             (assert (and ((_ divisible 3) x) (= (mod x 5) 2)))",
        )
        .unwrap();
        assert_eq!(s.goal.count_atoms(), 2);
    }

    #[test]
    fn mod_over_real_rejected() {
        let err =
            parse_str("(declare-const x Real)(assert (= (mod x 3) 1))").unwrap_err();
        assert!(err.to_string().contains("real"), "{err}");
    }

    #[test]
    fn let_expansion() {
        let s = parse_str(
            "(declare-const x Int)(assert (let ((t (+ x 1))) (< t (let ((t 5)) t))))",
        )
        .unwrap();
        // expands to (< (+ x 1) 5)
        match &s.goal {
            Formula::Cmp(Rel::Lt, a, b) => {
                assert!(matches!(a, Term::Add(_)));
                assert!(matches!(b, Term::Const(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_str("(assert\n  (< x 1))").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("2:"), "{msg}");
    }

    #[test]
    fn truncated_input_is_an_error_not_a_panic() {
        for cut in 0..40 {
            let text = "(assert (exists-ramsey ((x Int)) ((y Int)) (< x y)))";
            let cut = text.len().saturating_sub(cut);
            let _ = parse_str(&text[..cut]);
        }
    }
}
