//! A parsed input script: declarations plus one goal formula.

use crate::ast::{Formula, Sort, SortedVar};

/// What a script asks for. Benchmark generation emits `Mondec` scripts for
/// the decomposability families; everything else is a satisfiability goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScriptKind {
    #[default]
    CheckSat,
    Mondec,
}

#[derive(Debug, Clone)]
pub struct Script {
    /// Source name, used in diagnostics and reports.
    pub name: String,
    /// Declared logic, if any; inferred from sorts otherwise.
    pub logic: Option<String>,
    /// Free variables in declaration order.
    pub decls: Vec<SortedVar>,
    /// Conjunction of all asserted formulas.
    pub goal: Formula,
    pub kind: ScriptKind,
}

impl Script {
    pub fn new(name: impl Into<String>, decls: Vec<SortedVar>, goal: Formula) -> Self {
        Script {
            name: name.into(),
            logic: None,
            decls,
            goal,
            kind: ScriptKind::CheckSat,
        }
    }

    /// The logic matching the goal's contents: `QF_LIA`/`QF_LRA`/`QF_LIRA`
    /// for quantifier-free goals, `ALL` when binders remain.
    pub fn effective_logic(&self) -> String {
        if let Some(l) = &self.logic {
            return l.clone();
        }
        infer_logic(&self.goal)
    }
}

pub fn infer_logic(goal: &Formula) -> String {
    if !goal.is_quantifier_free() {
        return "ALL".to_string();
    }
    let vars = goal.all_vars();
    let has_int = vars.iter().any(|v| v.sort == Sort::Int);
    let has_real = vars.iter().any(|v| v.sort == Sort::Real);
    if goal.contains_floor() || (has_int && has_real) {
        "QF_LIRA".to_string()
    } else if has_real {
        "QF_LRA".to_string()
    } else {
        "QF_LIA".to_string()
    }
}
