use serde::{Deserialize, Serialize};

/// Syntax tree for a single scenario.
///
/// `IF` clauses become [`preconditions`](Self::preconditions), `There
/// Exists` phrases in `WHEN` clauses become [`bindings`](Self::bindings),
/// the remaining trigger material becomes a single condition tree, and the
/// terminal `THEN` group becomes [`consequences`](Self::consequences). A
/// `THEN` clause followed by more trigger clauses is kept as an intermediate
/// effect, positioned after the top-level condition it follows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioAst {
    pub scenario_id: String,
    pub preconditions: Vec<Clause>,
    pub bindings: Vec<VarDecl>,
    /// Root of the trigger-condition tree. Top level is a conjunction.
    pub trigger_conditions: Vec<Condition>,
    /// `(index, effect)` pairs: the effect renders after top-level condition
    /// `index`.
    pub intermediate_effects: Vec<(usize, Consequence)>,
    pub consequences: Vec<Consequence>,
}

impl ScenarioAst {
    /// All declared variables: precondition declarations first, then
    /// existential bindings, in source order.
    pub fn free_variables(&self) -> Vec<&VarDecl> {
        self.preconditions
            .iter()
            .flat_map(|c| c.decls.iter())
            .chain(self.bindings.iter())
            .collect()
    }

    /// Looks up a declared variable by name.
    pub fn declaration(&self, name: &str) -> Option<&VarDecl> {
        self.free_variables().into_iter().find(|d| d.name == name)
    }
}

/// One precondition clause: its canonical text plus any variables it
/// declares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub text: String,
    pub decls: Vec<VarDecl>,
}

/// A declared variable with its attribute tuple and, for composite
/// declarations like `Task A = {Task A.1, Task A.2}`, its children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub attrs: Vec<AttrSlot>,
    pub children: Vec<String>,
}

/// One slot of an attribute tuple: `Feature FeA` pairs the slot phrase
/// `Feature` with the attribute variable `FeA`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrSlot {
    pub slot: String,
    pub var: String,
}

/// A node of the trigger-condition tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    All(Vec<Condition>),
    Any(Vec<Condition>),
    Pred(PredicateCall),
}

/// A leaf condition: a named predicate over expressions.
///
/// Comparisons use operator names (`superset`, `ne`, `far_exceeds`, …);
/// free-text conditions like `Task A.1 is the main subtask` get a name
/// derived from their prose (`is_the_main_subtask`) with the embedded
/// identifiers as arguments. The parser records the call; interpretation
/// belongs to the predicate registry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateCall {
    pub name: String,
    pub args: Vec<Expr>,
    /// Canonical rendering of the condition, for display and traces.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Var(String),
    Num(i64),
    /// The empty set, `∅`.
    Empty,
    /// A quoted literal such as a model-family pattern.
    Quoted(String),
    Intersect(Box<Expr>, Box<Expr>),
    Minus(Box<Expr>, Box<Expr>),
    Call {
        name: String,
        args: Vec<Expr>,
    },
}

/// A predicted effect: the canonical clause text plus the declared
/// variables it references, in order of appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consequence {
    pub text: String,
    pub refs: Vec<String>,
}
