//! The built-in catalog of error-prone scenarios, the registry of predicate
//! primitives their trigger conditions may call, and the tunable parameters
//! the scenario notation leaves open.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{
    self, Condition, DslError, Expr, ParsedScenario, PredicateCall, ScenarioAst, VarDecl,
};
use crate::ValidationFinding;

/// Cognitive control level on which an error mode operates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerformanceLevel {
    Skill,
    Rule,
    Knowledge,
}

impl PerformanceLevel {
    fn parse(text: &str) -> Option<Self> {
        match text {
            "skill" => Some(Self::Skill),
            "rule" => Some(Self::Rule),
            "knowledge" => Some(Self::Knowledge),
            _ => None,
        }
    }
}

impl fmt::Display for PerformanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Skill => "skill",
            Self::Rule => "rule",
            Self::Knowledge => "knowledge",
        })
    }
}

/// One catalog entry: an error mode with its trigger scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMode {
    pub mode_id: String,
    pub name: String,
    pub dsl_source: String,
    pub ast: ScenarioAst,
    pub performance_level: PerformanceLevel,
}

/// Review depths the engine should simulate: every strict prefix of the
/// reviewed sequence, or an explicit set of depths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReviewDepths {
    AllStrictPrefixes,
    Set(BTreeSet<usize>),
}

impl ReviewDepths {
    /// Concrete depths to try against a sequence of `n` reviewable items,
    /// ascending, each ≥ 1 and < n.
    pub fn depths(&self, n: usize) -> Vec<usize> {
        match self {
            Self::AllStrictPrefixes => (1..n).collect(),
            Self::Set(set) => set.iter().copied().filter(|&k| k >= 1 && k < n).collect(),
        }
    }
}

impl Serialize for ReviewDepths {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::AllStrictPrefixes => serializer.serialize_str("all-strict-prefixes"),
            Self::Set(set) => set.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ReviewDepths {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Set(BTreeSet<usize>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(text) if text == "all-strict-prefixes" => Ok(Self::AllStrictPrefixes),
            Raw::Text(other) => Err(serde::de::Error::custom(format!(
                "expected \"all-strict-prefixes\" or a set of depths, got \"{other}\""
            ))),
            Raw::Set(set) => Ok(Self::Set(set)),
        }
    }
}

/// Tunable parameters for the trigger conditions the notation leaves
/// qualitative: how much stronger a competing rule must be to win (`≫`),
/// how much of a requirement a rule must cover to count as known, which
/// review prefixes to simulate, and how exactly a linear fit must
/// reproduce reviewed samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub strength_ratio: f64,
    pub overlap_threshold: f64,
    pub review_depths: ReviewDepths,
    pub fit_tolerance: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            strength_ratio: 10.0,
            overlap_threshold: 1.0,
            review_depths: ReviewDepths::AllStrictPrefixes,
            fit_tolerance: 1e-6,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Vec<ValidationFinding> {
        let mut findings = Vec::new();
        if self.strength_ratio.is_nan() || self.strength_ratio <= 1.0 {
            findings.push(ValidationFinding::new(
                "strength_ratio",
                format!("must be > 1, got {}", self.strength_ratio),
            ));
        }
        if !(self.overlap_threshold > 0.0 && self.overlap_threshold <= 1.0) {
            findings.push(ValidationFinding::new(
                "overlap_threshold",
                format!("must lie in (0, 1], got {}", self.overlap_threshold),
            ));
        }
        if let ReviewDepths::Set(set) = &self.review_depths {
            if set.contains(&0) {
                findings.push(ValidationFinding::new(
                    "review_depths",
                    "depths must be positive",
                ));
            }
        }
        if self.fit_tolerance.is_nan() || self.fit_tolerance < 0.0 {
            findings.push(ValidationFinding::new(
                "fit_tolerance",
                format!("must be ≥ 0, got {}", self.fit_tolerance),
            ));
        }
        findings
    }

    /// The `≫` test: `a` counts as far exceeding `b` when
    /// a ≥ strength_ratio · max(b, 1).
    pub fn far_exceeds(&self, a: u64, b: u64) -> bool {
        a as f64 >= self.strength_ratio * (b.max(1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("catalog parse error: {0}")]
    Parse(#[from] DslError),
    #[error("scenario `{0}` declares no @level directive")]
    MissingLevel(String),
    #[error("scenario `{0}` has unknown level `{1}` (expected skill, rule or knowledge)")]
    BadLevel(String, String),
    #[error("duplicate mode id `{0}` while merging catalogs")]
    DuplicateMode(String),
}

/// Loads every scenario of a `.eps` source as an error mode.
pub fn load_catalog(source: &str) -> Result<Vec<ErrorMode>, CatalogError> {
    let scenarios = dsl::parse_file(source)?;
    scenarios.into_iter().map(ErrorMode::try_from).collect()
}

impl TryFrom<ParsedScenario> for ErrorMode {
    type Error = CatalogError;

    fn try_from(scenario: ParsedScenario) -> Result<Self, CatalogError> {
        let id = scenario.meta.id.clone();
        let level_text = scenario
            .meta
            .level
            .ok_or_else(|| CatalogError::MissingLevel(id.clone()))?;
        let performance_level = PerformanceLevel::parse(&level_text)
            .ok_or_else(|| CatalogError::BadLevel(id.clone(), level_text))?;
        Ok(ErrorMode {
            name: scenario.meta.name.unwrap_or_else(|| id.clone()),
            mode_id: id,
            dsl_source: dsl::render_scenario(&scenario.ast),
            ast: scenario.ast,
            performance_level,
        })
    }
}

/// Appends `extra` modes to `base`, rejecting duplicate mode ids.
pub fn merge_catalogs(
    mut base: Vec<ErrorMode>,
    extra: Vec<ErrorMode>,
) -> Result<Vec<ErrorMode>, CatalogError> {
    for mode in extra {
        if base.iter().any(|m| m.mode_id == mode.mode_id) {
            return Err(CatalogError::DuplicateMode(mode.mode_id));
        }
        base.push(mode);
    }
    Ok(base)
}

const BUILTIN_SOURCE: &str = include_str!("../fixtures/catalog.eps");

/// The seven built-in error modes, in catalog file order.
pub fn builtin_catalog() -> Vec<ErrorMode> {
    load_catalog(BUILTIN_SOURCE).expect("built-in catalog must load")
}

/// Raw text of the built-in catalog, for tooling that re-ships it.
pub fn builtin_catalog_source() -> &'static str {
    BUILTIN_SOURCE
}

/// What kind of value an expression or variable denotes, for checking
/// scenario conditions against the primitive registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    RuleEntity,
    TaskEntity,
    InfoEntity,
    WorkEntity,
    FeatureSet,
    Usage,
    Score,
    Count,
    Number,
    Family,
}

impl ValueKind {
    fn is_numeric(self) -> bool {
        matches!(self, Self::Usage | Self::Score | Self::Count | Self::Number)
    }

    /// Two numeric kinds agree when equal or either is a bare number.
    fn numeric_agrees(self, other: Self) -> bool {
        self.is_numeric()
            && other.is_numeric()
            && (self == other || self == Self::Number || other == Self::Number)
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::RuleEntity => "rule",
            Self::TaskEntity => "subtask",
            Self::InfoEntity => "information item",
            Self::WorkEntity => "reviewable work",
            Self::FeatureSet => "feature set",
            Self::Usage => "usage frequency",
            Self::Score => "prominence score",
            Self::Count => "condition count",
            Self::Number => "number",
            Self::Family => "model family",
        })
    }
}

/// Signature of a registered predicate primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredicateSig {
    pub name: &'static str,
    pub args: &'static [ValueKind],
    /// Value the call denotes when used inside an expression (functions
    /// like `usage_in_context`); `None` for plain truth-valued predicates.
    pub yields: Option<ValueKind>,
}

/// Every predicate a catalog scenario may call, with expected operand
/// kinds. Comparison operators are checked structurally and are not
/// listed here.
pub const PRIMITIVE_REGISTRY: &[PredicateSig] = &[
    PredicateSig {
        name: "usage_in_context",
        args: &[ValueKind::RuleEntity, ValueKind::FeatureSet],
        yields: Some(ValueKind::Usage),
    },
    PredicateSig {
        name: "does_not_exist_in_the_persons_knowledge_base",
        args: &[ValueKind::RuleEntity],
        yields: None,
    },
    PredicateSig {
        name: "the_actual_relation_belongs_to_the_model_family",
        args: &[ValueKind::Family],
        yields: None,
    },
    PredicateSig {
        name: "is_believed_to_be_easy_or_familiar",
        args: &[ValueKind::WorkEntity],
        yields: None,
    },
    PredicateSig {
        name: "a_defect_lies_in_an_unexamined_condition",
        args: &[],
        yields: None,
    },
    PredicateSig {
        name: "is_the_main_subtask_of",
        args: &[ValueKind::TaskEntity, ValueKind::TaskEntity],
        yields: None,
    },
    PredicateSig {
        name: "is_not_necessary_for_completing",
        args: &[ValueKind::TaskEntity, ValueKind::TaskEntity],
        yields: None,
    },
    PredicateSig {
        name: "is_the_last_subtask_of",
        args: &[ValueKind::TaskEntity, ValueKind::TaskEntity],
        yields: None,
    },
];

pub fn registered_predicate(name: &str) -> Option<&'static PredicateSig> {
    PRIMITIVE_REGISTRY.iter().find(|sig| sig.name == name)
}

const COMPARISONS: &[&str] = &["superset", "subset", "eq", "ne", "gt", "lt", "far_exceeds"];

/// Checks a mode against the primitive registry: its source must reparse
/// to its AST, every predicate call must be registered with matching
/// operand kinds, and every declared variable must have a binding domain.
pub fn validate_mode(mode: &ErrorMode) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    let at = |detail: &str| format!("{}/{detail}", mode.mode_id);

    match dsl::parse_scenario(&mode.dsl_source) {
        Ok(ast) => {
            if ast != mode.ast {
                findings.push(ValidationFinding::new(
                    mode.mode_id.clone(),
                    "dsl_source does not parse to the stored syntax tree",
                ));
            }
        }
        Err(e) => findings.push(ValidationFinding::new(
            mode.mode_id.clone(),
            format!("dsl_source no longer parses: {e}"),
        )),
    }

    let mut kinds: BTreeMap<&str, ValueKind> = BTreeMap::new();
    for decl in mode.ast.free_variables() {
        match infer_var_kinds(decl) {
            Ok(inferred) => kinds.extend(inferred),
            Err(message) => findings.push(ValidationFinding::new(at(&decl.name), message)),
        }
    }

    for condition in &mode.ast.trigger_conditions {
        check_condition(condition, &kinds, &at, &mut findings);
    }
    findings
}

/// Infers the kinds of a declared entity and its attribute variables.
fn infer_var_kinds(decl: &VarDecl) -> Result<Vec<(&str, ValueKind)>, String> {
    let entity_kind = if decl.name.starts_with("Rule ") {
        Some(ValueKind::RuleEntity)
    } else if decl.name.starts_with("Task ") {
        Some(ValueKind::TaskEntity)
    } else if decl.name.starts_with("Fe") {
        Some(ValueKind::FeatureSet)
    } else if decl.name.starts_with("Fu") {
        Some(ValueKind::Usage)
    } else {
        None
    };

    let mut slot_kinds = Vec::new();
    for attr in &decl.attrs {
        let kind = match attr.slot.as_str() {
            "Feature set" | "Feature" => ValueKind::FeatureSet,
            "Usage frequency" | "Frequency" => ValueKind::Usage,
            "Saliency" | "Logic importance" => ValueKind::Score,
            "Condition count" => ValueKind::Count,
            other => return Err(format!("unknown attribute slot `{other}`")),
        };
        slot_kinds.push((attr.var.as_str(), kind));
    }

    let entity_kind = match entity_kind {
        Some(kind) => kind,
        None => {
            // Entity class is carried by the attribute slots.
            if slot_kinds.iter().any(|(_, k)| *k == ValueKind::Score) {
                ValueKind::InfoEntity
            } else if slot_kinds.iter().any(|(_, k)| *k == ValueKind::Count) {
                ValueKind::WorkEntity
            } else if decl.children.is_empty() && decl.attrs.is_empty() {
                return Err("variable has no inferable binding domain".into());
            } else {
                ValueKind::TaskEntity
            }
        }
    };

    for (_, kind) in &slot_kinds {
        let allowed = match entity_kind {
            ValueKind::RuleEntity => matches!(kind, ValueKind::FeatureSet | ValueKind::Usage),
            ValueKind::InfoEntity => matches!(kind, ValueKind::Score),
            ValueKind::WorkEntity => matches!(kind, ValueKind::Count),
            _ => false,
        };
        if !allowed {
            return Err(format!("a {entity_kind} cannot carry a {kind} attribute"));
        }
    }

    let mut out = vec![(decl.name.as_str(), entity_kind)];
    out.extend(slot_kinds);
    for child in &decl.children {
        out.push((child.as_str(), ValueKind::TaskEntity));
    }
    Ok(out)
}

fn check_condition(
    condition: &Condition,
    kinds: &BTreeMap<&str, ValueKind>,
    at: &dyn Fn(&str) -> String,
    findings: &mut Vec<ValidationFinding>,
) {
    match condition {
        Condition::All(items) | Condition::Any(items) => {
            for item in items {
                check_condition(item, kinds, at, findings);
            }
        }
        Condition::Pred(pred) => check_predicate(pred, kinds, at, findings),
    }
}

fn check_predicate(
    pred: &PredicateCall,
    kinds: &BTreeMap<&str, ValueKind>,
    at: &dyn Fn(&str) -> String,
    findings: &mut Vec<ValidationFinding>,
) {
    if COMPARISONS.contains(&pred.name.as_str()) {
        let arg_kinds: Vec<Option<ValueKind>> = pred
            .args
            .iter()
            .map(|arg| expr_kind(arg, kinds, &pred.name, at, findings))
            .collect();
        if pred.args.len() != 2 {
            findings.push(ValidationFinding::new(
                at(&pred.name),
                format!("comparison takes 2 operands, got {}", pred.args.len()),
            ));
            return;
        }
        let (Some(lhs), Some(rhs)) = (arg_kinds[0], arg_kinds[1]) else {
            return;
        };
        let ok = match pred.name.as_str() {
            "superset" | "subset" => lhs == ValueKind::FeatureSet && rhs == ValueKind::FeatureSet,
            "far_exceeds" => lhs.numeric_agrees(rhs) && lhs != ValueKind::Score,
            "gt" | "lt" => lhs.numeric_agrees(rhs),
            "eq" | "ne" => {
                (lhs == ValueKind::FeatureSet && rhs == ValueKind::FeatureSet)
                    || lhs.numeric_agrees(rhs)
            }
            _ => unreachable!(),
        };
        if !ok {
            findings.push(ValidationFinding::new(
                at(&pred.name),
                format!("cannot compare a {lhs} with a {rhs}"),
            ));
        }
        return;
    }

    let Some(sig) = registered_predicate(&pred.name) else {
        findings.push(ValidationFinding::new(
            at(&pred.name),
            "predicate is not in the primitive registry",
        ));
        return;
    };
    if sig.args.len() != pred.args.len() {
        findings.push(ValidationFinding::new(
            at(&pred.name),
            format!(
                "predicate takes {} argument(s), got {}",
                sig.args.len(),
                pred.args.len()
            ),
        ));
        return;
    }
    for (arg, expected) in pred.args.iter().zip(sig.args) {
        if let Some(actual) = expr_kind(arg, kinds, &pred.name, at, findings) {
            let ok =
                actual == *expected || (expected.is_numeric() && actual.numeric_agrees(*expected));
            if !ok {
                findings.push(ValidationFinding::new(
                    at(&pred.name),
                    format!("expected a {expected} argument, got a {actual}"),
                ));
            }
        }
    }
}

fn expr_kind(
    expr: &Expr,
    kinds: &BTreeMap<&str, ValueKind>,
    context: &str,
    at: &dyn Fn(&str) -> String,
    findings: &mut Vec<ValidationFinding>,
) -> Option<ValueKind> {
    match expr {
        Expr::Var(name) => kinds.get(name.as_str()).copied(),
        Expr::Num(_) => Some(ValueKind::Number),
        Expr::Empty => Some(ValueKind::FeatureSet),
        Expr::Quoted(_) => Some(ValueKind::Family),
        Expr::Intersect(a, b) | Expr::Minus(a, b) => {
            for side in [a, b] {
                if let Some(kind) = expr_kind(side, kinds, context, at, findings) {
                    if kind != ValueKind::FeatureSet {
                        findings.push(ValidationFinding::new(
                            at(context),
                            format!("set operation applied to a {kind}"),
                        ));
                    }
                }
            }
            Some(ValueKind::FeatureSet)
        }
        Expr::Call { name, args } => {
            let Some(sig) = registered_predicate(name) else {
                findings.push(ValidationFinding::new(
                    at(name),
                    "function is not in the primitive registry",
                ));
                return None;
            };
            if sig.args.len() != args.len() {
                findings.push(ValidationFinding::new(
                    at(name),
                    format!(
                        "function takes {} argument(s), got {}",
                        sig.args.len(),
                        args.len()
                    ),
                ));
            } else {
                for (arg, expected) in args.iter().zip(sig.args) {
                    if let Some(actual) = expr_kind(arg, kinds, name, at, findings) {
                        if actual != *expected {
                            findings.push(ValidationFinding::new(
                                at(name),
                                format!("expected a {expected} argument, got a {actual}"),
                            ));
                        }
                    }
                }
            }
            sig.yields
        }
    }
}
