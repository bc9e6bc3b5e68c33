//! Shared domain vocabulary: feature algebra, knowledge profiles (what a
//! programmer knows), and task models (what a task demands).
//!
//! Task models and knowledge profiles are stored as JSON documents; the
//! structs here define the schema. All values are immutable after
//! construction and safe to share across threads.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ValidationFinding;

/// A finite set of feature tags with ordinary set algebra.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureSet {
    pub tags: BTreeSet<String>,
}

impl FeatureSet {
    pub fn new<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            tags: tags.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            tags: self.tags.intersection(&other.tags).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self {
            tags: self.tags.difference(&other.tags).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.tags.is_subset(&other.tags)
    }

    /// Proper subset: contained in `other` and strictly smaller.
    pub fn is_strict_subset(&self, other: &Self) -> bool {
        self.tags.is_subset(&other.tags) && self.tags.len() < other.tags.len()
    }

    /// Fraction of `required` covered by this set; 1.0 for an empty
    /// requirement.
    pub fn coverage_of(&self, required: &Self) -> f64 {
        if required.tags.is_empty() {
            return 1.0;
        }
        self.intersection(required).len() as f64 / required.len() as f64
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tags.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "{{")?;
        for (i, tag) in self.tags.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{tag}")?;
        }
        write!(f, "}}")
    }
}

/// Exact set intersection of two feature sets.
pub fn feature_overlap(a: &FeatureSet, b: &FeatureSet) -> FeatureSet {
    a.intersection(b)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    #[default]
    Specific,
    General,
}

/// One condition component of a stored rule: whether the programmer has it
/// encoded at all, and whether it is integrated into the rule's conditional
/// part (an encoded-but-unintegrated component is known in isolation yet
/// not checked when the rule fires).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubRule {
    pub id: String,
    pub encoded: bool,
    pub integrated: bool,
    /// Defect wording to emit when this component is missing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consequence: Option<String>,
}

/// A schema in a programmer's knowledge base: the features of situations
/// it applies to, how often it has been used successfully, and its
/// sub-rule composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    #[serde(default)]
    pub features: FeatureSet,
    #[serde(default)]
    pub usage_count: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subrules: Vec<SubRule>,
    #[serde(default)]
    pub kind: RuleKind,
    /// How the rule's product reads when named inside a defect form
    /// (e.g. `'0'` for a numeric initializer).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renders_as: Option<String>,
}

impl Rule {
    pub fn render_name(&self) -> &str {
        self.renders_as.as_deref().unwrap_or(&self.id)
    }

    /// Usage mass this rule carries in a context with features `context`:
    /// its full count when it overlaps the context at all, zero otherwise.
    pub fn usage_in_context(&self, context: &FeatureSet) -> u64 {
        if self.features.intersection(context).is_empty() {
            0
        } else {
            self.usage_count
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeProfile {
    pub profile_id: String,
    pub rules: Vec<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl KnowledgeProfile {
    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

/// What a subtask demands of the programmer's knowledge: a specific rule
/// by id, a capability described by features, or (with `any_of`) one of
/// several alternative capabilities.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleRequirement {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub any_of: Vec<FeatureSet>,
    /// Defect wording to emit when this requirement fails; `{A}` and `{B}`
    /// expand to the competing rules of a substitution prediction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect_form: Option<String>,
}

impl RuleRequirement {
    pub fn describe(&self) -> String {
        if let Some(id) = &self.rule_id {
            return id.clone();
        }
        if let Some(features) = &self.features {
            return features.to_string();
        }
        let alts: Vec<String> = self.any_of.iter().map(|f| f.to_string()).collect();
        alts.join(" or ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subtask {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Subtask>,
    #[serde(default)]
    pub is_main: bool,
    #[serde(default = "default_true")]
    pub necessary_for_parent: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub required_rules: Vec<RuleRequirement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location_ref: Option<String>,
}

fn default_true() -> bool {
    true
}

impl Subtask {
    /// Depth-first walk over the tree, parents before children.
    pub fn walk(&self) -> Vec<&Subtask> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let node = out[i];
            out.extend(node.children.iter());
            i += 1;
        }
        out
    }

    pub fn find(&self, id: &str) -> Option<&Subtask> {
        self.walk().into_iter().find(|n| n.id == id)
    }

    /// The location a prediction about this subtask should point at: its
    /// own `location_ref` if set, otherwise its id.
    pub fn location(&self) -> &str {
        self.location_ref.as_deref().unwrap_or(&self.id)
    }
}

/// A piece of the task statement with analyst-assigned prominence scores.
/// Only the relative order of the scores carries meaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoItem {
    pub id: String,
    pub location_ref: String,
    pub saliency: u8,
    pub logic_importance: u8,
    #[serde(default)]
    pub content: String,
    /// Defect wording to emit when this item is overlooked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omission_form: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationFamily {
    /// y = x^p with params [p]
    Power,
    /// y = d^x with params [d]
    Exponential,
    /// y = d^(x+c) with params [d, c]
    AffineExponential,
    /// y = a·x with params [a]
    Linear,
}

impl RelationFamily {
    pub fn evaluate(&self, params: &[f64], x: f64) -> Option<f64> {
        Some(match self {
            RelationFamily::Power => x.powf(*params.first()?),
            RelationFamily::Exponential => params.first()?.powf(x),
            RelationFamily::AffineExponential => params.first()?.powf(x + *params.get(1)?),
            RelationFamily::Linear => *params.first()? * x,
        })
    }

    pub fn arity(&self) -> usize {
        match self {
            RelationFamily::AffineExponential => 2,
            _ => 1,
        }
    }

    /// Renders the concrete law, e.g. `h=2^{n+2}` for an affine
    /// exponential over variables (n, h).
    pub fn render(&self, params: &[f64], var_x: &str, var_y: &str) -> String {
        let p = |i: usize| {
            params
                .get(i)
                .copied()
                .map(format_number)
                .unwrap_or_default()
        };
        match self {
            RelationFamily::Power => format!("{var_y}={var_x}^{}", p(0)),
            RelationFamily::Exponential => format!("{var_y}={}^{var_x}", p(0)),
            RelationFamily::AffineExponential => {
                format!("{var_y}={}^{{{var_x}+{}}}", p(0), p(1))
            }
            RelationFamily::Linear => format!("{var_y}={}{var_x}", p(0)),
        }
    }
}

/// Prints a parameter without a trailing `.0` when it is integral.
pub fn format_number(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}

/// A quantitative relationship the task embeds, given to the programmer
/// only through sample pairs in presentation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub id: String,
    pub samples: Vec<(f64, f64)>,
    pub true_family: RelationFamily,
    pub true_params: Vec<f64>,
    #[serde(default = "default_var_x")]
    pub var_x: String,
    #[serde(default = "default_var_y")]
    pub var_y: String,
    pub location_ref: String,
}

fn default_var_x() -> String {
    "x".into()
}

fn default_var_y() -> String {
    "y".into()
}

impl RelationSpec {
    pub fn true_value(&self, x: f64) -> Option<f64> {
        self.true_family.evaluate(&self.true_params, x)
    }

    pub fn render_true(&self) -> String {
        self.true_family
            .render(&self.true_params, &self.var_x, &self.var_y)
    }
}

/// A self-review context: how many conditions a correct review must cover,
/// in the order the author would walk them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewSpec {
    pub n_conditions: usize,
    pub condition_refs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskModel {
    pub task_id: String,
    #[serde(default)]
    pub spec_lines: Vec<(String, String)>,
    pub root: Subtask,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub info_items: Vec<InfoItem>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review_items: Option<ReviewSpec>,
}

impl TaskModel {
    pub fn spec_line(&self, id: &str) -> Option<&str> {
        self.spec_lines
            .iter()
            .find(|(line_id, _)| line_id == id)
            .map(|(_, text)| text.as_str())
    }

    /// True when `location` names a spec line or a subtask id.
    pub fn resolves(&self, location: &str) -> bool {
        self.spec_line(location).is_some() || self.root.find(location).is_some()
    }
}

const RELATION_TOLERANCE: f64 = 1e-9;

/// Checks every task-model invariant and returns one finding per
/// violation; an empty list means the model is well-formed.
pub fn validate_task(task: &TaskModel) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();

    let mut seen_lines = BTreeSet::new();
    for (line_id, _) in &task.spec_lines {
        if !seen_lines.insert(line_id) {
            findings.push(ValidationFinding::new(
                line_id.clone(),
                "duplicate spec line id",
            ));
        }
    }

    let nodes = task.root.walk();
    let mut seen_ids = BTreeSet::new();
    for node in &nodes {
        if !seen_ids.insert(node.id.as_str()) {
            findings.push(ValidationFinding::new(
                node.id.clone(),
                "duplicate subtask id",
            ));
        }
    }

    for node in &nodes {
        let mains: Vec<&str> = node
            .children
            .iter()
            .filter(|c| c.is_main)
            .map(|c| c.id.as_str())
            .collect();
        if mains.len() > 1 {
            findings.push(ValidationFinding::new(
                node.id.clone(),
                format!("more than one main child: {}", mains.join(", ")),
            ));
        }
        if let Some(location) = &node.location_ref {
            if !task.resolves(location) {
                findings.push(ValidationFinding::new(
                    node.id.clone(),
                    format!("location `{location}` resolves to no spec line or subtask"),
                ));
            }
        }
        for req in &node.required_rules {
            let fields = usize::from(req.rule_id.is_some()) + usize::from(req.features.is_some());
            if fields + usize::from(!req.any_of.is_empty()) != 1 {
                findings.push(ValidationFinding::new(
                    node.id.clone(),
                    "requirement must carry exactly one of rule_id, features, any_of",
                ));
            }
        }
    }

    for item in &task.info_items {
        if item.saliency > 10 || item.logic_importance > 10 {
            findings.push(ValidationFinding::new(
                item.id.clone(),
                "saliency and logic_importance must lie in 0..=10",
            ));
        }
        if !task.resolves(&item.location_ref) {
            findings.push(ValidationFinding::new(
                item.id.clone(),
                format!(
                    "location `{}` resolves to no spec line or subtask",
                    item.location_ref
                ),
            ));
        }
    }

    for rel in &task.relations {
        if rel.samples.len() < 2 {
            findings.push(ValidationFinding::new(
                rel.id.clone(),
                "a relation needs at least two samples",
            ));
        }
        if rel.true_params.len() != rel.true_family.arity() {
            findings.push(ValidationFinding::new(
                rel.id.clone(),
                format!(
                    "family takes {} parameter(s), got {}",
                    rel.true_family.arity(),
                    rel.true_params.len()
                ),
            ));
        } else {
            for &(x, y) in &rel.samples {
                let expected = rel.true_value(x).unwrap_or(f64::NAN);
                let delta = (expected - y).abs();
                if delta.is_nan() || delta > RELATION_TOLERANCE {
                    findings.push(ValidationFinding::new(
                        rel.id.clone(),
                        format!(
                            "sample ({}, {}) inconsistent with true family {} (expected {})",
                            format_number(x),
                            format_number(y),
                            rel.render_true(),
                            format_number(expected),
                        ),
                    ));
                }
            }
        }
        if !task.resolves(&rel.location_ref) {
            findings.push(ValidationFinding::new(
                rel.id.clone(),
                format!(
                    "location `{}` resolves to no spec line or subtask",
                    rel.location_ref
                ),
            ));
        }
    }

    if let Some(review) = &task.review_items {
        if review.n_conditions != review.condition_refs.len() {
            findings.push(ValidationFinding::new(
                "review_items",
                format!(
                    "n_conditions is {} but {} condition_refs are listed",
                    review.n_conditions,
                    review.condition_refs.len()
                ),
            ));
        }
    }

    findings
}

/// Checks knowledge-profile invariants: unique rule and subrule ids, and
/// integration only of encoded subrules.
pub fn validate_profile(profile: &KnowledgeProfile) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    let mut seen = BTreeSet::new();
    for rule in &profile.rules {
        if !seen.insert(rule.id.as_str()) {
            findings.push(ValidationFinding::new(rule.id.clone(), "duplicate rule id"));
        }
        let mut sub_seen = BTreeSet::new();
        for sub in &rule.subrules {
            if !sub_seen.insert(sub.id.as_str()) {
                findings.push(ValidationFinding::new(
                    format!("{}/{}", rule.id, sub.id),
                    "duplicate subrule id",
                ));
            }
            if sub.integrated && !sub.encoded {
                findings.push(ValidationFinding::new(
                    format!("{}/{}", rule.id, sub.id),
                    "a subrule cannot be integrated without being encoded",
                ));
            }
        }
    }
    findings
}

/// The packaged task model document.
pub const BUILTIN_TASK: &str = include_str!("../fixtures/jiong.task");
/// The packaged knowledge-profile document.
pub const BUILTIN_PROFILE: &str = include_str!("../fixtures/novice_c.profile");

/// Parses the packaged task model.
pub fn builtin_task() -> TaskModel {
    serde_json::from_str(BUILTIN_TASK).expect("packaged task model parses")
}

/// Parses the packaged knowledge profile.
pub fn builtin_profile() -> KnowledgeProfile {
    serde_json::from_str(BUILTIN_PROFILE).expect("packaged profile parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(id: &str) -> Subtask {
        Subtask {
            id: id.into(),
            description: String::new(),
            children: Vec::new(),
            is_main: false,
            necessary_for_parent: true,
            required_rules: Vec::new(),
            location_ref: None,
        }
    }

    #[test]
    fn overlap_is_exact_intersection() {
        let a = FeatureSet::new(["array-init", "blank-space"]);
        let b = FeatureSet::new(["array-init", "zero-value"]);
        assert_eq!(feature_overlap(&a, &b), FeatureSet::new(["array-init"]));
        assert_eq!(
            feature_overlap(&a, &FeatureSet::default()),
            FeatureSet::default()
        );
        assert_eq!(feature_overlap(&a, &a), a);
    }

    #[test]
    fn coverage_fraction() {
        let req = FeatureSet::new(["a", "b"]);
        assert_eq!(FeatureSet::new(["a"]).coverage_of(&req), 0.5);
        assert_eq!(FeatureSet::new(["a", "b", "c"]).coverage_of(&req), 1.0);
        assert_eq!(
            FeatureSet::default().coverage_of(&FeatureSet::default()),
            1.0
        );
    }

    #[test]
    fn two_main_children_is_a_finding() {
        let mut root = leaf("root");
        let mut a = leaf("a");
        a.is_main = true;
        let mut b = leaf("b");
        b.is_main = true;
        root.children = vec![a, b];
        let task = TaskModel {
            task_id: "t".into(),
            spec_lines: Vec::new(),
            root,
            info_items: Vec::new(),
            relations: Vec::new(),
            review_items: None,
        };
        let findings = validate_task(&task);
        assert_eq!(findings.len(), 1);
        assert!(findings[0].message.contains("a, b"));
    }

    #[test]
    fn inconsistent_relation_sample_is_a_finding() {
        let task = TaskModel {
            task_id: "t".into(),
            spec_lines: vec![("L1".into(), "text".into())],
            root: leaf("root"),
            info_items: Vec::new(),
            relations: vec![RelationSpec {
                id: "r".into(),
                samples: vec![(1.0, 8.0), (3.0, 24.0)],
                true_family: RelationFamily::AffineExponential,
                true_params: vec![2.0, 2.0],
                var_x: "n".into(),
                var_y: "h".into(),
                location_ref: "L1".into(),
            }],
            review_items: None,
        };
        let findings = validate_task(&task);
        assert_eq!(findings.len(), 1);
        assert!(findings[0].message.contains("(3, 24)"), "{}", findings[0]);
        assert!(
            findings[0].message.contains("expected 32"),
            "{}",
            findings[0]
        );
    }

    #[test]
    fn relation_rendering() {
        let rel = RelationSpec {
            id: "r".into(),
            samples: vec![(1.0, 8.0), (2.0, 16.0)],
            true_family: RelationFamily::AffineExponential,
            true_params: vec![2.0, 2.0],
            var_x: "n".into(),
            var_y: "h".into(),
            location_ref: "L1".into(),
        };
        assert_eq!(rel.render_true(), "h=2^{n+2}");
        assert_eq!(RelationFamily::Linear.render(&[8.0], "n", "h"), "h=8n");
    }

    #[test]
    fn unintegrated_unencoded_subrule_is_a_finding() {
        let profile = KnowledgeProfile {
            profile_id: "p".into(),
            rules: vec![Rule {
                id: "r".into(),
                features: FeatureSet::default(),
                usage_count: 0,
                subrules: vec![SubRule {
                    id: "s".into(),
                    encoded: false,
                    integrated: true,
                    consequence: None,
                }],
                kind: RuleKind::Specific,
                renders_as: None,
            }],
            provenance: None,
        };
        let findings = validate_profile(&profile);
        assert_eq!(findings.len(), 1);
        assert!(findings[0].location.contains("r/s"));
    }

    #[test]
    fn task_json_round_trip() {
        let task = TaskModel {
            task_id: "t".into(),
            spec_lines: vec![("L1".into(), "first line".into())],
            root: leaf("root"),
            info_items: Vec::new(),
            relations: Vec::new(),
            review_items: Some(ReviewSpec {
                n_conditions: 2,
                condition_refs: vec!["c1".into(), "c2".into()],
                location_ref: None,
            }),
        };
        let json = serde_json::to_string_pretty(&task).unwrap();
        let back: TaskModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, task);
    }
}
