//! One checker per built-in error mode. Each enumerates candidate
//! bindings exhaustively, mirrors its mode's trigger conditions, and
//! emits predictions whose rationale operands use the small expression
//! grammar understood by `verify_rationale`.

use std::collections::BTreeMap;

use super::{EngineError, Prediction, RationaleStep};
use crate::catalog::EngineConfig;
use crate::model::{
    format_number, FeatureSet, InfoItem, KnowledgeProfile, RelationFamily, RelationSpec,
    ReviewSpec, Rule, RuleRequirement, Subtask, TaskModel,
};

fn prediction(
    mode_ids: Vec<&str>,
    location: &str,
    form: String,
    bindings: BTreeMap<String, String>,
    rationale: Vec<RationaleStep>,
) -> Prediction {
    Prediction {
        prediction_id: String::new(),
        scenario_ref: String::new(),
        mode_ids: mode_ids.into_iter().map(String::from).collect(),
        defect_location: location.to_string(),
        defect_form: form,
        bindings,
        rationale,
    }
}

fn fill_form(template: &str, a: &str, b: &str) -> String {
    template.replace("{A}", a).replace("{B}", b)
}

/// strong_but_wrong: a familiar rule A captures the context at least as
/// well as the required rule B and dominates it through frequency,
/// zero in-context usage, or strictly narrower conditions.
pub fn check_strong_but_wrong(
    req: &RuleRequirement,
    location: &str,
    kb: &KnowledgeProfile,
    config: &EngineConfig,
) -> Vec<Prediction> {
    let Some(fex) = &req.features else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for a in &kb.rules {
        for b in &kb.rules {
            if a.id == b.id {
                continue;
            }
            let in_a = fex.intersection(&a.features);
            let in_b = fex.intersection(&b.features);
            if in_a.is_empty() || !in_a.is_subset(&in_b) {
                continue;
            }
            let mut branches = Vec::new();
            if config.far_exceeds(a.usage_count, b.usage_count) {
                branches.push(RationaleStep::new(
                    "far_exceeds",
                    vec![format!("usage({})", a.id), format!("usage({})", b.id)],
                ));
            }
            if b.usage_in_context(fex) == 0 {
                branches.push(RationaleStep::new(
                    "eq",
                    vec![format!("usage_in_context({}, {})", b.id, fex), "0".into()],
                ));
            }
            if b.features.is_strict_subset(&a.features) {
                branches.push(RationaleStep::new(
                    "subset",
                    vec![format!("features({})", b.id), format!("features({})", a.id)],
                ));
            }
            if branches.is_empty() {
                continue;
            }
            let template = req
                .defect_form
                .as_deref()
                .unwrap_or("rule {A} applied where rule {B} required");
            let form = fill_form(template, a.render_name(), b.render_name());
            let mut rationale = vec![
                RationaleStep::new(
                    "superset",
                    vec![
                        format!("intersect({}, features({}))", fex, b.id),
                        format!("intersect({}, features({}))", fex, a.id),
                    ],
                ),
                RationaleStep::new(
                    "ne",
                    vec![
                        format!("intersect({}, features({}))", fex, a.id),
                        "∅".into(),
                    ],
                ),
            ];
            rationale.extend(branches);
            let bindings = BTreeMap::from([
                ("Rule A".to_string(), a.id.clone()),
                ("Rule B".to_string(), b.id.clone()),
                ("FeX".to_string(), fex.to_string()),
            ]);
            out.push(prediction(
                vec!["strong_but_wrong"],
                location,
                form,
                bindings,
                rationale,
            ));
        }
    }
    out
}

fn resolve_rule<'a>(
    req: &RuleRequirement,
    kb: &'a KnowledgeProfile,
) -> Result<&'a Rule, EngineError> {
    if let Some(id) = &req.rule_id {
        return kb
            .rule(id)
            .ok_or_else(|| EngineError::MissingRule(req.describe()));
    }
    let Some(features) = &req.features else {
        return Err(EngineError::MissingRule(req.describe()));
    };
    let mut best: Option<(&Rule, f64)> = None;
    for rule in &kb.rules {
        let overlap = rule.features.intersection(features);
        if overlap.is_empty() {
            continue;
        }
        let coverage = features.coverage_of(&rule.features);
        let better = match best {
            None => true,
            Some((_, best_cov)) => coverage > best_cov,
        };
        if better {
            best = Some((rule, coverage));
        }
    }
    best.map(|(rule, _)| rule)
        .ok_or_else(|| EngineError::MissingRule(req.describe()))
}

/// encoding_deficiency: the nearest known version of the required rule
/// omits or fails to integrate some of its conditions; each deficient
/// condition yields one prediction.
pub fn check_encoding_deficiency(
    req: &RuleRequirement,
    location: &str,
    kb: &KnowledgeProfile,
) -> Result<Vec<Prediction>, EngineError> {
    if !req.any_of.is_empty() {
        return Ok(Vec::new());
    }
    let rule = resolve_rule(req, kb)?;
    let mut out = Vec::new();
    for sub in &rule.subrules {
        if sub.encoded && sub.integrated {
            continue;
        }
        let form = sub.consequence.clone().unwrap_or_else(|| {
            format!(
                "condition `{}` of rule `{}` is not applied",
                sub.id, rule.id
            )
        });
        let rationale = vec![
            RationaleStep::new("subrule_deficient", vec![rule.id.clone(), sub.id.clone()]),
            RationaleStep::new("ne", vec![format!("{{{}}}", sub.id), "∅".into()]),
        ];
        let bindings = BTreeMap::from([
            ("Rule X".to_string(), req.describe()),
            ("Rule X~".to_string(), rule.id.clone()),
        ]);
        out.push(prediction(
            vec!["encoding_deficiency"],
            location,
            form,
            bindings,
            rationale,
        ));
    }
    Ok(out)
}

pub(super) fn requirement_satisfied(
    req: &RuleRequirement,
    kb: &KnowledgeProfile,
    config: &EngineConfig,
) -> bool {
    let covered = |features: &FeatureSet| {
        kb.rules
            .iter()
            .any(|rule| rule.features.coverage_of(features) >= config.overlap_threshold)
    };
    if let Some(id) = &req.rule_id {
        return kb.rule(id).is_some();
    }
    if let Some(features) = &req.features {
        return covered(features);
    }
    req.any_of.iter().any(covered)
}

/// lack_of_knowledge: a required rule (or every alternative of an
/// either/or requirement) is absent from the knowledge base.
pub fn check_lack_of_knowledge(
    task: &TaskModel,
    kb: &KnowledgeProfile,
    config: &EngineConfig,
) -> Vec<Prediction> {
    let mut out = Vec::new();
    for node in task.root.walk() {
        for req in &node.required_rules {
            if requirement_satisfied(req, kb, config) {
                continue;
            }
            let form = req.defect_form.clone().unwrap_or_else(|| {
                format!("step requiring {} is missing or wrong", req.describe())
            });
            let rationale = vec![RationaleStep::new(
                "does_not_exist_in_the_persons_knowledge_base",
                vec![node.id.clone(), req.describe()],
            )];
            let bindings = BTreeMap::from([("Rule X".to_string(), req.describe())]);
            out.push(prediction(
                vec!["lack_of_knowledge"],
                node.location(),
                form,
                bindings,
                rationale,
            ));
        }
    }
    out
}

pub(super) fn linear_coefficient(prefix: &[(f64, f64)]) -> Option<f64> {
    let sum_xx: f64 = prefix.iter().map(|(x, _)| x * x).sum();
    if sum_xx == 0.0 {
        return None;
    }
    let sum_xy: f64 = prefix.iter().map(|(x, y)| x * y).sum();
    Some(sum_xy / sum_xx)
}

/// exponential_difficulty: a power or exponential relation, seen through
/// only a prefix of its samples, admits an exact linear fit that later
/// diverges from the true model. Shallow sampling is itself a biased
/// review of the evidence, so both mode ids are attached.
pub fn check_exponential_difficulty(
    rel: &RelationSpec,
    config: &EngineConfig,
) -> Result<Vec<Prediction>, EngineError> {
    if rel.true_family == RelationFamily::Linear {
        return Ok(Vec::new());
    }
    let mut out: Vec<Prediction> = Vec::new();
    for k in config.review_depths.depths(rel.samples.len()) {
        let prefix = &rel.samples[..k];
        let Some(a) = linear_coefficient(prefix) else {
            return Err(EngineError::DegenerateSamples(rel.id.clone()));
        };
        let fits = prefix
            .iter()
            .all(|(x, y)| (a * x - y).abs() <= config.fit_tolerance);
        if !fits {
            continue;
        }
        let divergent = rel.samples[k..].iter().find_map(|(x, _)| {
            let truth = rel.true_value(*x)?;
            ((a * x - truth).abs() > config.fit_tolerance).then_some((*x, truth))
        });
        let Some((x, truth)) = divergent else {
            continue;
        };
        let wrong = RelationFamily::Linear.render(&[a], &rel.var_x, &rel.var_y);
        let form = format!(
            "the relationship between {} and {} is modeled wrongly as {}, instead of {}",
            rel.var_y,
            rel.var_x,
            wrong,
            rel.render_true()
        );
        if out.iter().any(|p| p.defect_form == form) {
            continue;
        }
        let family_literal = match rel.true_family {
            RelationFamily::Power => "y = x^p",
            _ => "y = d^x",
        };
        let rationale = vec![
            RationaleStep::new(
                "the_actual_relation_belongs_to_the_model_family",
                vec![rel.id.clone(), family_literal.to_string()],
            ),
            RationaleStep::new(
                "fits_linear_prefix",
                vec![rel.id.clone(), k.to_string(), format_number(a)],
            ),
            RationaleStep::new(
                "diverges_at",
                vec![
                    rel.id.clone(),
                    format_number(x),
                    format_number(a * x),
                    format_number(truth),
                ],
            ),
        ];
        let bindings = BTreeMap::from([("relation".to_string(), rel.id.clone())]);
        out.push(prediction(
            vec!["exponential_difficulty", "biased_review"],
            &rel.location_ref,
            form,
            bindings,
            rationale,
        ));
    }
    Ok(out)
}

/// selectivity: a louder but less load-bearing information item draws
/// attention away from a quieter, more important one, whose requirement
/// is then omitted.
pub fn check_selectivity(items: &[InfoItem]) -> Vec<Prediction> {
    let mut out: Vec<Prediction> = Vec::new();
    for overlooked in items {
        let Some(distractor) = items.iter().find(|other| {
            other.id != overlooked.id
                && other.saliency > overlooked.saliency
                && overlooked.logic_importance > other.logic_importance
        }) else {
            continue;
        };
        let form = overlooked.omission_form.clone().unwrap_or_else(|| {
            format!(
                "the requirement carried by {} is omitted from the solution",
                overlooked.id
            )
        });
        let rationale = vec![
            RationaleStep::new(
                "gt",
                vec![
                    format!("saliency({})", distractor.id),
                    format!("saliency({})", overlooked.id),
                ],
            ),
            RationaleStep::new(
                "gt",
                vec![
                    format!("logic_importance({})", overlooked.id),
                    format!("logic_importance({})", distractor.id),
                ],
            ),
        ];
        let bindings = BTreeMap::from([
            ("T_i".to_string(), overlooked.id.clone()),
            ("T_j".to_string(), distractor.id.clone()),
        ]);
        out.push(prediction(
            vec!["selectivity"],
            &overlooked.location_ref,
            form,
            bindings,
            rationale,
        ));
    }
    out
}

/// biased_review: a shallow self-review examines only the first k of N
/// conditions; every unexamined condition can carry a surviving defect.
pub fn check_biased_review(review: &ReviewSpec, config: &EngineConfig) -> Vec<Prediction> {
    let n = review.n_conditions;
    let work = review
        .location_ref
        .clone()
        .unwrap_or_else(|| "self-review".to_string());
    let mut out: Vec<Prediction> = Vec::new();
    for k in config.review_depths.depths(n) {
        let unexamined: Vec<String> = review.condition_refs[k..].to_vec();
        let form = format!(
            "conditions not verified by self-review: {}",
            unexamined.join(", ")
        );
        if out.iter().any(|p| p.defect_form == form) {
            continue;
        }
        let rationale = vec![
            RationaleStep::new("is_believed_to_be_easy_or_familiar", vec![work.clone()]),
            RationaleStep::new("lt", vec![k.to_string(), n.to_string()]),
            RationaleStep::new(
                "a_defect_lies_in_an_unexamined_condition",
                vec![unexamined.join(", ")],
            ),
        ];
        let bindings = BTreeMap::from([
            ("N".to_string(), n.to_string()),
            ("n".to_string(), k.to_string()),
        ]);
        out.push(prediction(
            vec!["biased_review"],
            &work,
            form,
            bindings,
            rationale,
        ));
    }
    out
}

/// post_completion: once the main subtask of a parent is done the goal
/// feels complete, so a trailing subtask not needed for the main one is
/// dropped.
pub fn check_post_completion(root: &Subtask) -> Vec<Prediction> {
    let mut out = Vec::new();
    for parent in root.walk() {
        let Some(main) = parent.children.iter().find(|c| c.is_main) else {
            continue;
        };
        let Some(last) = parent.children.last() else {
            continue;
        };
        if last.id == main.id || last.necessary_for_parent {
            continue;
        }
        let label = if last.description.is_empty() {
            last.id.clone()
        } else {
            last.description.clone()
        };
        let rationale = vec![
            RationaleStep::new(
                "is_the_main_subtask_of",
                vec![main.id.clone(), parent.id.clone()],
            ),
            RationaleStep::new(
                "is_not_necessary_for_completing",
                vec![last.id.clone(), main.id.clone()],
            ),
            RationaleStep::new(
                "is_the_last_subtask_of",
                vec![last.id.clone(), parent.id.clone()],
            ),
        ];
        let bindings = BTreeMap::from([
            ("Task A".to_string(), parent.id.clone()),
            ("Task A.1".to_string(), main.id.clone()),
            ("Task A.2".to_string(), last.id.clone()),
        ]);
        out.push(prediction(
            vec!["post_completion"],
            last.location(),
            format!("{} is missing", label),
            bindings,
            rationale,
        ));
    }
    out
}
