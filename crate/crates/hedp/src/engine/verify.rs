//! Independent re-evaluation of rationale traces. Operands are either
//! literals (numbers, `{a, b}` sets, `∅`) or calls over the model —
//! `saliency(id)`, `logic_importance(id)`, `usage(id)`, `features(id)`,
//! `usage_in_context(id, set)`, `intersect(x, y)` — so every recorded
//! step can be recomputed from the task and profile it was derived from.

use std::collections::BTreeSet;

use super::checkers::requirement_satisfied;
use super::{Prediction, RationaleStep};
use crate::catalog::EngineConfig;
use crate::model::{KnowledgeProfile, RelationFamily, TaskModel};

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(f64),
    Set(BTreeSet<String>),
    Text(String),
}

impl Value {
    fn num(&self) -> Result<f64, String> {
        match self {
            Value::Num(n) => Ok(*n),
            other => Err(format!("expected a number, got {other:?}")),
        }
    }

    fn set(&self) -> Result<&BTreeSet<String>, String> {
        match self {
            Value::Set(s) => Ok(s),
            other => Err(format!("expected a set, got {other:?}")),
        }
    }
}

fn split_top_level(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '{' => {
                depth += 1;
                current.push(ch);
            }
            ')' | '}' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

fn parse_call(text: &str) -> Option<(&str, Vec<String>)> {
    let open = text.find('(')?;
    if !text.ends_with(')') {
        return None;
    }
    let name = &text[..open];
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_lowercase() || c == '_') {
        return None;
    }
    Some((name, split_top_level(&text[open + 1..text.len() - 1])))
}

fn eval_operand(operand: &str, task: &TaskModel, kb: &KnowledgeProfile) -> Result<Value, String> {
    let operand = operand.trim();
    if operand == "∅" {
        return Ok(Value::Set(BTreeSet::new()));
    }
    if let Some(inner) = operand.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let tags = inner
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect();
        return Ok(Value::Set(tags));
    }
    if let Ok(n) = operand.parse::<f64>() {
        return Ok(Value::Num(n));
    }
    if let Some((name, args)) = parse_call(operand) {
        let arg = |i: usize| -> Result<&String, String> {
            args.get(i)
                .ok_or_else(|| format!("`{operand}`: missing argument {i}"))
        };
        let info = |id: &str| {
            task.info_items
                .iter()
                .find(|item| item.id == id)
                .ok_or_else(|| format!("no information item `{id}` in the task"))
        };
        let rule = |id: &str| {
            kb.rule(id)
                .ok_or_else(|| format!("no rule `{id}` in the knowledge base"))
        };
        return match name {
            "saliency" => Ok(Value::Num(f64::from(info(arg(0)?)?.saliency))),
            "logic_importance" => Ok(Value::Num(f64::from(info(arg(0)?)?.logic_importance))),
            "usage" => Ok(Value::Num(rule(arg(0)?)?.usage_count as f64)),
            "features" => Ok(Value::Set(rule(arg(0)?)?.features.tags.clone())),
            "usage_in_context" => {
                let r = rule(arg(0)?)?;
                let context = eval_operand(arg(1)?, task, kb)?;
                let tags = context.set()?.clone();
                let context = crate::model::FeatureSet { tags };
                Ok(Value::Num(r.usage_in_context(&context) as f64))
            }
            "intersect" => {
                let left = eval_operand(arg(0)?, task, kb)?;
                let right = eval_operand(arg(1)?, task, kb)?;
                Ok(Value::Set(
                    left.set()?.intersection(right.set()?).cloned().collect(),
                ))
            }
            _ => Err(format!("unknown operand function `{name}`")),
        };
    }
    Ok(Value::Text(operand.to_string()))
}

fn evaluate_step(
    step: &RationaleStep,
    task: &TaskModel,
    kb: &KnowledgeProfile,
    config: &EngineConfig,
) -> Result<bool, String> {
    let operand = |i: usize| -> Result<&String, String> {
        step.operands
            .get(i)
            .ok_or_else(|| format!("`{}`: missing operand {i}", step.predicate))
    };
    let value = |i: usize| -> Result<Value, String> { eval_operand(operand(i)?, task, kb) };
    let find_node = |id: &str| {
        task.root
            .find(id)
            .ok_or_else(|| format!("no subtask `{id}` in the task"))
    };
    fn find_relation<'a>(
        task: &'a TaskModel,
        id: &str,
    ) -> Result<&'a crate::model::RelationSpec, String> {
        task.relations
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| format!("no relation `{id}` in the task"))
    }
    match step.predicate.as_str() {
        "superset" => Ok(value(1)?.set()?.is_subset(value(0)?.set()?)),
        "subset" => {
            let (a, b) = (value(0)?, value(1)?);
            Ok(a.set()?.is_subset(b.set()?) && a.set()? != b.set()?)
        }
        "eq" => Ok(value(0)? == value(1)?),
        "ne" => Ok(value(0)? != value(1)?),
        "gt" => Ok(value(0)?.num()? > value(1)?.num()?),
        "lt" => Ok(value(0)?.num()? < value(1)?.num()?),
        "far_exceeds" => {
            let (a, b) = (value(0)?.num()?, value(1)?.num()?);
            Ok(a >= config.strength_ratio * b.max(1.0))
        }
        "subrule_deficient" => {
            let (rule_id, sub_id) = (operand(0)?, operand(1)?);
            let rule = kb
                .rule(rule_id)
                .ok_or_else(|| format!("no rule `{rule_id}` in the knowledge base"))?;
            let sub = rule
                .subrules
                .iter()
                .find(|s| &s.id == sub_id)
                .ok_or_else(|| format!("rule `{rule_id}` has no condition `{sub_id}`"))?;
            Ok(!(sub.encoded && sub.integrated))
        }
        "does_not_exist_in_the_persons_knowledge_base" => {
            let (node_id, desc) = (operand(0)?, operand(1)?);
            let node = find_node(node_id)?;
            let req = node
                .required_rules
                .iter()
                .find(|r| &r.describe() == desc)
                .ok_or_else(|| format!("subtask `{node_id}` has no requirement `{desc}`"))?;
            Ok(!requirement_satisfied(req, kb, config))
        }
        "the_actual_relation_belongs_to_the_model_family" => {
            let rel = find_relation(task, operand(0)?)?;
            Ok(match operand(1)?.as_str() {
                "y = x^p" => rel.true_family == RelationFamily::Power,
                "y = d^x" => matches!(
                    rel.true_family,
                    RelationFamily::Exponential | RelationFamily::AffineExponential
                ),
                _ => false,
            })
        }
        "fits_linear_prefix" => {
            let rel = find_relation(task, operand(0)?)?;
            let k_text = operand(1)?;
            let k: usize = k_text
                .parse()
                .map_err(|_| format!("`{k_text}` is not a prefix length"))?;
            let claimed = value(2)?.num()?;
            if k == 0 || k > rel.samples.len() {
                return Ok(false);
            }
            let prefix = &rel.samples[..k];
            let Some(a) = super::checkers::linear_coefficient(prefix) else {
                return Ok(false);
            };
            Ok((a - claimed).abs() <= 1e-9
                && prefix
                    .iter()
                    .all(|(x, y)| (a * x - y).abs() <= config.fit_tolerance))
        }
        "diverges_at" => {
            let rel = find_relation(task, operand(0)?)?;
            let x = value(1)?.num()?;
            let wrong = value(2)?.num()?;
            let claimed_truth = value(3)?.num()?;
            let Some(truth) = rel.true_value(x) else {
                return Ok(false);
            };
            Ok((truth - claimed_truth).abs() <= 1e-9
                && (wrong - truth).abs() > config.fit_tolerance)
        }
        "is_the_main_subtask_of" => {
            let child_id = operand(0)?;
            let parent = find_node(operand(1)?)?;
            Ok(parent
                .children
                .iter()
                .any(|c| &c.id == child_id && c.is_main))
        }
        "is_not_necessary_for_completing" => {
            let sub = find_node(operand(0)?)?;
            let main = find_node(operand(1)?)?;
            let siblings = task.root.walk().into_iter().any(|p| {
                p.children.iter().any(|c| c.id == sub.id)
                    && p.children.iter().any(|c| c.id == main.id)
            });
            Ok(siblings && !sub.necessary_for_parent && main.is_main)
        }
        "is_the_last_subtask_of" => {
            let parent = find_node(operand(1)?)?;
            Ok(parent.children.last().map(|c| &c.id) == Some(operand(0)?))
        }
        "is_believed_to_be_easy_or_familiar" => Ok(task.review_items.is_some()),
        "a_defect_lies_in_an_unexamined_condition" => {
            let Some(review) = &task.review_items else {
                return Ok(false);
            };
            let refs: Vec<&str> = operand(0)?.split(", ").collect();
            Ok(!refs.is_empty()
                && refs
                    .iter()
                    .all(|r| review.condition_refs.iter().any(|c| c == r)))
        }
        other => Err(format!("unknown rationale predicate `{other}`")),
    }
}

/// Recomputes every rationale step of a prediction from the task, profile
/// and config, failing on the first step whose recorded truth value does
/// not reproduce.
pub fn verify_rationale(
    prediction: &Prediction,
    task: &TaskModel,
    kb: &KnowledgeProfile,
    config: &EngineConfig,
) -> Result<(), String> {
    for (index, step) in prediction.rationale.iter().enumerate() {
        let holds = evaluate_step(step, task, kb, config).map_err(|e| {
            format!(
                "{}: rationale step {} ({}): {e}",
                prediction.prediction_id,
                index + 1,
                step.predicate
            )
        })?;
        if holds != step.holds {
            return Err(format!(
                "{}: rationale step {} ({}) recorded holds={} but re-evaluates to {}",
                prediction.prediction_id,
                index + 1,
                step.predicate,
                step.holds,
                holds
            ));
        }
    }
    Ok(())
}
