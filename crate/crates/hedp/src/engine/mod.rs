//! Prediction engine: evaluates catalog error modes against a task model
//! and knowledge profile, enumerating variable bindings exhaustively and
//! emitting defect predictions with auditable rationale traces.

mod checkers;
mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkers::{
    check_biased_review, check_encoding_deficiency, check_exponential_difficulty,
    check_lack_of_knowledge, check_post_completion, check_selectivity, check_strong_but_wrong,
};
pub use verify::verify_rationale;

use crate::catalog::{EngineConfig, ErrorMode};
use crate::model::{validate_profile, validate_task, KnowledgeProfile, TaskModel};
use crate::ValidationFinding;

/// One satisfied trigger condition: a registered predicate applied to
/// rendered operands. `verify_rationale` re-evaluates these against the
/// original inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationaleStep {
    pub predicate: String,
    pub operands: Vec<String>,
    pub holds: bool,
}

impl RationaleStep {
    pub fn new<S: Into<String>>(predicate: S, operands: Vec<String>) -> Self {
        Self {
            predicate: predicate.into(),
            operands,
            holds: true,
        }
    }
}

/// A forecast defect: where it will appear, what it will look like, and
/// why the engine believes so.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub prediction_id: String,
    pub scenario_ref: String,
    pub mode_ids: Vec<String>,
    pub defect_location: String,
    pub defect_form: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, String>,
    pub rationale: Vec<RationaleStep>,
}

/// The engine's full output for one (task, profile, config) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub task_id: String,
    pub profile_id: String,
    pub config: EngineConfig,
    pub predictions: Vec<Prediction>,
}

impl PredictionReport {
    pub fn scenario_refs(&self) -> Vec<&str> {
        self.predictions
            .iter()
            .map(|p| p.scenario_ref.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("no knowledge-base rule overlaps requirement `{0}`")]
    MissingRule(String),
    #[error("relation `{0}` has a sample prefix with every x = 0; no linear fit exists")]
    DegenerateSamples(String),
    #[error("inputs failed validation: {}", findings_summary(.0))]
    InvalidInputs(Vec<ValidationFinding>),
}

fn findings_summary(findings: &[ValidationFinding]) -> String {
    let lines: Vec<String> = findings.iter().map(|f| f.to_string()).collect();
    lines.join("; ")
}

/// Runs every catalog mode against the task and profile, deduplicates by
/// (defect_location, defect_form), and assigns ES-style scenario refs in
/// the order of the final deterministic sort.
pub fn predict_all(
    catalog: &[ErrorMode],
    task: &TaskModel,
    kb: &KnowledgeProfile,
    config: &EngineConfig,
) -> Result<PredictionReport, EngineError> {
    let mut findings = validate_task(task);
    findings.extend(validate_profile(kb));
    findings.extend(config.validate());
    if !findings.is_empty() {
        return Err(EngineError::InvalidInputs(findings));
    }

    let mut raw: Vec<Prediction> = Vec::new();
    for mode in catalog {
        match mode.mode_id.as_str() {
            "strong_but_wrong" => {
                for node in task.root.walk() {
                    for req in &node.required_rules {
                        raw.extend(check_strong_but_wrong(req, node.location(), kb, config));
                    }
                }
            }
            "encoding_deficiency" => {
                for node in task.root.walk() {
                    for req in &node.required_rules {
                        // A requirement nothing in the knowledge base
                        // overlaps belongs to lack_of_knowledge instead.
                        if let Ok(predictions) = check_encoding_deficiency(req, node.location(), kb)
                        {
                            raw.extend(predictions);
                        }
                    }
                }
            }
            "lack_of_knowledge" => raw.extend(check_lack_of_knowledge(task, kb, config)),
            "exponential_difficulty" => {
                for rel in &task.relations {
                    raw.extend(check_exponential_difficulty(rel, config)?);
                }
            }
            "selectivity" => raw.extend(check_selectivity(&task.info_items)),
            "biased_review" => {
                if let Some(review) = &task.review_items {
                    raw.extend(check_biased_review(review, config));
                }
            }
            "post_completion" => raw.extend(check_post_completion(&task.root)),
            // Catalog entries without a mechanized checker (user-supplied
            // modes) do not fire.
            _ => {}
        }
    }

    let mut merged: Vec<Prediction> = Vec::new();
    for prediction in raw {
        let key = (
            prediction.defect_location.clone(),
            prediction.defect_form.clone(),
        );
        match merged
            .iter_mut()
            .find(|p| (p.defect_location.clone(), p.defect_form.clone()) == key)
        {
            Some(existing) => {
                let new_modes: Vec<String> = prediction
                    .mode_ids
                    .iter()
                    .filter(|m| !existing.mode_ids.contains(m))
                    .cloned()
                    .collect();
                if !new_modes.is_empty() {
                    existing.mode_ids.extend(new_modes);
                    for step in prediction.rationale {
                        if !existing.rationale.contains(&step) {
                            existing.rationale.push(step);
                        }
                    }
                }
            }
            None => merged.push(prediction),
        }
    }

    merged.sort_by(|a, b| {
        (&a.defect_location, &a.mode_ids[0], &a.defect_form).cmp(&(
            &b.defect_location,
            &b.mode_ids[0],
            &b.defect_form,
        ))
    });
    for (index, prediction) in merged.iter_mut().enumerate() {
        prediction.scenario_ref = format!("ES{}", index + 1);
        prediction.prediction_id = format!("p{}", index + 1);
    }

    Ok(PredictionReport {
        task_id: task.task_id.clone(),
        profile_id: kb.profile_id.clone(),
        config: config.clone(),
        predictions: merged,
    })
}

/// Renders the report as one text block per prediction: scenario ref,
/// modes, location, form, bindings, and rationale lines.
pub fn render_text(report: &PredictionReport) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "Task {} against profile {}: {} prediction(s)",
        report.task_id,
        report.profile_id,
        report.predictions.len()
    );
    for prediction in &report.predictions {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{} ({})",
            prediction.scenario_ref,
            prediction.mode_ids.join(", ")
        );
        let _ = writeln!(out, "  location: {}", prediction.defect_location);
        let _ = writeln!(out, "  form:     {}", prediction.defect_form);
        for (name, value) in &prediction.bindings {
            let _ = writeln!(out, "  binding:  {name} = {value}");
        }
        let _ = writeln!(out, "  rationale:");
        for step in &prediction.rationale {
            let _ = writeln!(out, "    {}({})", step.predicate, step.operands.join(", "));
        }
    }
    out
}

/// Renders the prediction list as a flat CSV table; mode ids are
/// semicolon-joined within their cell.
pub fn render_csv(report: &PredictionReport) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "prediction_id",
            "scenario_ref",
            "mode_ids",
            "defect_location",
            "defect_form",
        ])
        .expect("csv header");
    for prediction in &report.predictions {
        writer
            .write_record([
                prediction.prediction_id.as_str(),
                prediction.scenario_ref.as_str(),
                &prediction.mode_ids.join(";"),
                prediction.defect_location.as_str(),
                prediction.defect_form.as_str(),
            ])
            .expect("csv row");
    }
    String::from_utf8(writer.into_inner().expect("csv buffer")).expect("csv utf8")
}
