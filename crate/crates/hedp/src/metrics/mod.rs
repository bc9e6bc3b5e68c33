//! Prediction-quality metrics: compares which defects a prediction report
//! covers against what programmers actually introduced, and how long those
//! defects survived debugging.
//!
//! All ratios are computed from exact integer counts and divided once;
//! rounding happens only in the text and CSV renderers (one decimal for
//! percentages, two for ratios).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, DebugHistory};
use crate::engine::PredictionReport;
use crate::ValidationFinding;

/// Which defect each prediction covers: defect id → the covering prediction's
/// scenario reference, or `None` for defects no prediction accounts for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchMap {
    pub pairs: BTreeMap<String, Option<String>>,
}

impl MatchMap {
    /// Builds the map from the `predicted_by` column of the defect table.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let pairs = corpus
            .defects
            .iter()
            .map(|d| (d.defect_id.clone(), d.predicted_by.clone()))
            .collect();
        MatchMap { pairs }
    }

    pub fn is_predicted(&self, defect_id: &str) -> bool {
        self.pairs
            .get(defect_id)
            .is_some_and(|scenario| scenario.is_some())
    }

    pub fn predicted_ids(&self) -> BTreeSet<String> {
        self.pairs
            .iter()
            .filter(|(_, scenario)| scenario.is_some())
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Number of distinct predictions referenced by the map.
    pub fn predictions_total(&self) -> usize {
        self.pairs.values().flatten().collect::<BTreeSet<_>>().len()
    }

    /// A copy with one defect's match removed.
    pub fn without(&self, defect_id: &str) -> MatchMap {
        let mut pairs = self.pairs.clone();
        if let Some(entry) = pairs.get_mut(defect_id) {
            *entry = None;
        }
        MatchMap { pairs }
    }

    /// Checks that every defect id exists in the corpus and every scenario
    /// reference exists in the prediction report.
    pub fn validate(&self, corpus: &Corpus, report: &PredictionReport) -> Vec<ValidationFinding> {
        let mut findings = Vec::new();
        let known_refs = report.scenario_refs();
        for (defect_id, scenario) in &self.pairs {
            if corpus.defect(defect_id).is_none() {
                findings.push(ValidationFinding::new(
                    format!("match `{defect_id}`"),
                    "defect does not appear in the defect table",
                ));
            }
            if let Some(scenario_ref) = scenario {
                if !known_refs.contains(&scenario_ref.as_str()) {
                    findings.push(ValidationFinding::new(
                        format!("match `{defect_id}`"),
                        format!(
                            "scenario reference `{scenario_ref}` is not in the prediction report"
                        ),
                    ));
                }
            }
        }
        findings
    }
}

/// Which defects a coverage figure ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Every defect in the table.
    All,
    /// Only defects observed in at least two programmers' histories.
    Coincident,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("defect `{0}` does not appear in the defect table")]
    UnknownDefect(String),
    #[error("defect `{defect_id}` was never present in {place}")]
    DefectNotPresent { defect_id: String, place: String },
    #[error("no {0} to aggregate over")]
    EmptyScope(&'static str),
}

fn scope_ids(corpus: &Corpus, scope: Scope) -> BTreeSet<String> {
    match scope {
        Scope::All => corpus.defects.iter().map(|d| d.defect_id.clone()).collect(),
        Scope::Coincident => corpus.coincident_defects(),
    }
}

/// Percentage of participants whose history ever contained the defect.
pub fn rate_of_occurrence(corpus: &Corpus, defect_id: &str) -> Result<f64, MetricsError> {
    let occurrence = corpus
        .occurrence(defect_id)
        .map_err(|_| MetricsError::UnknownDefect(defect_id.to_string()))?;
    Ok(100.0 * occurrence as f64 / corpus.participants_total as f64)
}

/// Percentage of scope defects covered by a prediction.
pub fn coverage_unique(
    matches: &MatchMap,
    corpus: &Corpus,
    scope: Scope,
) -> Result<f64, MetricsError> {
    let ids = scope_ids(corpus, scope);
    if ids.is_empty() {
        return Err(MetricsError::EmptyScope("defects in scope"));
    }
    let predicted = ids.iter().filter(|id| matches.is_predicted(id)).count();
    Ok(100.0 * predicted as f64 / ids.len() as f64)
}

/// Percentage of scope defect occurrences covered by a prediction.
pub fn coverage_occurrences(
    matches: &MatchMap,
    corpus: &Corpus,
    scope: Scope,
) -> Result<f64, MetricsError> {
    let ids = scope_ids(corpus, scope);
    let mut covered = 0usize;
    let mut total = 0usize;
    for id in &ids {
        let occurrence = corpus.occurrence(id).unwrap_or(0);
        total += occurrence;
        if matches.is_predicted(id) {
            covered += occurrence;
        }
    }
    if total == 0 {
        return Err(MetricsError::EmptyScope("defect occurrences in scope"));
    }
    Ok(100.0 * covered as f64 / total as f64)
}

/// Versions the defect was present in and the length of the window from its
/// introduction through the final version.
pub fn persistence_parts(
    history: &DebugHistory,
    defect_id: &str,
) -> Result<(u64, u64), MetricsError> {
    let not_present = || MetricsError::DefectNotPresent {
        defect_id: defect_id.to_string(),
        place: format!("history `{}`", history.programmer_id),
    };
    let intro = history.introduced_at(defect_id).ok_or_else(not_present)?;
    let total = history.total_versions();
    if intro > total {
        return Err(not_present());
    }
    let window = (total - intro + 1) as u64;
    let present = match history.fixed_at(defect_id) {
        Some(fix) if fix <= intro => return Err(not_present()),
        Some(fix) => (fix - intro) as u64,
        None => window,
    };
    Ok((present, window))
}

/// Fraction of the versions since its introduction in which the defect
/// remained present. Always in (0, 1].
pub fn persistence(history: &DebugHistory, defect_id: &str) -> Result<f64, MetricsError> {
    let (present, window) = persistence_parts(history, defect_id)?;
    Ok(present as f64 / window as f64)
}

/// Mean persistence of the defect over every history in which it appeared.
pub fn degree_of_persistence(corpus: &Corpus, defect_id: &str) -> Result<f64, MetricsError> {
    if corpus.defect(defect_id).is_none() {
        return Err(MetricsError::UnknownDefect(defect_id.to_string()));
    }
    let values: Vec<f64> = corpus
        .histories
        .iter()
        .filter_map(|h| persistence(h, defect_id).ok())
        .collect();
    if values.is_empty() {
        return Err(MetricsError::DefectNotPresent {
            defect_id: defect_id.to_string(),
            place: "any history".to_string(),
        });
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Mean degree of persistence over a set of predicted defects.
pub fn appd(corpus: &Corpus, predicted: &BTreeSet<String>) -> Result<f64, MetricsError> {
    if predicted.is_empty() {
        return Err(MetricsError::EmptyScope("predicted defects"));
    }
    let mut sum = 0.0;
    for id in predicted {
        sum += degree_of_persistence(corpus, id)?;
    }
    Ok(sum / predicted.len() as f64)
}

/// Per-defect persistence aggregates: how many programmers hit the defect,
/// how many versions it survived in total, and the spread of its persistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceRow {
    pub defect_id: String,
    pub predicted: bool,
    pub occurrence: usize,
    pub versions_present: u64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

fn persistence_row(
    corpus: &Corpus,
    defect_id: &str,
    predicted: bool,
) -> Result<PersistenceRow, MetricsError> {
    let mut ratios = Vec::new();
    let mut versions_present = 0u64;
    for history in &corpus.histories {
        if let Ok((present, window)) = persistence_parts(history, defect_id) {
            versions_present += present;
            ratios.push(present as f64 / window as f64);
        }
    }
    if ratios.is_empty() {
        return Err(MetricsError::DefectNotPresent {
            defect_id: defect_id.to_string(),
            place: "any history".to_string(),
        });
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(PersistenceRow {
        defect_id: defect_id.to_string(),
        predicted,
        occurrence: ratios.len(),
        versions_present,
        min,
        max,
        mean,
    })
}

/// Per-programmer prediction accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgrammerRow {
    pub programmer_id: String,
    pub defects_present: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// False discovery rate as a percentage.
    pub fdr: f64,
    /// False negative rate as a percentage.
    pub fnr: f64,
    /// Fraction of this programmer's versions the predictions would have
    /// saved.
    pub sde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgrammerStats {
    pub rows: Vec<ProgrammerRow>,
    pub predictions_total: usize,
    /// Mean per-programmer coverage (percentage) over programmers with at
    /// least one defect; `None` when nobody introduced a defect.
    pub coverage_per_programmer: Option<f64>,
    pub avg_fdr: f64,
    pub avg_fnr: f64,
    pub avg_defects_present: f64,
}

/// Computes per-programmer accuracy rows and their averages.
///
/// With `P` = number of distinct predictions: a programmer's true positives
/// are their present-and-predicted defects, false negatives the present but
/// unpredicted ones, and false positives the `P - TP` predictions that did
/// not show up. Zero-defect programmers therefore score FDR 100% and FNR 0%,
/// and both averages run over all programmers.
pub fn per_programmer_stats(matches: &MatchMap, corpus: &Corpus) -> ProgrammerStats {
    let predictions_total = matches.predictions_total();
    let mut rows = Vec::new();
    let mut coverage_values = Vec::new();
    let mut fdr_sum = 0.0;
    let mut fnr_sum = 0.0;
    let mut present_sum = 0usize;
    for history in &corpus.histories {
        let present = history.defects_ever_present();
        let true_positives = present.iter().filter(|id| matches.is_predicted(id)).count();
        let false_negatives = present.len() - true_positives;
        let false_positives = predictions_total.saturating_sub(true_positives);
        let fdr = if false_positives + true_positives == 0 {
            0.0
        } else {
            100.0 * false_positives as f64 / (false_positives + true_positives) as f64
        };
        let fnr = if false_negatives + true_positives == 0 {
            0.0
        } else {
            100.0 * false_negatives as f64 / (false_negatives + true_positives) as f64
        };
        if !present.is_empty() {
            coverage_values.push(true_positives as f64 / present.len() as f64);
        }
        fdr_sum += fdr;
        fnr_sum += fnr;
        present_sum += present.len();
        rows.push(ProgrammerRow {
            programmer_id: history.programmer_id.clone(),
            defects_present: present.len(),
            true_positives,
            false_positives,
            false_negatives,
            fdr,
            fnr,
            sde: sde(history, matches),
        });
    }
    let count = corpus.histories.len();
    let coverage_per_programmer = if coverage_values.is_empty() {
        None
    } else {
        Some(100.0 * coverage_values.iter().sum::<f64>() / coverage_values.len() as f64)
    };
    ProgrammerStats {
        rows,
        predictions_total,
        coverage_per_programmer,
        avg_fdr: if count == 0 {
            0.0
        } else {
            fdr_sum / count as f64
        },
        avg_fnr: if count == 0 {
            0.0
        } else {
            fnr_sum / count as f64
        },
        avg_defects_present: if count == 0 {
            0.0
        } else {
            present_sum as f64 / count as f64
        },
    }
}

/// Fraction of this programmer's versions that the predictions would have
/// made unnecessary.
///
/// Each version that fixes only predicted defects gets credited with the run
/// of fix-free versions immediately before it: those versions were spent
/// searching for defects the predictions already pointed at. A version whose
/// fixes include any unpredicted defect earns no credit. A single-version
/// history that was rejected counts as fully saved when every present defect
/// was predicted, and not at all otherwise.
pub fn sde(history: &DebugHistory, matches: &MatchMap) -> f64 {
    let total = history.total_versions();
    if total == 0 || history.defects_ever_present().is_empty() {
        return 0.0;
    }
    if total == 1 && !history.accepted() {
        let all_predicted = history
            .defects_ever_present()
            .iter()
            .all(|id| matches.is_predicted(id));
        return if all_predicted { 1.0 } else { 0.0 };
    }
    let mut saved = 0usize;
    let mut run = 0usize;
    for version in &history.versions {
        if version.fixed.is_empty() {
            run += 1;
            continue;
        }
        if version.fixed.iter().all(|id| matches.is_predicted(id)) {
            saved += run;
        }
        run = 0;
    }
    saved as f64 / total as f64
}

/// Mean saved debugging effort over programmers with at least one defect,
/// with the extremes and population standard deviation alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdeSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
}

pub fn asde(corpus: &Corpus, matches: &MatchMap) -> Result<SdeSummary, MetricsError> {
    let values: Vec<f64> = corpus
        .histories
        .iter()
        .filter(|h| !h.defects_ever_present().is_empty())
        .map(|h| sde(h, matches))
        .collect();
    if values.is_empty() {
        return Err(MetricsError::EmptyScope("histories with defects"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(SdeSummary {
        mean,
        min,
        max,
        std_dev: variance.sqrt(),
    })
}

/// Acceptance rate among defect-introducing programmers, now and under the
/// counterfactual that every predicted defect had been absent.
///
/// A rejected programmer flips to accepted exactly when their final version
/// still contains at least one defect and every such defect is predicted.
pub fn acceptance_uplift(corpus: &Corpus, matches: &MatchMap) -> Result<(f64, f64), MetricsError> {
    let carriers: Vec<&DebugHistory> = corpus
        .histories
        .iter()
        .filter(|h| !h.defects_ever_present().is_empty())
        .collect();
    if carriers.is_empty() {
        return Err(MetricsError::EmptyScope("histories with defects"));
    }
    let accepted = carriers.iter().filter(|h| h.accepted()).count();
    let flipped = carriers
        .iter()
        .filter(|h| {
            if h.accepted() {
                return false;
            }
            let unfixed = h.unfixed_defects();
            !unfixed.is_empty() && unfixed.iter().all(|id| matches.is_predicted(id))
        })
        .count();
    let n = carriers.len() as f64;
    Ok((
        100.0 * accepted as f64 / n,
        100.0 * (accepted + flipped) as f64 / n,
    ))
}

/// Everything the evaluation computes, in one serializable document.
///
/// Coverage, FDR/FNR, and acceptance fields are percentages in [0, 100];
/// persistence and saved-effort fields are ratios in [0, 1]. Fields that
/// aggregate over an empty scope are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub coverage_unique_total: f64,
    pub coverage_unique_coincident: Option<f64>,
    pub coverage_occurrences_total: f64,
    pub coverage_occurrences_coincident: Option<f64>,
    pub persistence: Vec<PersistenceRow>,
    pub appd: Option<f64>,
    pub non_predicted_mean: Option<f64>,
    pub predictions_total: usize,
    pub coverage_per_programmer: Option<f64>,
    pub avg_fdr: f64,
    pub avg_fnr: f64,
    pub avg_defects_present: f64,
    pub programmers: Vec<ProgrammerRow>,
    pub asde: Option<SdeSummary>,
    pub acceptance_rate: Option<f64>,
    pub acceptance_uplift: Option<f64>,
}

fn optional<T>(result: Result<T, MetricsError>) -> Result<Option<T>, MetricsError> {
    match result {
        Ok(value) => Ok(Some(value)),
        Err(MetricsError::EmptyScope(_)) => Ok(None),
        Err(err) => Err(err),
    }
}

/// Assembles the full metrics report for a corpus under a match map.
pub fn compute_report(corpus: &Corpus, matches: &MatchMap) -> Result<MetricsReport, MetricsError> {
    let coverage_unique_total = coverage_unique(matches, corpus, Scope::All)?;
    let coverage_unique_coincident = optional(coverage_unique(matches, corpus, Scope::Coincident))?;
    let coverage_occurrences_total = coverage_occurrences(matches, corpus, Scope::All)?;
    let coverage_occurrences_coincident =
        optional(coverage_occurrences(matches, corpus, Scope::Coincident))?;

    let mut persistence = Vec::new();
    let mut predicted_means = Vec::new();
    let mut other_means = Vec::new();
    for defect in &corpus.defects {
        let predicted = matches.is_predicted(&defect.defect_id);
        match persistence_row(corpus, &defect.defect_id, predicted) {
            Ok(row) => {
                if predicted {
                    predicted_means.push(row.mean);
                } else {
                    other_means.push(row.mean);
                }
                persistence.push(row);
            }
            Err(MetricsError::DefectNotPresent { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    let mean_of = |values: &[f64]| {
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    };

    let stats = per_programmer_stats(matches, corpus);
    let asde = optional(asde(corpus, matches))?;
    let acceptance = optional(acceptance_uplift(corpus, matches))?;
    let (acceptance_rate, acceptance_uplift) = match acceptance {
        Some((now, lifted)) => (Some(now), Some(lifted)),
        None => (None, None),
    };

    Ok(MetricsReport {
        coverage_unique_total,
        coverage_unique_coincident,
        coverage_occurrences_total,
        coverage_occurrences_coincident,
        persistence,
        appd: mean_of(&predicted_means),
        non_predicted_mean: mean_of(&other_means),
        predictions_total: stats.predictions_total,
        coverage_per_programmer: stats.coverage_per_programmer,
        avg_fdr: stats.avg_fdr,
        avg_fnr: stats.avg_fnr,
        avg_defects_present: stats.avg_defects_present,
        programmers: stats.rows,
        asde,
        acceptance_rate,
        acceptance_uplift,
    })
}

pub fn format_percent(value: f64) -> String {
    format!("{value:.1}%")
}

pub fn format_ratio(value: f64) -> String {
    format!("{value:.2}")
}

fn fmt_opt_percent(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), format_percent)
}

fn fmt_opt_ratio(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), format_ratio)
}

/// Renders the report as aligned text tables.
pub fn render_text(report: &MetricsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Coverage of unique defects");
    let _ = writeln!(
        out,
        "  all defects:        {}",
        format_percent(report.coverage_unique_total)
    );
    let _ = writeln!(
        out,
        "  coincident defects: {}",
        fmt_opt_percent(report.coverage_unique_coincident)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Coverage of defect occurrences");
    let _ = writeln!(
        out,
        "  all defects:        {}",
        format_percent(report.coverage_occurrences_total)
    );
    let _ = writeln!(
        out,
        "  coincident defects: {}",
        fmt_opt_percent(report.coverage_occurrences_coincident)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Persistence per defect");
    let _ = writeln!(
        out,
        "  defect  predicted  occurrence  versions  min   max   mean"
    );
    for row in &report.persistence {
        let _ = writeln!(
            out,
            "  {:<7} {:<10} {:>10}  {:>8}  {:<5} {:<5} {:<5}",
            row.defect_id,
            if row.predicted { "yes" } else { "no" },
            row.occurrence,
            row.versions_present,
            format_ratio(row.min),
            format_ratio(row.max),
            format_ratio(row.mean),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Average persistence");
    let _ = writeln!(
        out,
        "  predicted defects:     {}",
        fmt_opt_ratio(report.appd)
    );
    let _ = writeln!(
        out,
        "  non-predicted defects: {}",
        fmt_opt_ratio(report.non_predicted_mean)
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "Prediction accuracy per programmer ({} predictions)",
        report.predictions_total
    );
    let _ = writeln!(
        out,
        "  programmer  present  TP  FP  FN  FDR     FNR     SDE"
    );
    for row in &report.programmers {
        let _ = writeln!(
            out,
            "  {:<11} {:>7} {:>3} {:>3} {:>3}  {:<7} {:<7} {:<5}",
            row.programmer_id,
            row.defects_present,
            row.true_positives,
            row.false_positives,
            row.false_negatives,
            format_percent(row.fdr),
            format_percent(row.fnr),
            format_ratio(row.sde),
        );
    }
    let _ = writeln!(
        out,
        "  averages: coverage per programmer {}, FDR {}, FNR {}, defects present {}",
        fmt_opt_percent(report.coverage_per_programmer),
        format_percent(report.avg_fdr),
        format_percent(report.avg_fnr),
        format_ratio(report.avg_defects_present),
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Saved debugging effort");
    match &report.asde {
        Some(summary) => {
            let _ = writeln!(
                out,
                "  mean {}  min {}  max {}  sd {}",
                format_percent(100.0 * summary.mean),
                format_percent(100.0 * summary.min),
                format_percent(100.0 * summary.max),
                format_percent(100.0 * summary.std_dev),
            );
        }
        None => {
            let _ = writeln!(out, "  n/a");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Acceptance");
    let _ = writeln!(
        out,
        "  rate now:                          {}",
        fmt_opt_percent(report.acceptance_rate)
    );
    let _ = writeln!(
        out,
        "  rate without predicted defects:    {}",
        fmt_opt_percent(report.acceptance_uplift)
    );
    out
}

fn csv_percent(value: f64) -> String {
    format!("{value:.1}")
}

fn csv_opt_percent(value: Option<f64>) -> String {
    value.map_or_else(String::new, csv_percent)
}

fn csv_ratio(value: f64) -> String {
    format!("{value:.2}")
}

fn csv_opt_ratio(value: Option<f64>) -> String {
    value.map_or_else(String::new, csv_ratio)
}

/// Renders the report as a sequence of `[section]`-labelled CSV tables.
pub fn render_csv(report: &MetricsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[coverage_unique]");
    let _ = writeln!(out, "scope,percent");
    let _ = writeln!(out, "all,{}", csv_percent(report.coverage_unique_total));
    let _ = writeln!(
        out,
        "coincident,{}",
        csv_opt_percent(report.coverage_unique_coincident)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "[coverage_occurrences]");
    let _ = writeln!(out, "scope,percent");
    let _ = writeln!(
        out,
        "all,{}",
        csv_percent(report.coverage_occurrences_total)
    );
    let _ = writeln!(
        out,
        "coincident,{}",
        csv_opt_percent(report.coverage_occurrences_coincident)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "[persistence]");
    let _ = writeln!(
        out,
        "defect_id,predicted,occurrence,versions_present,min,max,mean"
    );
    for row in &report.persistence {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.defect_id,
            if row.predicted { "yes" } else { "no" },
            row.occurrence,
            row.versions_present,
            csv_ratio(row.min),
            csv_ratio(row.max),
            csv_ratio(row.mean),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[average_persistence]");
    let _ = writeln!(out, "scope,mean");
    let _ = writeln!(out, "predicted,{}", csv_opt_ratio(report.appd));
    let _ = writeln!(
        out,
        "non_predicted,{}",
        csv_opt_ratio(report.non_predicted_mean)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "[programmers]");
    let _ = writeln!(
        out,
        "programmer_id,defects_present,true_positives,false_positives,false_negatives,fdr_percent,fnr_percent,sde"
    );
    for row in &report.programmers {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.programmer_id,
            row.defects_present,
            row.true_positives,
            row.false_positives,
            row.false_negatives,
            csv_percent(row.fdr),
            csv_percent(row.fnr),
            csv_ratio(row.sde),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[summary]");
    let _ = writeln!(out, "metric,value");
    let _ = writeln!(out, "predictions_total,{}", report.predictions_total);
    let _ = writeln!(
        out,
        "coverage_per_programmer_percent,{}",
        csv_opt_percent(report.coverage_per_programmer)
    );
    let _ = writeln!(out, "avg_fdr_percent,{}", csv_percent(report.avg_fdr));
    let _ = writeln!(out, "avg_fnr_percent,{}", csv_percent(report.avg_fnr));
    let _ = writeln!(
        out,
        "avg_defects_present,{}",
        csv_ratio(report.avg_defects_present)
    );
    match &report.asde {
        Some(summary) => {
            let _ = writeln!(
                out,
                "asde_mean_percent,{}",
                csv_percent(100.0 * summary.mean)
            );
            let _ = writeln!(out, "asde_min_percent,{}", csv_percent(100.0 * summary.min));
            let _ = writeln!(out, "asde_max_percent,{}", csv_percent(100.0 * summary.max));
            let _ = writeln!(
                out,
                "asde_sd_percent,{}",
                csv_percent(100.0 * summary.std_dev)
            );
        }
        None => {
            for key in [
                "asde_mean_percent",
                "asde_min_percent",
                "asde_max_percent",
                "asde_sd_percent",
            ] {
                let _ = writeln!(out, "{key},");
            }
        }
    }
    let _ = writeln!(
        out,
        "acceptance_rate_percent,{}",
        csv_opt_percent(report.acceptance_rate)
    );
    let _ = writeln!(
        out,
        "acceptance_uplift_percent,{}",
        csv_opt_percent(report.acceptance_uplift)
    );
    out
}
