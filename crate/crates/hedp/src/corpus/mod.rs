//! Debugging-history corpus: a defect table plus one compact version-history
//! line per programmer.
//!
//! History line grammar (whitespace-separated tokens after `programmer_id |`):
//!
//! * `N` — a submitted version that fixes nothing.
//! * `F7` — a version that fixes exactly that defect.
//! * `-F2,F6` — a version that fixes several defects at once.
//! * `+F9@3` — the defect first appears in version 3; any versions needed to
//!   reach index 3 are filled in as no-fix versions.
//! * `+F9` — the defect first appears in the current version (or in a fresh
//!   version 1 when no version exists yet).
//! * a trailing `!AC` or `!REJ` records whether the final version was
//!   accepted by the judge; `!AC` is the default when omitted.
//!
//! Defects that are fixed without an explicit introduction are deemed present
//! from version 1. Full-line `#` comments and blank lines are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ValidationFinding;

/// Judge outcome recorded for a submitted version.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Ac,
    Wa,
    Pe,
    Re,
    Tl,
    Ce,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Verdict::Ac => "AC",
            Verdict::Wa => "WA",
            Verdict::Pe => "PE",
            Verdict::Re => "RE",
            Verdict::Tl => "TL",
            Verdict::Ce => "CE",
            Verdict::Unknown => "UNKNOWN",
        };
        f.write_str(text)
    }
}

/// One submitted version: its 1-based index, the judge verdict, and the
/// defects explicitly introduced or fixed in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionRecord {
    pub index: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub introduced: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub fixed: BTreeSet<String>,
}

impl VersionRecord {
    fn empty(index: usize) -> Self {
        VersionRecord {
            index,
            verdict: Verdict::Unknown,
            introduced: BTreeSet::new(),
            fixed: BTreeSet::new(),
        }
    }
}

/// The full debugging history of one programmer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebugHistory {
    pub programmer_id: String,
    pub versions: Vec<VersionRecord>,
}

impl DebugHistory {
    pub fn total_versions(&self) -> usize {
        self.versions.len()
    }

    /// Whether the final version was accepted by the judge.
    pub fn accepted(&self) -> bool {
        self.versions
            .last()
            .is_some_and(|v| v.verdict == Verdict::Ac)
    }

    /// Every defect that was present in at least one version.
    pub fn defects_ever_present(&self) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        for version in &self.versions {
            ids.extend(version.introduced.iter().cloned());
            ids.extend(version.fixed.iter().cloned());
        }
        ids
    }

    /// Version in which the defect first appeared: the explicit introduction
    /// if one was recorded, otherwise version 1 for any defect that was fixed.
    pub fn introduced_at(&self, defect_id: &str) -> Option<usize> {
        for version in &self.versions {
            if version.introduced.contains(defect_id) {
                return Some(version.index);
            }
        }
        self.fixed_at(defect_id).map(|_| 1)
    }

    pub fn fixed_at(&self, defect_id: &str) -> Option<usize> {
        self.versions
            .iter()
            .find(|v| v.fixed.contains(defect_id))
            .map(|v| v.index)
    }

    /// Whether the defect was present in the given version: introduced at or
    /// before it and not yet fixed.
    pub fn present_in(&self, defect_id: &str, version: usize) -> bool {
        let Some(intro) = self.introduced_at(defect_id) else {
            return false;
        };
        let end = self
            .fixed_at(defect_id)
            .unwrap_or(self.total_versions() + 1);
        intro <= version && version < end
    }

    /// Defects still present in the final version.
    pub fn unfixed_defects(&self) -> BTreeSet<String> {
        self.defects_ever_present()
            .into_iter()
            .filter(|id| self.fixed_at(id).is_none())
            .collect()
    }

    /// Renders the history back into its one-line text form.
    pub fn render_line(&self) -> String {
        let mut tokens = Vec::new();
        for version in &self.versions {
            let fix_token = match version.fixed.len() {
                0 => None,
                1 => Some(version.fixed.iter().next().unwrap().clone()),
                _ => Some(format!(
                    "-{}",
                    version.fixed.iter().cloned().collect::<Vec<_>>().join(",")
                )),
            };
            let intro_ids = version
                .introduced
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(",");
            match (fix_token, version.introduced.is_empty()) {
                (None, true) => tokens.push("N".to_string()),
                (Some(fix), true) => tokens.push(fix),
                (None, false) if version.index == 1 => tokens.push(format!("+{intro_ids}")),
                (None, false) => tokens.push(format!("+{intro_ids}@{}", version.index)),
                (Some(fix), false) => {
                    tokens.push(fix);
                    tokens.push(format!("+{intro_ids}"));
                }
            }
        }
        let flag = if self.accepted() { "!AC" } else { "!REJ" };
        format!("{} | {} {}", self.programmer_id, tokens.join(" "), flag)
    }
}

/// A row of the defect table. `predicted_by` names the prediction that covers
/// this defect, when one does.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectRecord {
    pub defect_id: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_by: Option<String>,
}

/// Defect table, histories, and the total participant count (participants
/// with no recorded history submitted nothing of interest).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub defects: Vec<DefectRecord>,
    pub histories: Vec<DebugHistory>,
    pub participants_total: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unrecognized token `{token}` at position {position}")]
    BadToken { position: usize, token: String },
    #[error("defect `{0}` is fixed more than once")]
    DuplicateFix(String),
    #[error("defect `{0}` is fixed at or before its introduction")]
    FixBeforeIntroduction(String),
    #[error("defect `{0}` does not appear in the defect table")]
    UnknownDefect(String),
    #[error("history line `{0}` is missing the `|` separator")]
    MissingSeparator(String),
    #[error("history line has an empty programmer id")]
    MissingProgrammerId,
    #[error("history for `{0}` contains no versions")]
    EmptyHistory(String),
    #[error("corpus file is missing the `{0}` section")]
    MissingSection(&'static str),
    #[error("bad participants line: {0}")]
    BadParticipants(String),
    #[error("defect table: {0}")]
    DefectTable(String),
}

/// Parses one history line.
///
/// `position` in [`CorpusError::BadToken`] is the 1-based index of the
/// offending whitespace-separated token after the `|` separator.
pub fn parse_history_line(line: &str) -> Result<DebugHistory, CorpusError> {
    let (pid, rest) = line
        .split_once('|')
        .ok_or_else(|| CorpusError::MissingSeparator(line.trim().to_string()))?;
    let programmer_id = pid.trim().to_string();
    if programmer_id.is_empty() {
        return Err(CorpusError::MissingProgrammerId);
    }

    let mut tokens: Vec<&str> = rest.split_whitespace().collect();
    let mut accepted = true;
    if let Some(&last) = tokens.last() {
        match last {
            "!AC" => {
                accepted = true;
                tokens.pop();
            }
            "!REJ" => {
                accepted = false;
                tokens.pop();
            }
            _ => {}
        }
    }

    let mut versions: Vec<VersionRecord> = Vec::new();
    let mut fixed_ever: BTreeSet<String> = BTreeSet::new();
    let mut explicit_intro: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, token) in tokens.iter().enumerate() {
        let position = idx + 1;
        let bad = || CorpusError::BadToken {
            position,
            token: token.to_string(),
        };
        if *token == "N" {
            versions.push(VersionRecord::empty(versions.len() + 1));
        } else if let Some(body) = token.strip_prefix('+') {
            let (ids_part, at) = match body.split_once('@') {
                Some((ids, at)) => (ids, Some(at)),
                None => (body, None),
            };
            let ids = split_ids(ids_part).ok_or_else(bad)?;
            let target = match at {
                Some(text) => {
                    let wanted: usize = text.parse().map_err(|_| bad())?;
                    if wanted <= versions.len() {
                        return Err(bad());
                    }
                    while versions.len() + 1 < wanted {
                        versions.push(VersionRecord::empty(versions.len() + 1));
                    }
                    versions.push(VersionRecord::empty(wanted));
                    versions.last_mut().unwrap()
                }
                None => {
                    if versions.is_empty() {
                        versions.push(VersionRecord::empty(1));
                    }
                    versions.last_mut().unwrap()
                }
            };
            let target_index = target.index;
            for id in ids {
                if fixed_ever.contains(&id) {
                    return Err(CorpusError::FixBeforeIntroduction(id));
                }
                if explicit_intro.contains_key(&id) {
                    return Err(bad());
                }
                explicit_intro.insert(id.clone(), target_index);
                target.introduced.insert(id);
            }
        } else {
            let ids = match token.strip_prefix('-') {
                Some(list) => split_ids(list).ok_or_else(bad)?,
                None if is_defect_id(token) => vec![token.to_string()],
                None => return Err(bad()),
            };
            let index = versions.len() + 1;
            let mut version = VersionRecord::empty(index);
            for id in ids {
                if fixed_ever.contains(&id) {
                    return Err(CorpusError::DuplicateFix(id));
                }
                if explicit_intro.get(&id).is_some_and(|&intro| index <= intro) {
                    return Err(CorpusError::FixBeforeIntroduction(id));
                }
                fixed_ever.insert(id.clone());
                version.fixed.insert(id);
            }
            versions.push(version);
        }
    }

    if versions.is_empty() {
        return Err(CorpusError::EmptyHistory(programmer_id));
    }
    versions.last_mut().unwrap().verdict = if accepted {
        Verdict::Ac
    } else {
        Verdict::Unknown
    };
    Ok(DebugHistory {
        programmer_id,
        versions,
    })
}

fn split_ids(list: &str) -> Option<Vec<String>> {
    let ids: Vec<String> = list.split(',').map(str::to_string).collect();
    if ids.iter().all(|id| is_defect_id(id)) {
        Some(ids)
    } else {
        None
    }
}

fn is_defect_id(token: &str) -> bool {
    token.len() > 1 && token.starts_with('F') && token[1..].chars().all(|c| c.is_ascii_digit())
}

/// Parses the defect table CSV (`defect_id,description,predicted_by` header;
/// an empty `predicted_by` field means the defect is not predicted).
pub fn parse_defect_table(text: &str) -> Result<Vec<DefectRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let expected = ["defect_id", "description", "predicted_by"];
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::DefectTable(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CorpusError::DefectTable(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut defects = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CorpusError::DefectTable(e.to_string()))?;
        if row.len() != 3 {
            return Err(CorpusError::DefectTable(format!(
                "expected 3 fields, found {}",
                row.len()
            )));
        }
        let predicted_by = match row[2].trim() {
            "" => None,
            value => Some(value.to_string()),
        };
        defects.push(DefectRecord {
            defect_id: row[0].trim().to_string(),
            description: row[1].to_string(),
            predicted_by,
        });
    }
    Ok(defects)
}

/// Parses a full corpus file: a `participants:` line, a `[defects]` section
/// holding the CSV table, and a `[histories]` section with one line per
/// programmer.
pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let mut participants_total: Option<usize> = None;
    let mut defect_lines: Vec<&str> = Vec::new();
    let mut histories = Vec::new();

    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Defects,
        Histories,
    }
    let mut section = Section::Preamble;

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[defects]" => {
                section = Section::Defects;
                continue;
            }
            "[histories]" => {
                section = Section::Histories;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Preamble => {
                if let Some(count) = line.strip_prefix("participants:") {
                    let count = count
                        .trim()
                        .parse()
                        .map_err(|_| CorpusError::BadParticipants(line.to_string()))?;
                    participants_total = Some(count);
                } else {
                    return Err(CorpusError::BadParticipants(line.to_string()));
                }
            }
            Section::Defects => defect_lines.push(raw),
            Section::Histories => histories.push(parse_history_line(line)?),
        }
    }

    if defect_lines.is_empty() {
        return Err(CorpusError::MissingSection("[defects]"));
    }
    if histories.is_empty() {
        return Err(CorpusError::MissingSection("[histories]"));
    }
    let defects = parse_defect_table(&defect_lines.join("\n"))?;
    let participants_total = participants_total.unwrap_or(histories.len());
    Ok(Corpus {
        defects,
        histories,
        participants_total,
    })
}

impl Corpus {
    pub fn defect(&self, defect_id: &str) -> Option<&DefectRecord> {
        self.defects.iter().find(|d| d.defect_id == defect_id)
    }

    /// Number of programmers whose history ever contained the defect.
    pub fn occurrence(&self, defect_id: &str) -> Result<usize, CorpusError> {
        if self.defect(defect_id).is_none() {
            return Err(CorpusError::UnknownDefect(defect_id.to_string()));
        }
        Ok(self
            .histories
            .iter()
            .filter(|h| h.defects_ever_present().contains(defect_id))
            .count())
    }

    /// Sum of occurrences over the whole defect table.
    pub fn occurrence_total(&self) -> usize {
        self.defects
            .iter()
            .map(|d| self.occurrence(&d.defect_id).unwrap_or(0))
            .sum()
    }

    /// Defects observed in at least two programmers' histories.
    pub fn coincident_defects(&self) -> BTreeSet<String> {
        self.defects
            .iter()
            .filter(|d| self.occurrence(&d.defect_id).unwrap_or(0) >= 2)
            .map(|d| d.defect_id.clone())
            .collect()
    }

    /// Renders the corpus back into its sectioned text form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("participants: {}\n", self.participants_total));
        out.push_str("\n[defects]\n");
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["defect_id", "description", "predicted_by"])
            .expect("csv header");
        for defect in &self.defects {
            writer
                .write_record([
                    defect.defect_id.as_str(),
                    defect.description.as_str(),
                    defect.predicted_by.as_deref().unwrap_or(""),
                ])
                .expect("csv row");
        }
        let table = writer.into_inner().expect("csv buffer");
        out.push_str(&String::from_utf8(table).expect("csv utf-8"));
        out.push_str("\n[histories]\n");
        for history in &self.histories {
            out.push_str(&history.render_line());
            out.push('\n');
        }
        out
    }
}

/// Structural checks over a corpus; parse already enforces the per-line rules,
/// so this mostly guards hand-built values.
pub fn validate_corpus(corpus: &Corpus) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    let mut table_ids = BTreeSet::new();
    for defect in &corpus.defects {
        if !table_ids.insert(defect.defect_id.clone()) {
            findings.push(ValidationFinding::new(
                format!("defect `{}`", defect.defect_id),
                "duplicate defect id in the defect table",
            ));
        }
    }

    let mut programmer_ids = BTreeSet::new();
    for history in &corpus.histories {
        let location = format!("history `{}`", history.programmer_id);
        if !programmer_ids.insert(history.programmer_id.clone()) {
            findings.push(ValidationFinding::new(&location, "duplicate programmer id"));
        }
        if history.versions.is_empty() {
            findings.push(ValidationFinding::new(&location, "history has no versions"));
        }
        for (i, version) in history.versions.iter().enumerate() {
            if version.index != i + 1 {
                findings.push(ValidationFinding::new(
                    &location,
                    format!(
                        "version indices are not contiguous: found {} at position {}",
                        version.index,
                        i + 1
                    ),
                ));
            }
            if let Some(id) = version.introduced.intersection(&version.fixed).next() {
                findings.push(ValidationFinding::new(
                    &location,
                    format!(
                        "defect `{id}` both introduced and fixed in version {}",
                        version.index
                    ),
                ));
            }
        }
        for id in history.defects_ever_present() {
            if !table_ids.contains(&id) {
                findings.push(ValidationFinding::new(
                    &location,
                    format!("defect `{id}` does not appear in the defect table"),
                ));
            }
            if let (Some(intro), Some(fix)) = (history.introduced_at(&id), history.fixed_at(&id)) {
                if fix <= intro {
                    findings.push(ValidationFinding::new(
                        &location,
                        format!("defect `{id}` is fixed at or before its introduction"),
                    ));
                }
            }
        }
    }

    if corpus.participants_total < corpus.histories.len() {
        findings.push(ValidationFinding::new(
            "participants_total",
            format!(
                "{} is smaller than the number of recorded histories ({})",
                corpus.participants_total,
                corpus.histories.len()
            ),
        ));
    }
    findings
}

/// The packaged defect corpus.
pub const BUILTIN_CORPUS: &str = include_str!("../../fixtures/jiong.corpus");

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin() -> Corpus {
        parse_corpus(BUILTIN_CORPUS).expect("packaged corpus parses")
    }

    #[test]
    fn six_version_line_parses_with_fix_points() {
        let history = parse_history_line("P07 | N F15 F2 N N F6 !AC").unwrap();
        assert_eq!(history.total_versions(), 6);
        assert!(history.accepted());
        assert_eq!(history.fixed_at("F15"), Some(2));
        assert_eq!(history.fixed_at("F2"), Some(3));
        assert_eq!(history.fixed_at("F6"), Some(6));
        for id in ["F15", "F2", "F6"] {
            assert_eq!(history.introduced_at(id), Some(1));
        }
        assert_eq!(
            history.defects_ever_present(),
            BTreeSet::from(["F15".to_string(), "F2".to_string(), "F6".to_string()])
        );
    }

    #[test]
    fn fast_forward_introduction_fills_gap_versions() {
        let history = parse_history_line("P08 | +F9@3 N -F9 N").unwrap();
        assert_eq!(history.total_versions(), 6);
        assert_eq!(history.introduced_at("F9"), Some(3));
        assert_eq!(history.fixed_at("F9"), Some(5));
        assert!(history.versions[..2]
            .iter()
            .all(|v| v.introduced.is_empty()));
    }

    #[test]
    fn duplicate_fix_is_rejected() {
        assert_eq!(
            parse_history_line("P09 | F2 F2"),
            Err(CorpusError::DuplicateFix("F2".to_string()))
        );
    }

    #[test]
    fn fix_before_explicit_introduction_is_rejected() {
        assert_eq!(
            parse_history_line("P01 | N F2 +F2@4 N N"),
            Err(CorpusError::FixBeforeIntroduction("F2".to_string()))
        );
    }

    #[test]
    fn fix_in_the_first_version_parses_but_is_a_finding() {
        let history = parse_history_line("P01 | F2 N").unwrap();
        assert_eq!(history.fixed_at("F2"), Some(1));
        assert!(!history.present_in("F2", 1));
        let mut corpus = builtin();
        corpus.histories.push(history);
        corpus.participants_total += 1;
        let findings = validate_corpus(&corpus);
        assert!(findings
            .iter()
            .any(|f| f.message.contains("fixed at or before its introduction")));
    }

    #[test]
    fn fix_after_late_introduction_measures_from_the_introduction() {
        let history = parse_history_line("P08 | +F9@3 N -F9 N").unwrap();
        assert!(history.present_in("F9", 3));
        assert!(history.present_in("F9", 4));
        assert!(!history.present_in("F9", 5));
        assert!(!history.present_in("F9", 2));
    }

    #[test]
    fn bootstrap_introduction_creates_the_first_version() {
        let history = parse_history_line("P25 | +F17 !REJ").unwrap();
        assert_eq!(history.total_versions(), 1);
        assert!(!history.accepted());
        assert_eq!(history.introduced_at("F17"), Some(1));
        assert_eq!(history.fixed_at("F17"), None);
        assert_eq!(
            history.unfixed_defects(),
            BTreeSet::from(["F17".to_string()])
        );
    }

    #[test]
    fn verdict_flag_defaults_to_accepted() {
        let history = parse_history_line("P38 | N").unwrap();
        assert!(history.accepted());
    }

    #[test]
    fn malformed_tokens_report_their_position() {
        let err = parse_history_line("P01 | N F2 glorp N").unwrap_err();
        assert_eq!(
            err,
            CorpusError::BadToken {
                position: 3,
                token: "glorp".to_string()
            }
        );
        assert!(parse_history_line("P01 | +F9@0 N").is_err());
        assert!(parse_history_line("P01 | N N +F9@2").is_err());
    }

    #[test]
    fn history_lines_round_trip_through_render() {
        for line in [
            "P07 | N F15 F2 N N F6 !AC",
            "P22 | N -F10,F11,F19,F22 !AC",
            "P25 | +F17 !REJ",
            "P30 | +F13 N N N !REJ",
        ] {
            let history = parse_history_line(line).unwrap();
            assert_eq!(history.render_line(), line);
        }
        for line in [
            "P08 | +F9@3 N -F9 N !AC",
            "P19 | F2 +F3 N",
            "P20 | +F4@2 F4",
        ] {
            let history = parse_history_line(line).unwrap();
            assert_eq!(parse_history_line(&history.render_line()).unwrap(), history);
        }
    }

    #[test]
    fn packaged_corpus_parses_and_validates_cleanly() {
        let corpus = builtin();
        assert_eq!(corpus.participants_total, 55);
        assert_eq!(corpus.histories.len(), 55);
        assert_eq!(corpus.defects.len(), 22);
        assert_eq!(validate_corpus(&corpus), Vec::new());
    }

    #[test]
    fn occurrence_counts_match_the_packaged_table() {
        let corpus = builtin();
        assert_eq!(corpus.occurrence("F2"), Ok(23));
        assert_eq!(corpus.occurrence("F6"), Ok(14));
        assert_eq!(corpus.occurrence("F1"), Ok(7));
        assert_eq!(corpus.occurrence_total(), 70);
        assert_eq!(
            corpus.occurrence("F99"),
            Err(CorpusError::UnknownDefect("F99".to_string()))
        );
    }

    #[test]
    fn coincident_defects_are_those_seen_at_least_twice() {
        let corpus = builtin();
        let coincident = corpus.coincident_defects();
        let expected = ["F1", "F2", "F6", "F7", "F9", "F10", "F17", "F18", "F21"];
        assert_eq!(
            coincident,
            expected
                .iter()
                .map(|s| s.to_string())
                .collect::<BTreeSet<_>>()
        );
        let occurrences: usize = coincident
            .iter()
            .map(|id| corpus.occurrence(id).unwrap())
            .sum();
        assert_eq!(occurrences, 57);
    }

    #[test]
    fn corpus_round_trips_through_render() {
        let corpus = builtin();
        let reparsed = parse_corpus(&corpus.render()).expect("rendered corpus parses");
        assert_eq!(reparsed, corpus);
    }

    #[test]
    fn corpus_round_trips_through_json() {
        let corpus = builtin();
        let json = serde_json::to_string(&corpus).unwrap();
        let back: Corpus = serde_json::from_str(&json).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn unknown_history_defects_and_bad_indices_are_findings() {
        let mut corpus = builtin();
        corpus.histories[0].versions[1]
            .fixed
            .insert("F99".to_string());
        let findings = validate_corpus(&corpus);
        assert!(findings
            .iter()
            .any(|f| f.message.contains("`F99` does not appear")));

        let mut corpus = builtin();
        corpus.histories[2].versions[1].index = 7;
        let findings = validate_corpus(&corpus);
        assert!(findings
            .iter()
            .any(|f| f.message.contains("not contiguous")));
    }

    #[test]
    fn defect_table_requires_the_exact_header() {
        let err = parse_defect_table("id,text\nF1,whatever").unwrap_err();
        assert!(matches!(err, CorpusError::DefectTable(_)));
    }
}
