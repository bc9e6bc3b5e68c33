//! Acceptance suite: eight end-to-end criteria over the shipped fixtures,
//! each printing one pass/fail line. Run with `--nocapture` to see every
//! line; a failing criterion always prints its line before panicking.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::{Command, Output};

use hedp::catalog::builtin_catalog_source;
use hedp::corpus::{parse_corpus, Corpus, DebugHistory, DefectRecord, Verdict, VersionRecord};
use hedp::dsl;
use hedp::engine::{check_post_completion, check_selectivity, PredictionReport};
use hedp::metrics::{
    appd, coverage_occurrences, coverage_unique, per_programmer_stats, persistence_parts, sde,
    MatchMap, Scope,
};
use hedp::model::{InfoItem, Subtask};

fn verdict(n: u8, what: &str, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => println!("criterion {n}: PASS — {what}"),
        Err(why) => {
            println!("criterion {n}: FAIL — {what}: {why}");
            panic!("criterion {n} failed: {why}");
        }
    }
}

fn ensure(cond: bool, why: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why.into())
    }
}

fn within(actual: f64, expected: f64, tol: f64, label: &str) -> Result<(), String> {
    ensure(
        (actual - expected).abs() <= tol,
        format!("{label}: got {actual}, wanted {expected} ± {tol}"),
    )
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../hedp/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn hedp_bin(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_hedp"))
        .args(args)
        .output()
        .map_err(|e| format!("running the binary: {e}"))
}

fn packaged_corpus() -> Corpus {
    parse_corpus(hedp::corpus::BUILTIN_CORPUS).expect("packaged corpus parses")
}

#[test]
fn criterion_1_end_to_end_prediction() {
    let what =
        "predict on the shipped fixtures emits exactly the seven expected (location, form) pairs";
    let run = || -> Result<(), String> {
        let output = hedp_bin(&[
            "predict",
            "--catalog",
            &fixture("catalog.eps"),
            "--task",
            &fixture("jiong.task"),
            "--profile",
            &fixture("novice_c.profile"),
            "--format",
            "document",
        ])?;
        ensure(
            output.status.success(),
            format!(
                "predict exits 0, stderr: {}",
                String::from_utf8_lossy(&output.stderr)
            ),
        )?;
        let report: PredictionReport = serde_json::from_slice(&output.stdout)
            .map_err(|e| format!("prediction document parses: {e}"))?;
        ensure(
            report.predictions.len() == 7,
            format!("exactly 7 predictions, got {}", report.predictions.len()),
        )?;

        let frozen: PredictionReport = serde_json::from_str(
            &std::fs::read_to_string(fixture("expected_predictions.json"))
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let pairs = |r: &PredictionReport| -> BTreeSet<(String, String)> {
            r.predictions
                .iter()
                .map(|p| (p.defect_location.clone(), p.defect_form.clone()))
                .collect()
        };
        let actual = pairs(&report);
        ensure(
            actual == pairs(&frozen),
            format!("(location, form) set equality, got {actual:?}"),
        )?;

        let all_forms: Vec<&str> = report
            .predictions
            .iter()
            .map(|p| p.defect_form.as_str())
            .collect();
        for needle in [
            "blank line",
            "missing",
            "without initialization",
            "size of the array is smaller",
            "'0' instead of ' '",
            "Not all possible",
            "printed together only after all of the inputs",
            "h=8n, instead of h=2^{n+2}",
        ] {
            ensure(
                all_forms.iter().any(|form| form.contains(needle)),
                format!("some form contains {needle:?}"),
            )?;
        }
        Ok(())
    };
    verdict(1, what, run());
}

#[test]
fn criterion_2_coverage_numbers() {
    let what = "coverage is 31.8/77.8 (unique) and 75.7/93.0 (occurrences) with occurrence sums 70 and 57 over 9 coincident defects";
    let run = || -> Result<(), String> {
        let corpus = packaged_corpus();
        let matches = MatchMap::from_corpus(&corpus);
        within(
            coverage_unique(&matches, &corpus, Scope::All).map_err(|e| e.to_string())?,
            31.8,
            0.05,
            "unique coverage, all defects",
        )?;
        within(
            coverage_unique(&matches, &corpus, Scope::Coincident).map_err(|e| e.to_string())?,
            77.8,
            0.05,
            "unique coverage, coincident defects",
        )?;
        within(
            coverage_occurrences(&matches, &corpus, Scope::All).map_err(|e| e.to_string())?,
            75.7,
            0.05,
            "occurrence coverage, all defects",
        )?;
        within(
            coverage_occurrences(&matches, &corpus, Scope::Coincident)
                .map_err(|e| e.to_string())?,
            93.0,
            0.05,
            "occurrence coverage, coincident defects",
        )?;
        ensure(
            corpus.occurrence_total() == 70,
            format!("occurrence sum 70, got {}", corpus.occurrence_total()),
        )?;
        let coincident = corpus.coincident_defects();
        ensure(
            coincident.len() == 9,
            format!("9 coincident defects, got {}", coincident.len()),
        )?;
        let coincident_sum: usize = coincident
            .iter()
            .map(|id| corpus.occurrence(id).unwrap_or(0))
            .sum();
        ensure(
            coincident_sum == 57,
            format!("coincident occurrence sum 57, got {coincident_sum}"),
        )?;
        Ok(())
    };
    verdict(2, what, run());
}

#[test]
fn criterion_3_persistence() {
    let what = "mean persistence is 0.79 predicted / 0.45 non-predicted, the six-version example gives 2/4, and every per-defect mean is reproduced";
    let run = || -> Result<(), String> {
        let corpus = packaged_corpus();
        let matches = MatchMap::from_corpus(&corpus);
        within(
            appd(&corpus, &matches.predicted_ids()).map_err(|e| e.to_string())?,
            0.79,
            0.005,
            "mean persistence over predicted defects",
        )?;
        let non_predicted_ids: BTreeSet<String> = corpus
            .defects
            .iter()
            .filter(|d| !matches.is_predicted(&d.defect_id))
            .map(|d| d.defect_id.clone())
            .collect();
        within(
            appd(&corpus, &non_predicted_ids).map_err(|e| e.to_string())?,
            0.45,
            0.005,
            "mean persistence over the rest",
        )?;

        let example = DebugHistory {
            programmer_id: "PX".into(),
            versions: (1..=6)
                .map(|index| {
                    let mut version = VersionRecord {
                        index,
                        verdict: if index == 6 { Verdict::Ac } else { Verdict::Wa },
                        introduced: BTreeSet::new(),
                        fixed: BTreeSet::new(),
                    };
                    if index == 3 {
                        version.introduced.insert("F9".into());
                    }
                    if index == 5 {
                        version.fixed.insert("F9".into());
                    }
                    version
                })
                .collect(),
        };
        let parts = persistence_parts(&example, "F9").map_err(|e| e.to_string())?;
        ensure(
            parts == (2, 4),
            format!("example parts (2, 4), got {parts:?}"),
        )?;

        let expected: [(&str, f64); 22] = [
            ("F1", 0.50),
            ("F2", 0.63),
            ("F3", 0.09),
            ("F4", 0.25),
            ("F5", 0.75),
            ("F6", 0.83),
            ("F7", 0.75),
            ("F8", 0.17),
            ("F9", 0.19),
            ("F10", 0.75),
            ("F11", 0.50),
            ("F12", 0.72),
            ("F13", 1.00),
            ("F14", 0.67),
            ("F15", 0.17),
            ("F16", 0.17),
            ("F17", 1.00),
            ("F18", 0.97),
            ("F19", 0.50),
            ("F20", 0.33),
            ("F21", 0.88),
            ("F22", 0.50),
        ];
        for (id, mean) in expected {
            let actual =
                hedp::metrics::degree_of_persistence(&corpus, id).map_err(|e| e.to_string())?;
            within(actual, mean, 0.01, &format!("mean persistence of {id}"))?;
        }
        Ok(())
    };
    verdict(3, what, run());
}

fn category_fixture() -> (Corpus, MatchMap) {
    let predicted = ["F1", "F2", "F3", "F4", "F5", "F6", "F7"];
    let extra = ["F8", "F9"];
    let mut defects: Vec<DefectRecord> = Vec::new();
    for (i, id) in predicted.iter().enumerate() {
        defects.push(DefectRecord {
            defect_id: id.to_string(),
            description: format!("defect {id}"),
            predicted_by: Some(format!("ES{}", i + 1)),
        });
    }
    for id in extra {
        defects.push(DefectRecord {
            defect_id: id.to_string(),
            description: format!("defect {id}"),
            predicted_by: None,
        });
    }
    // (how many programmers, defects present, of which predicted)
    let categories: [(usize, usize, usize); 10] = [
        (18, 0, 0),
        (13, 1, 1),
        (8, 2, 2),
        (2, 3, 3),
        (2, 5, 4),
        (3, 3, 2),
        (1, 5, 3),
        (1, 2, 1),
        (6, 1, 0),
        (1, 2, 0),
    ];
    let mut histories = Vec::new();
    for (count, present, covered) in categories {
        for _ in 0..count {
            let mut introduced = BTreeSet::new();
            for id in predicted.iter().take(covered) {
                introduced.insert(id.to_string());
            }
            for id in extra.iter().take(present - covered) {
                introduced.insert(id.to_string());
            }
            histories.push(DebugHistory {
                programmer_id: format!("P{:02}", histories.len() + 1),
                versions: vec![VersionRecord {
                    index: 1,
                    verdict: Verdict::Ac,
                    introduced,
                    fixed: BTreeSet::new(),
                }],
            });
        }
    }
    let corpus = Corpus {
        defects,
        histories,
        participants_total: 55,
    };
    let matches = MatchMap::from_corpus(&corpus);
    (corpus, matches)
}

#[test]
fn criterion_4_per_programmer_stats() {
    let what = "the per-programmer category fixture yields coverage 75%, FDR 86%, FNR 17%, and 1.25 defects present on average";
    let run = || -> Result<(), String> {
        let (corpus, matches) = category_fixture();
        let stats = per_programmer_stats(&matches, &corpus);
        let coverage = stats
            .coverage_per_programmer
            .ok_or("coverage per programmer defined")?;
        within(coverage, 75.0, 1.0, "coverage per programmer")?;
        within(stats.avg_fdr, 86.0, 1.0, "average false discovery rate")?;
        within(stats.avg_fnr, 17.0, 1.0, "average false negative rate")?;
        within(
            stats.avg_defects_present,
            1.25,
            0.01,
            "average defects present",
        )?;
        Ok(())
    };
    verdict(4, what, run());
}

fn sde_oracle(history: &DebugHistory, matches: &MatchMap) -> f64 {
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
    for (index, version) in history.versions.iter().enumerate() {
        if !version.fixed.is_empty() {
            continue;
        }
        let next_fixing = history.versions[index + 1..]
            .iter()
            .find(|later| !later.fixed.is_empty());
        if let Some(fixing) = next_fixing {
            if fixing.fixed.iter().all(|id| matches.is_predicted(id)) {
                saved += 1;
            }
        }
    }
    saved as f64 / total as f64
}

fn single_version_history(defects: &[&str], verdict: Verdict) -> DebugHistory {
    DebugHistory {
        programmer_id: "PX".into(),
        versions: vec![VersionRecord {
            index: 1,
            verdict,
            introduced: defects.iter().map(|d| d.to_string()).collect(),
            fixed: BTreeSet::new(),
        }],
    }
}

fn five_version_history(placements: &[(usize, Option<usize>)], accepted: bool) -> DebugHistory {
    let mut versions: Vec<VersionRecord> = (1..=5)
        .map(|index| VersionRecord {
            index,
            verdict: Verdict::Wa,
            introduced: BTreeSet::new(),
            fixed: BTreeSet::new(),
        })
        .collect();
    for (slot, (intro, fix)) in placements.iter().enumerate() {
        let id = format!("F{}", slot + 1);
        versions[intro - 1].introduced.insert(id.clone());
        if let Some(fix) = fix {
            versions[fix - 1].fixed.insert(id);
        }
    }
    versions[4].verdict = if accepted { Verdict::Ac } else { Verdict::Re };
    DebugHistory {
        programmer_id: "PX".into(),
        versions,
    }
}

#[test]
fn criterion_5_debugging_effort_rules() {
    let what = "the six-version history saves 2/6, single rejected versions give 1 and 0, and the effort metric matches an exhaustive oracle";
    let run = || -> Result<(), String> {
        let corpus = packaged_corpus();
        let matches = MatchMap::from_corpus(&corpus);
        let worked_example = corpus
            .histories
            .iter()
            .find(|h| h.programmer_id == "P07")
            .ok_or("history P07 present")?;
        let value = sde(worked_example, &matches);
        ensure(
            (value - 2.0 / 6.0).abs() < 1e-12,
            format!("worked example saves 2/6, got {value}"),
        )?;

        let all_predicted = single_version_history(&["F17"], Verdict::Re);
        ensure(
            sde(&all_predicted, &matches) == 1.0,
            "single rejected version with only predicted defects saves 1",
        )?;
        let unpredicted = single_version_history(&["F13"], Verdict::Re);
        ensure(
            sde(&unpredicted, &matches) == 0.0,
            "single rejected version with an unpredicted defect saves 0",
        )?;

        // exhaustive sweep: two defects, every (intro, fix) placement over
        // five versions, both final verdicts, every predicted subset
        let mut placements: Vec<(usize, Option<usize>)> = Vec::new();
        for intro in 1..=5usize {
            placements.push((intro, None));
            for fix in intro + 1..=5 {
                placements.push((intro, Some(fix)));
            }
        }
        for first in &placements {
            for second in &placements {
                for accepted in [false, true] {
                    let history = five_version_history(&[*first, *second], accepted);
                    for mask in 0..4u8 {
                        let pairs: BTreeMap<String, Option<String>> = (0..2)
                            .map(|slot| {
                                let hit = mask & (1 << slot) != 0;
                                (
                                    format!("F{}", slot + 1),
                                    hit.then(|| format!("ES{}", slot + 1)),
                                )
                            })
                            .collect();
                        let map = MatchMap { pairs };
                        let fast = sde(&history, &map);
                        let slow = sde_oracle(&history, &map);
                        ensure(
                            fast == slow,
                            format!(
                                "oracle agreement on {history:?} mask {mask}: {fast} vs {slow}"
                            ),
                        )?;
                        ensure(
                            (0.0..=1.0).contains(&fast),
                            format!("saved effort in [0, 1], got {fast}"),
                        )?;
                        for id in map.predicted_ids() {
                            ensure(
                                sde(&history, &map.without(&id)) <= fast,
                                format!("dropping match {id} never raises saved effort"),
                            )?;
                        }
                    }
                }
            }
        }
        Ok(())
    };
    verdict(5, what, run());
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    fn below(&mut self, n: u64) -> u64 {
        (self.next() >> 33) % n
    }

    fn flag(&mut self) -> bool {
        self.below(2) == 1
    }
}

fn random_tree(rng: &mut Lcg, depth: usize, next_id: &mut usize) -> Subtask {
    let id = format!("t{}", *next_id);
    *next_id += 1;
    let child_count = if depth == 0 { 0 } else { rng.below(4) as usize };
    Subtask {
        id,
        description: String::new(),
        children: (0..child_count)
            .map(|_| random_tree(rng, depth - 1, next_id))
            .collect(),
        is_main: rng.flag(),
        necessary_for_parent: rng.flag(),
        required_rules: Vec::new(),
        location_ref: None,
    }
}

fn post_completion_oracle(root: &Subtask) -> BTreeSet<(String, String, String)> {
    let mut out = BTreeSet::new();
    for parent in root.walk() {
        for candidate_main in &parent.children {
            if !candidate_main.is_main {
                continue;
            }
            let first_main = parent.children.iter().find(|c| c.is_main);
            if first_main.map(|c| &c.id) != Some(&candidate_main.id) {
                continue;
            }
            for (index, trailing) in parent.children.iter().enumerate() {
                if index + 1 != parent.children.len()
                    || trailing.necessary_for_parent
                    || trailing.id == candidate_main.id
                {
                    continue;
                }
                out.insert((
                    parent.id.clone(),
                    candidate_main.id.clone(),
                    trailing.id.clone(),
                ));
            }
        }
    }
    out
}

fn selectivity_oracle(items: &[InfoItem]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for overlooked in items {
        let mut distractor: Option<&InfoItem> = None;
        for other in items {
            let louder = other.saliency > overlooked.saliency;
            let less_important = overlooked.logic_importance > other.logic_importance;
            if other.id != overlooked.id && louder && less_important {
                distractor = Some(other);
                break;
            }
        }
        if let Some(distractor) = distractor {
            out.push((overlooked.id.clone(), distractor.id.clone()));
        }
    }
    out
}

#[test]
fn criterion_6_predicate_oracles() {
    let what = "trailing-subtask and attention checkers agree with brute force on 1,000 random inputs each, and the linear trap matches the true relation exactly at 1 and 2";
    let run = || -> Result<(), String> {
        let mut rng = Lcg(0x5eed_4ac3_e17a_11ce);
        for case in 0..1000 {
            let mut next_id = 0;
            let root = random_tree(&mut rng, 3, &mut next_id);
            let actual: BTreeSet<(String, String, String)> = check_post_completion(&root)
                .iter()
                .map(|p| {
                    (
                        p.bindings["Task A"].clone(),
                        p.bindings["Task A.1"].clone(),
                        p.bindings["Task A.2"].clone(),
                    )
                })
                .collect();
            let expected = post_completion_oracle(&root);
            ensure(
                actual == expected,
                format!("tree case {case}: {actual:?} vs {expected:?}"),
            )?;
        }

        for case in 0..1000 {
            let count = rng.below(8) as usize;
            let items: Vec<InfoItem> = (0..count)
                .map(|index| InfoItem {
                    id: format!("i{index}"),
                    location_ref: format!("loc{index}"),
                    saliency: rng.below(11) as u8,
                    logic_importance: rng.below(11) as u8,
                    content: String::new(),
                    omission_form: None,
                })
                .collect();
            let actual: Vec<(String, String)> = check_selectivity(&items)
                .iter()
                .map(|p| (p.bindings["T_i"].clone(), p.bindings["T_j"].clone()))
                .collect();
            let expected = selectivity_oracle(&items);
            ensure(
                actual == expected,
                format!("item case {case}: {actual:?} vs {expected:?}"),
            )?;
        }

        let equality: BTreeSet<u32> = (1..=7u32).filter(|n| 8 * n == 1 << (n + 2)).collect();
        ensure(
            equality == BTreeSet::from([1, 2]),
            format!("equality set {{1, 2}}, got {equality:?}"),
        )?;
        Ok(())
    };
    verdict(6, what, run());
}

#[test]
fn criterion_7_notation_round_trip() {
    let what = "every shipped scenario survives parse-render-parse, and ASCII aliases parse like the symbols";
    let run = || -> Result<(), String> {
        let scenarios = dsl::parse_file(builtin_catalog_source())
            .map_err(|e| format!("catalog parses: {e}"))?;
        ensure(
            scenarios.len() == 7,
            format!("7 shipped scenarios, got {}", scenarios.len()),
        )?;
        for scenario in &scenarios {
            let rendered = dsl::render_scenario(&scenario.ast);
            let reparsed = dsl::parse_scenario(&rendered)
                .map_err(|e| format!("{} re-parses: {e}", scenario.meta.id))?;
            ensure(
                reparsed == scenario.ast,
                format!("{} round-trips structurally", scenario.meta.id),
            )?;
        }

        let unicode = "IF Current task requires Rule B <Feature set FeB, Usage frequency FuB>;\n\
            WHEN There Exists Rule A <Feature set FeA, Usage frequency FuA>;\n\
            AND {FeB ∩ FeA} ⊇ {FeB ∩ FeB} ≠ ∅;\n\
            AND FuA ≫ FuB, OR FeB ⊂ FeA;\n\
            THEN Rule A is applied in place of Rule B.\n";
        let ascii = "IF Current task requires Rule B <Feature set FeB, Usage frequency FuB>;\n\
            WHEN There Exists Rule A <Feature set FeA, Usage frequency FuA>;\n\
            AND {FeB INTERSECT FeA} SUPERSET {FeB INTERSECT FeB} != EMPTY;\n\
            AND FuA >> FuB, OR FeB SUBSET FeA;\n\
            THEN Rule A is applied in place of Rule B.\n";
        let from_unicode =
            dsl::parse_scenario(unicode).map_err(|e| format!("symbol source parses: {e}"))?;
        let from_ascii =
            dsl::parse_scenario(ascii).map_err(|e| format!("alias source parses: {e}"))?;
        ensure(from_unicode == from_ascii, "alias and symbol sources agree")?;
        Ok(())
    };
    verdict(7, what, run());
}

#[test]
fn criterion_8_determinism() {
    let what = "repeated predict and evaluate runs produce byte-identical machine-readable output";
    let run = || -> Result<(), String> {
        for format in ["document", "csv"] {
            let predict_args = [
                "predict",
                "--catalog",
                &fixture("catalog.eps"),
                "--task",
                &fixture("jiong.task"),
                "--profile",
                &fixture("novice_c.profile"),
                "--format",
                format,
            ];
            let first = hedp_bin(&predict_args)?;
            let second = hedp_bin(&predict_args)?;
            ensure(
                first.status.success() && first.stdout == second.stdout,
                format!("predict --format {format} is reproducible"),
            )?;

            let evaluate_args = [
                "evaluate",
                "--corpus",
                &fixture("jiong.corpus"),
                "--format",
                format,
            ];
            let first = hedp_bin(&evaluate_args)?;
            let second = hedp_bin(&evaluate_args)?;
            ensure(
                first.status.success() && first.stdout == second.stdout,
                format!("evaluate --format {format} is reproducible"),
            )?;
        }
        Ok(())
    };
    verdict(8, what, run());
}
