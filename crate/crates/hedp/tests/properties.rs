//! Property tests that pit the trigger checkers and effort metrics against
//! independent brute-force oracles on randomized inputs, plus structural
//! round-trips of the scenario notation.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use proptest::prelude::*;

use hedp::catalog::builtin_catalog_source;
use hedp::corpus::{DebugHistory, Verdict, VersionRecord};
use hedp::dsl;
use hedp::engine::{check_post_completion, check_selectivity};
use hedp::metrics::{sde, MatchMap};
use hedp::model::{InfoItem, RelationFamily, RelationSpec, Subtask};

// ---------------------------------------------------------------------------
// post-completion: exhaustive evaluation over every (parent, main, trailing)
// candidate triple, instead of the checker's single find() per parent.

#[derive(Debug, Clone)]
struct TreeShape {
    is_main: bool,
    necessary: bool,
    children: Vec<TreeShape>,
}

fn shape_strategy() -> impl Strategy<Value = TreeShape> {
    let leaf = (any::<bool>(), any::<bool>()).prop_map(|(is_main, necessary)| TreeShape {
        is_main,
        necessary,
        children: Vec::new(),
    });
    leaf.prop_recursive(3, 24, 4, |inner| {
        (
            any::<bool>(),
            any::<bool>(),
            prop::collection::vec(inner, 0..4),
        )
            .prop_map(|(is_main, necessary, children)| TreeShape {
                is_main,
                necessary,
                children,
            })
    })
}

fn build_tree(shape: &TreeShape, next_id: &mut usize) -> Subtask {
    let id = format!("t{}", *next_id);
    *next_id += 1;
    Subtask {
        id,
        description: String::new(),
        children: shape
            .children
            .iter()
            .map(|c| build_tree(c, next_id))
            .collect(),
        is_main: shape.is_main,
        necessary_for_parent: shape.necessary,
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn post_completion_checker_agrees_with_brute_force(shape in shape_strategy()) {
        let mut next_id = 0;
        let root = build_tree(&shape, &mut next_id);
        let predictions = check_post_completion(&root);
        let actual: BTreeSet<(String, String, String)> = predictions
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
        prop_assert_eq!(&actual, &expected);
        prop_assert_eq!(predictions.len(), expected.len());
    }
}

// ---------------------------------------------------------------------------
// selectivity: double loop over all ordered item pairs, instead of the
// checker's first-distractor find().

fn items_strategy() -> impl Strategy<Value = Vec<InfoItem>> {
    prop::collection::vec((0u8..=10, 0u8..=10), 0..8).prop_map(|pairs| {
        pairs
            .into_iter()
            .enumerate()
            .map(|(index, (saliency, logic_importance))| InfoItem {
                id: format!("i{index}"),
                location_ref: format!("loc{index}"),
                saliency,
                logic_importance,
                content: String::new(),
                omission_form: None,
            })
            .collect()
    })
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn selectivity_checker_agrees_with_brute_force(items in items_strategy()) {
        let predictions = check_selectivity(&items);
        let actual: Vec<(String, String)> = predictions
            .iter()
            .map(|p| (p.bindings["T_i"].clone(), p.bindings["T_j"].clone()))
            .collect();
        prop_assert_eq!(actual, selectivity_oracle(&items));
    }
}

// ---------------------------------------------------------------------------
// exponential trap: the linear model fitted to the first samples agrees with
// the true relation exactly where integer arithmetic says it must.

#[test]
fn exponential_trap_equality_set_is_exactly_one_and_two() {
    let relation = RelationSpec {
        id: "height".into(),
        samples: vec![(1.0, 8.0), (2.0, 16.0), (3.0, 32.0)],
        true_family: RelationFamily::AffineExponential,
        true_params: vec![2.0, 2.0],
        var_x: "n".into(),
        var_y: "h".into(),
        location_ref: "spot".into(),
    };
    let by_integers: BTreeSet<u32> = (1..=7u32).filter(|n| 8 * n == 1 << (n + 2)).collect();
    let by_library: BTreeSet<u32> = (1..=7u32)
        .filter(|&n| {
            let truth = relation.true_value(f64::from(n)).unwrap();
            (8.0 * f64::from(n) - truth).abs() <= 1e-9
        })
        .collect();
    assert_eq!(by_integers, BTreeSet::from([1, 2]));
    assert_eq!(by_library, BTreeSet::from([1, 2]));
}

// ---------------------------------------------------------------------------
// saved debugging effort: per-version forward search instead of the run
// accumulator, on randomized five-version histories.

fn history_strategy() -> impl Strategy<Value = DebugHistory> {
    let defect_spec = proptest::option::of((1usize..=5, proptest::option::of(0usize..4)));
    (prop::collection::vec(defect_spec, 4), any::<bool>()).prop_map(|(specs, accepted)| {
        let mut versions: Vec<VersionRecord> = (1..=5)
            .map(|index| VersionRecord {
                index,
                verdict: Verdict::Wa,
                introduced: BTreeSet::new(),
                fixed: BTreeSet::new(),
            })
            .collect();
        for (slot, spec) in specs.iter().enumerate() {
            let Some((intro, fix_offset)) = spec else {
                continue;
            };
            let id = format!("F{}", slot + 1);
            versions[intro - 1].introduced.insert(id.clone());
            if let Some(offset) = fix_offset {
                let fix = intro + 1 + offset;
                if fix <= 5 {
                    versions[fix - 1].fixed.insert(id);
                }
            }
        }
        versions[4].verdict = if accepted { Verdict::Ac } else { Verdict::Re };
        DebugHistory {
            programmer_id: "PX".into(),
            versions,
        }
    })
}

fn match_map(predicted: [bool; 4]) -> MatchMap {
    let pairs: BTreeMap<String, Option<String>> = predicted
        .iter()
        .enumerate()
        .map(|(slot, &hit)| {
            let scenario = hit.then(|| format!("ES{}", slot + 1));
            (format!("F{}", slot + 1), scenario)
        })
        .collect();
    MatchMap { pairs }
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sde_agrees_exactly_with_the_brute_force_oracle(
        history in history_strategy(),
        predicted in any::<[bool; 4]>(),
    ) {
        let matches = match_map(predicted);
        prop_assert_eq!(sde(&history, &matches), sde_oracle(&history, &matches));
    }

    #[test]
    fn sde_stays_within_the_unit_interval(
        history in history_strategy(),
        predicted in any::<[bool; 4]>(),
    ) {
        let value = sde(&history, &match_map(predicted));
        prop_assert!((0.0..=1.0).contains(&value));
    }

    #[test]
    fn shrinking_the_match_set_never_raises_sde(
        history in history_strategy(),
        predicted in any::<[bool; 4]>(),
    ) {
        let matches = match_map(predicted);
        let baseline = sde(&history, &matches);
        for id in matches.predicted_ids() {
            let shrunk = matches.without(&id);
            prop_assert!(sde(&history, &shrunk) <= baseline);
        }
    }
}

// ---------------------------------------------------------------------------
// notation round-trip: rendering a parsed scenario and re-parsing it gives
// the same structure, for every shipped scenario.

#[test]
fn every_shipped_scenario_round_trips_through_the_renderer() {
    let scenarios = dsl::parse_file(builtin_catalog_source()).unwrap();
    assert_eq!(scenarios.len(), 7);
    for scenario in &scenarios {
        let rendered = dsl::render_scenario(&scenario.ast);
        let reparsed = dsl::parse_scenario(&rendered).unwrap();
        assert_eq!(reparsed, scenario.ast, "scenario {}", scenario.meta.id);
    }
}

#[test]
fn ascii_aliases_and_unicode_sources_parse_identically() {
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
    let from_unicode = dsl::parse_scenario(unicode).unwrap();
    let from_ascii = dsl::parse_scenario(ascii).unwrap();
    assert_eq!(from_unicode, from_ascii);
}
