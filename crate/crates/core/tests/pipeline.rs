mod common;

use demo2pddl::grounding::GroundingConfig;
use demo2pddl::model::OperatorLibrary;
use demo2pddl::ontology::EnvironmentRegistry;
use demo2pddl::pipeline::{learn_demo, learn_library};
use demo2pddl::segmentation::{ActivityLabel, DEFAULT_DEBOUNCE};
use demo2pddl::synthgen::generate_corpus;
use demo2pddl::trace::parse_trace;

#[test]
fn corpus_learning_is_deterministic() {
    let a = common::corpus_library(common::CORPUS_SEED, false);
    let b = common::corpus_library(common::CORPUS_SEED, false);
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn library_json_round_trip() {
    let lib = common::corpus_library(common::CORPUS_SEED, true);
    let back = OperatorLibrary::from_json(&lib.to_json()).unwrap();
    assert_eq!(back, lib);
}

#[test]
fn learning_from_reread_traces_matches() {
    let reg = EnvironmentRegistry::demonstration();
    let demos = generate_corpus(common::CORPUS_SEED, &reg).unwrap();
    let reread: Vec<_> = demos
        .iter()
        .map(|d| parse_trace(&d.trace.to_jsonl(), &reg).unwrap())
        .collect();
    let direct = learn_library(
        demos.iter().map(|d| &d.trace),
        &GroundingConfig::default(),
        DEFAULT_DEBOUNCE,
        false,
    )
    .unwrap();
    let from_files = learn_library(
        reread.iter(),
        &GroundingConfig::default(),
        DEFAULT_DEBOUNCE,
        false,
    )
    .unwrap();
    assert_eq!(direct, from_files);
}

#[test]
fn appending_demos_accumulates_counts() {
    let reg = EnvironmentRegistry::demonstration();
    let demos = generate_corpus(common::CORPUS_SEED, &reg).unwrap();
    let mut lib = OperatorLibrary::new();
    let mut stacks = 0;
    for d in &demos {
        let segments = learn_demo(
            &d.trace,
            &GroundingConfig::default(),
            DEFAULT_DEBOUNCE,
            &mut lib,
        )
        .unwrap();
        stacks += segments
            .iter()
            .filter(|s| s.label == ActivityLabel::Stack)
            .count() as u32;
    }
    assert_eq!(lib.type_count(ActivityLabel::Stack), stacks);
    assert!(lib.operators.iter().all(|op| op.cost.is_none()));
}

#[test]
fn every_activity_is_learned() {
    let lib = common::corpus_library(common::CORPUS_SEED, false);
    for activity in ActivityLabel::ALL {
        assert!(lib.of_activity(activity).count() > 0, "{activity}");
    }
    assert!(lib
        .operators
        .iter()
        .all(|op| op.cost.is_some_and(|c| (1..=100).contains(&c))));
}
