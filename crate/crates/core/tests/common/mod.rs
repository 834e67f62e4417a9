#![allow(dead_code)]

use demo2pddl::grounding::GroundingConfig;
use demo2pddl::model::{load_goal, Literal, OperatorLibrary, PlanningProblem, WorldState};
use demo2pddl::ontology::EnvironmentRegistry;
use demo2pddl::pipeline::learn_library;
use demo2pddl::segmentation::DEFAULT_DEBOUNCE;
use demo2pddl::synthgen::generate_corpus;

pub mod fixtures;
pub mod oracle;

pub const CORPUS_SEED: u64 = 7;

pub fn workspace_file(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

pub fn goal(n: usize) -> Vec<Literal> {
    load_goal(workspace_file(&format!("goals/goal{n}.json"))).unwrap()
}

pub fn execution_problem(goal: Vec<Literal>) -> PlanningProblem {
    let reg = EnvironmentRegistry::execution();
    PlanningProblem::new(reg.clone(), WorldState::resting(&reg), goal).unwrap()
}

pub fn corpus_library(seed: u64, repair: bool) -> OperatorLibrary {
    let reg = EnvironmentRegistry::demonstration();
    let demos = generate_corpus(seed, &reg).unwrap();
    learn_library(
        demos.iter().map(|d| &d.trace),
        &GroundingConfig::default(),
        DEFAULT_DEBOUNCE,
        repair,
    )
    .unwrap()
}
