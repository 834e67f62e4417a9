//! Small hand-written libraries shared by several test targets.

use demo2pddl::model::Predicate::*;
use demo2pddl::model::{
    LearnedOperator, Literal, OperatorLibrary, Param, PlanningProblem, WorldState,
};
use demo2pddl::ontology::{EnvironmentRegistry, ObjectInstance, Role, TypeHierarchy};
use demo2pddl::segmentation::ActivityLabel::{self, *};

const H: &str = "?Hand1";
const C1: &str = "?Wooden_cube1";
const C2: &str = "?Wooden_cube2";
const T: &str = "?Table1";

fn op(
    activity: ActivityLabel,
    config_index: u32,
    params: &[(&str, &str)],
    pre: &[Literal],
    eff: &[Literal],
    cost: u32,
) -> LearnedOperator {
    LearnedOperator {
        activity,
        config_index,
        params: params.iter().map(|(n, t)| Param::new(*n, *t)).collect(),
        pre: pre.iter().cloned().collect(),
        eff: eff.iter().cloned().collect(),
        count: None,
        cost: Some(cost),
        revocations: vec![],
    }
}

pub fn reach(cost: u32) -> LearnedOperator {
    op(
        Reach,
        1,
        &[(H, "Hand"), (C1, "Wooden_cube")],
        &[
            Literal::pos(HandOpen, &[H]),
            Literal::neg(ActedOn, &[H, C1]),
        ],
        &[
            Literal::pos(ActedOn, &[H, C1]),
            Literal::pos(Graspable, &[H, C1]),
        ],
        cost,
    )
}

pub fn take(cost: u32) -> LearnedOperator {
    op(
        Take,
        1,
        &[(H, "Hand"), (C1, "Wooden_cube")],
        &[
            Literal::pos(HandOpen, &[H]),
            Literal::pos(ActedOn, &[H, C1]),
            Literal::pos(Graspable, &[H, C1]),
        ],
        &[
            Literal::neg(HandOpen, &[H]),
            Literal::neg(ActedOn, &[H, C1]),
            Literal::neg(Graspable, &[H, C1]),
            Literal::pos(InHand, &[H, C1]),
        ],
        cost,
    )
}

pub fn put(index: u32, cost: u32) -> LearnedOperator {
    op(
        Put,
        index,
        &[(H, "Hand"), (T, "Table"), (C1, "Wooden_cube")],
        &[
            Literal::pos(InHand, &[H, C1]),
            Literal::pos(OnTop, &[C1, T]),
        ],
        &[Literal::neg(OnTop, &[C1, T]), Literal::pos(HandMove, &[H])],
        cost,
    )
}

pub fn stack(cost: u32) -> LearnedOperator {
    op(
        Stack,
        1,
        &[(H, "Hand"), (C1, "Wooden_cube"), (C2, "Wooden_cube")],
        &[
            Literal::pos(InHand, &[H, C2]),
            Literal::pos(HandMove, &[H]),
            Literal::neg(OnTop, &[C2, C1]),
            Literal::pos(Neq, &[C1, C2]),
            Literal::pos(Neq, &[C2, C1]),
        ],
        &[
            Literal::pos(OnTop, &[C2, C1]),
            Literal::neg(InHand, &[H, C2]),
            Literal::neg(HandMove, &[H]),
            Literal::pos(HandOpen, &[H]),
        ],
        cost,
    )
}

/// Unstacks a cube back onto the table while holding nothing.
pub fn restore(cost: u32) -> LearnedOperator {
    op(
        IdleMotion,
        1,
        &[
            (H, "Hand"),
            (C1, "Wooden_cube"),
            (C2, "Wooden_cube"),
            (T, "Table"),
        ],
        &[
            Literal::pos(HandOpen, &[H]),
            Literal::pos(OnTop, &[C2, C1]),
            Literal::pos(Neq, &[C1, C2]),
            Literal::pos(Neq, &[C2, C1]),
        ],
        &[
            Literal::neg(OnTop, &[C2, C1]),
            Literal::pos(OnTop, &[C2, T]),
        ],
        cost,
    )
}

pub fn library(ops: Vec<LearnedOperator>) -> OperatorLibrary {
    OperatorLibrary { operators: ops }
}

/// Two Put configurations where the length search meets the expensive one first.
pub fn unequal_cost_library() -> OperatorLibrary {
    library(vec![reach(5), take(5), put(1, 90), put(2, 10), stack(5)])
}

pub fn equal_cost_library() -> OperatorLibrary {
    library(vec![reach(7), take(7), put(1, 7), put(2, 7), stack(7)])
}

pub fn cube_names(n: usize) -> Vec<String> {
    ["Cube_red3", "Cube_blue3", "Cube_green3", "Cube_yellow3"][..n]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// One gripper, one table and `n` cubes.
pub fn small_registry(n: usize) -> EnvironmentRegistry {
    let mut instances = vec![ObjectInstance::new("Robot_gripper", "Hand")];
    instances.extend(
        cube_names(n)
            .into_iter()
            .map(|c| ObjectInstance::new(c, "Wooden_cube")),
    );
    instances.push(ObjectInstance::new("high_table", "Table"));
    EnvironmentRegistry::new(Role::Execution, TypeHierarchy::default(), instances).unwrap()
}

pub fn resting_problem(registry: EnvironmentRegistry, goal: Vec<Literal>) -> PlanningProblem {
    let init = WorldState::resting(&registry);
    PlanningProblem::new(registry, init, goal).unwrap()
}
