use std::collections::BTreeSet;

use super::*;
use crate::model::{Literal, Param, WorldState};
use crate::ontology::{ObjectInstance, Role, TypeHierarchy};
use crate::segmentation::ActivityLabel;
use ActivityLabel::*;
use Predicate::*;

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

fn reach(cost: u32) -> LearnedOperator {
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

fn take(cost: u32) -> LearnedOperator {
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

fn put(index: u32, cost: u32) -> LearnedOperator {
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

fn stack(cost: u32) -> LearnedOperator {
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

fn library(ops: Vec<LearnedOperator>) -> OperatorLibrary {
    OperatorLibrary { operators: ops }
}

fn exec() -> EnvironmentRegistry {
    EnvironmentRegistry::execution()
}

fn problem(goal: Vec<Literal>) -> PlanningProblem {
    PlanningProblem::new(exec(), WorldState::resting(&exec()), goal).unwrap()
}

fn red_on_green() -> Vec<Literal> {
    vec![Literal::pos(OnTop, &["Cube_red3", "Cube_green3"])]
}

#[test]
fn stack_grounds_over_ordered_cube_pairs() {
    let actions = ground(&library(vec![stack(1)]), &exec());
    assert_eq!(actions.len(), 12);
    assert!(actions.iter().all(|a| a.args[0] == "Robot_gripper"));
    assert!(actions.iter().all(|a| a.args[1] != a.args[2]));
    let distinct: BTreeSet<_> = actions.iter().map(|a| a.args.clone()).collect();
    assert_eq!(distinct.len(), 12);
}

#[test]
fn no_cubes_no_stacks() {
    let reg = EnvironmentRegistry::new(
        Role::Execution,
        TypeHierarchy::default(),
        vec![
            ObjectInstance::new("Robot_gripper", "Hand"),
            ObjectInstance::new("high_table", "Table"),
        ],
    )
    .unwrap();
    assert!(ground(&library(vec![stack(1)]), &reg).is_empty());
}

#[test]
fn repaired_operator_expands_revocations_over_cubes() {
    let mut lib = library(vec![reach(1)]);
    crate::oplearn::repair_exclusivity(&mut lib);
    let actions = ground(&lib, &exec());
    let a = actions.iter().find(|a| a.args[1] == "Cube_red3").unwrap();
    // three other cubes, two predicates
    assert_eq!(a.del.len(), 6);
    assert!(a.del.iter().all(|d| d.args[1] != "Cube_red3"));
}

#[test]
fn full_cycle_plan() {
    let lib = library(vec![reach(10), take(10), put(1, 10), stack(10)]);
    let actions = ground(&lib, &exec());
    let plan = solve(
        &problem(red_on_green()),
        &actions,
        SearchMode::MinCost,
        None,
    )
    .unwrap()
    .plan()
    .unwrap();
    assert_eq!(plan.activities(), vec!["Reach", "Take", "Put", "Stack"]);
    assert_eq!(plan.total_cost, 40);
    assert_eq!(plan.total_length, 4);
    assert_eq!(
        plan.labels()[3],
        "(Stack Robot_gripper Cube_green3 Cube_red3)"
    );
    let report = validate(&problem(red_on_green()), &plan, false).unwrap();
    assert!(report.valid, "{}", report.reason);
}

#[test]
fn satisfied_goal_gives_empty_plan() {
    let goal = vec![Literal::pos(HandOpen, &["Robot_gripper"])];
    let actions = ground(&library(vec![reach(1)]), &exec());
    let plan = solve(&problem(goal.clone()), &actions, SearchMode::MinCost, None)
        .unwrap()
        .plan()
        .unwrap();
    assert!(plan.steps.is_empty());
    assert_eq!(plan.total_cost, 0);
    assert!(validate(&problem(goal), &plan, true).unwrap().valid);
}

#[test]
fn unreachable_goals_are_unsolvable() {
    let actions = ground(
        &library(vec![reach(1), take(1), put(1, 1), stack(1)]),
        &exec(),
    );
    let on_itself = vec![Literal::pos(OnTop, &["Cube_red3", "Cube_red3"])];
    assert_eq!(
        solve(&problem(on_itself), &actions, SearchMode::MinCost, None).unwrap(),
        Solution::Unsolvable
    );
    let impossible_neq = vec![Literal::pos(Neq, &["Cube_red3", "Cube_red3"])];
    assert_eq!(
        solve(
            &problem(impossible_neq),
            &actions,
            SearchMode::MinCost,
            None
        )
        .unwrap(),
        Solution::Unsolvable
    );
}

#[test]
fn expansion_limit_is_an_error() {
    let actions = ground(
        &library(vec![reach(1), take(1), put(1, 1), stack(1)]),
        &exec(),
    );
    let err = solve(
        &problem(red_on_green()),
        &actions,
        SearchMode::MinCost,
        Some(2),
    )
    .unwrap_err();
    assert!(matches!(err, PlannerError::ExpansionLimit(2)));
}

#[test]
fn frequent_configuration_is_preferred() {
    // counts 9 and 1 out of 10
    let frequent = crate::oplearn::operator_cost(9, 10);
    let rare = crate::oplearn::operator_cost(1, 10);
    assert!(frequent < rare);
    let lib = library(vec![
        reach(1),
        take(1),
        put(1, rare),
        put(2, frequent),
        stack(1),
    ]);
    let actions = ground(&lib, &exec());
    let plan = solve(
        &problem(red_on_green()),
        &actions,
        SearchMode::MinCost,
        None,
    )
    .unwrap()
    .plan()
    .unwrap();
    assert_eq!(plan.steps[2].operator, "Put2");
}

#[test]
fn cost_modes_differ_only_with_unequal_costs() {
    // Put is tried first by the length search, Put2 is cheaper
    let lib = library(vec![reach(5), take(5), put(1, 90), put(2, 10), stack(5)]);
    let actions = ground(&lib, &exec());
    let c = compare_cost_modes(&problem(red_on_green()), &actions, None).unwrap();
    assert_eq!(c.length_plan.total_cost, 105);
    assert_eq!(c.cost_plan.total_cost, 25);
    assert_eq!(c.cost_plan.total_length, c.length_plan.total_length);
    assert!((c.improvement_percent - 100.0 * 80.0 / 105.0).abs() < 1e-9);

    let lib = library(vec![reach(7), take(7), put(1, 7), put(2, 7), stack(7)]);
    let actions = ground(&lib, &exec());
    let c = compare_cost_modes(&problem(red_on_green()), &actions, None).unwrap();
    assert_eq!(c.improvement_percent, 0.0);
}

#[test]
fn greedy_finds_a_valid_plan() {
    let actions = ground(
        &library(vec![reach(1), take(1), put(1, 1), stack(1)]),
        &exec(),
    );
    let plan = solve(&problem(red_on_green()), &actions, SearchMode::Greedy, None)
        .unwrap()
        .plan()
        .unwrap();
    assert!(
        validate(&problem(red_on_green()), &plan, false)
            .unwrap()
            .valid
    );
}

fn double_reach_goal() -> Vec<Literal> {
    vec![
        Literal::pos(InHand, &["Robot_gripper", "Cube_red3"]),
        Literal::pos(Graspable, &["Robot_gripper", "Cube_blue3"]),
    ]
}

#[test]
fn double_reach_breaks_under_mutex_semantics() {
    let lib = library(vec![reach(1), take(1)]);
    let actions = ground(&lib, &exec());
    let p = problem(double_reach_goal());
    let plan = solve(&p, &actions, SearchMode::MinCost, None)
        .unwrap()
        .plan()
        .unwrap();
    assert_eq!(plan.activities(), vec!["Reach", "Reach", "Take"]);
    assert!(validate(&p, &plan, false).unwrap().valid);
    let report = validate(&p, &plan, true).unwrap();
    assert!(!report.valid);

    // the order where the held cube is reached first fails at the Take
    let reach_red = actions
        .iter()
        .find(|a| a.label() == "(Reach Robot_gripper Cube_red3)")
        .unwrap();
    let reach_blue = actions
        .iter()
        .find(|a| a.label() == "(Reach Robot_gripper Cube_blue3)")
        .unwrap();
    let take_red = actions
        .iter()
        .find(|a| a.label() == "(Take Robot_gripper Cube_red3)")
        .unwrap();
    let plan = Plan::new(vec![
        reach_red.clone(),
        reach_blue.clone(),
        take_red.clone(),
    ]);
    assert!(validate(&p, &plan, false).unwrap().valid);
    let report = validate(&p, &plan, true).unwrap();
    assert_eq!(report.failing_step, Some(2));

    // after repair, the goal cannot be reached at all
    let mut repaired = lib.clone();
    crate::oplearn::repair_exclusivity(&mut repaired);
    let actions = ground(&repaired, &exec());
    assert_eq!(
        solve(&p, &actions, SearchMode::MinCost, None).unwrap(),
        Solution::Unsolvable
    );
}

#[test]
fn validation_rejects_unknown_instances() {
    let mut lib_actions = ground(&library(vec![reach(1)]), &exec());
    let mut a = lib_actions.remove(0);
    a.args[1] = "Cube_purple9".into();
    let err = validate(&problem(red_on_green()), &Plan::new(vec![a]), false).unwrap_err();
    assert!(matches!(err, PlannerError::UnknownInstance { step: 0, .. }));
}

#[test]
fn solve_is_deterministic() {
    let lib = library(vec![reach(3), take(3), put(1, 3), put(2, 3), stack(3)]);
    let actions = ground(&lib, &exec());
    let goal = vec![
        Literal::pos(OnTop, &["Cube_red3", "Cube_green3"]),
        Literal::pos(OnTop, &["Cube_blue3", "Cube_yellow3"]),
    ];
    let a = solve(&problem(goal.clone()), &actions, SearchMode::MinCost, None).unwrap();
    let mut reversed = actions.clone();
    reversed.reverse();
    let b = solve(&problem(goal), &reversed, SearchMode::MinCost, None).unwrap();
    assert_eq!(a, b);
}
