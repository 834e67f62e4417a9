//! Exhaustive enumeration of action sequences, used as a reference for the planner.

use demo2pddl::model::Predicate::*;
use demo2pddl::model::{applicable, apply, GroundAction, Literal, PlanningProblem, WorldState};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use super::fixtures::*;

pub const ORACLE_DEPTH: usize = 6;

/// Cheapest plan of at most `depth` steps, as (cost, length).
pub fn enumerate(
    problem: &PlanningProblem,
    actions: &[GroundAction],
    depth: usize,
) -> Option<(u64, usize)> {
    fn go(
        state: &WorldState,
        problem: &PlanningProblem,
        actions: &[GroundAction],
        left: usize,
        cost: u64,
        len: usize,
        best: &mut Option<(u64, usize)>,
    ) {
        if problem.goal_satisfied(state) {
            if best.is_none_or(|(c, _)| cost < c) {
                *best = Some((cost, len));
            }
            return;
        }
        if left == 0 {
            return;
        }
        for a in actions.iter().filter(|a| applicable(state, a)) {
            let next = apply(state, a).unwrap();
            go(
                &next,
                problem,
                actions,
                left - 1,
                cost + a.cost as u64,
                len + 1,
                best,
            );
        }
    }
    let mut best = None;
    go(&problem.init, problem, actions, depth, 0, 0, &mut best);
    best
}

/// Whether the enumeration minimum is also the global minimum: any longer
/// plan would cost at least `(depth + 1) * cheapest action`.
pub fn is_certified(best: u64, actions: &[GroundAction], depth: usize) -> bool {
    let cheapest = actions.iter().map(|a| a.cost as u64).min().unwrap_or(1);
    best < (depth as u64 + 1) * cheapest
}

pub struct Instance {
    pub problem: PlanningProblem,
    pub library: demo2pddl::model::OperatorLibrary,
}

/// Random registry of 2 to 4 cubes, random operator costs drawn from `costs`,
/// optional extra configurations, and a goal of one or two literals. Grounds
/// to at most 30 actions.
pub fn random_instance(rng: &mut impl Rng, costs: RangeInclusive<u32>) -> Instance {
    let n = rng.gen_range(2..=4);
    let registry = small_registry(n);
    let mut ops = vec![
        reach(rng.gen_range(costs.clone())),
        take(rng.gen_range(costs.clone())),
        put(1, rng.gen_range(costs.clone())),
    ];
    if rng.gen_bool(0.5) {
        ops.push(put(2, rng.gen_range(costs.clone())));
    }
    ops.push(stack(rng.gen_range(costs.clone())));
    if n <= 3 && rng.gen_bool(0.3) {
        ops.push(restore(rng.gen_range(costs.clone())));
    }
    let cubes = cube_names(n);
    let mut picked = cubes.clone();
    picked.shuffle(rng);
    let (a, b) = (picked[0].as_str(), picked[1].as_str());
    let mut goal = vec![Literal::pos(OnTop, &[a, b])];
    match rng.gen_range(0..5) {
        0 => goal.push(Literal::pos(
            Graspable,
            &["Robot_gripper", picked[n - 1].as_str()],
        )),
        1 => goal.push(Literal::neg(OnTop, &[a, "high_table"])),
        2 => goal.push(Literal::pos(OnTop, &[b, a])),
        // a single hand never holds two cubes
        3 => {
            goal = vec![
                Literal::pos(InHand, &["Robot_gripper", a]),
                Literal::pos(InHand, &["Robot_gripper", b]),
            ]
        }
        _ => {}
    }
    Instance {
        problem: resting_problem(registry, goal),
        library: library(ops),
    }
}
