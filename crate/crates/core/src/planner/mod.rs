//! Grounding and forward search.
//!
//! States are bitsets over the atoms mentioned by the problem and the ground
//! actions. Uniform-cost search with duplicate detection returns a minimum
//! cost plan; ties between equal-cost frontier nodes resolve in generation
//! order, and successors are generated in (operator name, arguments) order,
//! so results are deterministic.

mod validate;

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Atom, GroundAction, LearnedOperator, OperatorLibrary, PlanningProblem, Predicate,
};
use crate::ontology::EnvironmentRegistry;

pub use validate::{validate, ValidationReport};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("search gave up after {0} expansions")]
    ExpansionLimit(usize),
    #[error("plan step {step} refers to unknown instance `{instance}`")]
    UnknownInstance { step: usize, instance: String },
    #[error("no plan exists in {0} mode")]
    Unsolvable(SearchMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Minimum total cost; optimal.
    MinCost,
    /// Fewest steps, every action counted as 1; optimal in length.
    MinLength,
    /// Best-first on the number of unsatisfied goal literals; not optimal.
    Greedy,
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMode::MinCost => "min_cost",
            SearchMode::MinLength => "min_length",
            SearchMode::Greedy => "greedy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
    pub total_cost: u64,
    pub total_length: usize,
}

impl Plan {
    pub fn new(steps: Vec<GroundAction>) -> Self {
        let total_cost = steps.iter().map(|s| u64::from(s.cost)).sum();
        let total_length = steps.len();
        Plan {
            steps,
            total_cost,
            total_length,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.steps.iter().map(|s| s.label()).collect()
    }

    /// Activity of each step, e.g. `["Reach", "Take", ...]`.
    pub fn activities(&self) -> Vec<&'static str> {
        self.steps.iter().map(|s| s.activity.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Plan(Plan),
    Unsolvable,
}

impl Solution {
    pub fn plan(self) -> Option<Plan> {
        match self {
            Solution::Plan(p) => Some(p),
            Solution::Unsolvable => None,
        }
    }
}

fn bindings(op: &LearnedOperator, registry: &EnvironmentRegistry) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for param in &op.params {
        let candidates: Vec<&str> = registry
            .instances()
            .iter()
            .filter(|i| registry.is_instance_of(&i.name, &param.ty))
            .map(|i| i.name.as_str())
            .collect();
        out = out
            .into_iter()
            .flat_map(|b| {
                candidates.iter().map(move |c| {
                    let mut b = b.clone();
                    b.insert(param.name.clone(), c.to_string());
                    b
                })
            })
            .collect();
    }
    out
}

/// Every type-respecting binding of every operator whose inequality
/// constraints hold.
pub fn ground(library: &OperatorLibrary, registry: &EnvironmentRegistry) -> Vec<GroundAction> {
    let cubes = registry.cubes();
    let mut actions = Vec::new();
    for op in &library.operators {
        for binding in bindings(op, registry) {
            let neq_ok = op
                .pre
                .iter()
                .filter(|l| l.pred == Predicate::Neq)
                .all(|l| (binding[&l.args[0]] != binding[&l.args[1]]) == l.positive);
            if neq_ok {
                actions.push(GroundAction::instantiate(op, &binding, &cubes));
            }
        }
    }
    actions
}

type Bits = Box<[u64]>;

struct Compiled {
    pre_pos: Bits,
    pre_neg: Bits,
    add: Bits,
    del: Bits,
}

struct Encoder {
    index: HashMap<Atom, usize>,
    words: usize,
}

impl Encoder {
    fn new(problem: &PlanningProblem, actions: &[GroundAction]) -> Self {
        let mut index = HashMap::new();
        let atoms = problem
            .init
            .atoms()
            .cloned()
            .chain(
                problem
                    .goal
                    .iter()
                    .filter(|l| l.pred != Predicate::Neq)
                    .map(|l| l.atom()),
            )
            .chain(actions.iter().flat_map(|a| {
                a.pre_pos
                    .iter()
                    .chain(&a.pre_neg)
                    .chain(&a.add)
                    .chain(&a.del)
                    .cloned()
            }));
        for atom in atoms {
            let n = index.len();
            index.entry(atom).or_insert(n);
        }
        let words = index.len().div_ceil(64).max(1);
        Encoder { index, words }
    }

    fn encode<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Bits {
        let mut bits = vec![0u64; self.words].into_boxed_slice();
        for atom in atoms {
            let i = self.index[atom];
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    }
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

struct Node {
    state: Bits,
    parent: Option<(usize, usize)>,
}

/// Searches for a plan. `max_expansions` bounds the number of expanded
/// states; exceeding it is an error, not a proof of unsolvability.
pub fn solve(
    problem: &PlanningProblem,
    actions: &[GroundAction],
    mode: SearchMode,
    max_expansions: Option<usize>,
) -> Result<Solution, PlannerError> {
    // inequality goals do not depend on the state
    let static_goals_hold = problem
        .goal
        .iter()
        .filter(|l| l.pred == Predicate::Neq)
        .all(|l| (l.args[0] != l.args[1]) == l.positive);
    if !static_goals_hold {
        return Ok(Solution::Unsolvable);
    }

    let mut order: Vec<usize> = (0..actions.len()).collect();
    order.sort_by(|&a, &b| {
        (&actions[a].operator, &actions[a].args).cmp(&(&actions[b].operator, &actions[b].args))
    });
    let enc = Encoder::new(problem, actions);
    let compiled: Vec<Compiled> = order
        .iter()
        .map(|&i| {
            let a = &actions[i];
            Compiled {
                pre_pos: enc.encode(&a.pre_pos),
                pre_neg: enc.encode(&a.pre_neg),
                add: enc.encode(&a.add),
                del: enc.encode(&a.del),
            }
        })
        .collect();
    let goal_lits: Vec<_> = problem
        .goal
        .iter()
        .filter(|l| l.pred != Predicate::Neq)
        .collect();
    let goal_atoms = |positive: bool| -> Vec<Atom> {
        goal_lits
            .iter()
            .filter(|l| l.positive == positive)
            .map(|l| l.atom())
            .collect()
    };
    let goal_pos = enc.encode(&goal_atoms(true));
    let goal_neg = enc.encode(&goal_atoms(false));
    let satisfied = |s: &[u64]| subset(&goal_pos, s) && disjoint(&goal_neg, s);
    let unsatisfied = |s: &[u64]| -> u64 {
        goal_lits
            .iter()
            .filter(|l| {
                let i = enc.index[&l.atom()];
                let set = s[i / 64] & (1 << (i % 64)) != 0;
                set != l.positive
            })
            .count() as u64
    };
    let step_cost = |k: usize| -> u64 {
        match mode {
            SearchMode::MinLength => 1,
            _ => u64::from(actions[order[k]].cost),
        }
    };

    let init = enc.encode(problem.init.atoms());
    let mut nodes = vec![Node {
        state: init.clone(),
        parent: None,
    }];
    let mut best: HashMap<Bits, u64> = HashMap::from([(init.clone(), 0)]);
    let mut closed: HashSet<Bits> = HashSet::new();
    // (priority, g, sequence) in ascending order; the sequence number keeps
    // equal-priority nodes in generation order
    let mut frontier: BinaryHeap<Reverse<(u64, u64, usize)>> = BinaryHeap::new();
    let priority = |g: u64, s: &[u64]| match mode {
        SearchMode::Greedy => unsatisfied(s),
        _ => g,
    };
    frontier.push(Reverse((priority(0, &init), 0, 0)));
    let mut expansions = 0usize;

    while let Some(Reverse((_, g, id))) = frontier.pop() {
        let state = nodes[id].state.clone();
        if best.get(&state).is_some_and(|&b| b < g) || closed.contains(&state) {
            continue;
        }
        if satisfied(&state) {
            return Ok(Solution::Plan(extract_plan(&nodes, id, actions, &order)));
        }
        closed.insert(state.clone());
        expansions += 1;
        if max_expansions.is_some_and(|m| expansions > m) {
            return Err(PlannerError::ExpansionLimit(expansions - 1));
        }
        for (k, a) in compiled.iter().enumerate() {
            if !subset(&a.pre_pos, &state) || !disjoint(&a.pre_neg, &state) {
                continue;
            }
            let next: Bits = state
                .iter()
                .zip(a.del.iter().zip(a.add.iter()))
                .map(|(s, (d, ad))| (s & !d) | ad)
                .collect();
            if closed.contains(&next) {
                continue;
            }
            let g2 = g + step_cost(k);
            match best.entry(next.clone()) {
                Entry::Occupied(mut e) => {
                    if *e.get() <= g2 {
                        continue;
                    }
                    e.insert(g2);
                }
                Entry::Vacant(e) => {
                    e.insert(g2);
                }
            }
            let p = priority(g2, &next);
            nodes.push(Node {
                state: next,
                parent: Some((id, k)),
            });
            frontier.push(Reverse((p, g2, nodes.len() - 1)));
        }
    }
    Ok(Solution::Unsolvable)
}

fn extract_plan(nodes: &[Node], mut id: usize, actions: &[GroundAction], order: &[usize]) -> Plan {
    let mut steps = Vec::new();
    while let Some((parent, k)) = nodes[id].parent {
        steps.push(actions[order[k]].clone());
        id = parent;
    }
    steps.reverse();
    Plan::new(steps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostComparison {
    pub cost_plan: Plan,
    pub length_plan: Plan,
    /// Saving of the cost-optimal plan relative to the length-optimal plan,
    /// both measured in action costs.
    pub improvement_percent: f64,
}

pub fn compare_cost_modes(
    problem: &PlanningProblem,
    actions: &[GroundAction],
    max_expansions: Option<usize>,
) -> Result<CostComparison, PlannerError> {
    let run = |mode| {
        solve(problem, actions, mode, max_expansions)?
            .plan()
            .ok_or(PlannerError::Unsolvable(mode))
    };
    let cost_plan = run(SearchMode::MinCost)?;
    let length_plan = run(SearchMode::MinLength)?;
    let reference = length_plan.total_cost;
    let improvement_percent = if reference == 0 {
        0.0
    } else {
        100.0 * (reference as f64 - cost_plan.total_cost as f64) / reference as f64
    };
    Ok(CostComparison {
        cost_plan,
        length_plan,
        improvement_percent,
    })
}

#[cfg(test)]
mod tests;
