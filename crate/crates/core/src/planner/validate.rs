use serde::{Deserialize, Serialize};

use super::{Plan, PlannerError};
use crate::model::{applicable, Atom, PlanningProblem, Predicate, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_step: Option<usize>,
    pub reason: String,
}

impl ValidationReport {
    fn fail(step: Option<usize>, reason: String) -> Self {
        ValidationReport {
            valid: false,
            failing_step: step,
            reason,
        }
    }
}

/// Replays `plan` from the problem's initial state.
///
/// With `mutex`, the replay follows the physical world rather than the
/// domain: when a step newly makes `actedOn(h, c)` or `graspable(h, c)`
/// true, every other `actedOn(h, _)` (resp. `graspable(h, _)`) atom is
/// dropped before the next step is checked.
pub fn validate(
    problem: &PlanningProblem,
    plan: &Plan,
    mutex: bool,
) -> Result<ValidationReport, PlannerError> {
    for (step, action) in plan.steps.iter().enumerate() {
        if let Some(unknown) = action.instances().find(|i| !problem.registry.contains(i)) {
            return Err(PlannerError::UnknownInstance {
                step,
                instance: unknown.clone(),
            });
        }
    }

    let mut state = problem.init.clone();
    for (step, action) in plan.steps.iter().enumerate() {
        if !applicable(&state, action) {
            let missing: Vec<String> = action
                .pre_pos
                .iter()
                .filter(|a| !state.contains(a))
                .map(|a| a.to_string())
                .chain(
                    action
                        .pre_neg
                        .iter()
                        .filter(|a| state.contains(a))
                        .map(|a| format!("¬{a}")),
                )
                .collect();
            return Ok(ValidationReport::fail(
                Some(step),
                format!(
                    "step {step} {} not applicable: needs {}",
                    action.label(),
                    missing.join(", ")
                ),
            ));
        }
        let mut next = state.0.clone();
        for atom in &action.del {
            next.remove(atom);
        }
        let fresh: Vec<&Atom> = action.add.iter().filter(|a| !state.contains(a)).collect();
        next.extend(action.add.iter().cloned());
        if mutex {
            for atom in fresh {
                if matches!(atom.pred, Predicate::ActedOn | Predicate::Graspable) {
                    next.retain(|other| {
                        other.pred != atom.pred || other.args[0] != atom.args[0] || other == atom
                    });
                }
            }
        }
        state = WorldState(next);
    }

    let unmet: Vec<String> = problem
        .goal
        .iter()
        .filter(|l| !state.holds(l))
        .map(|l| l.to_string())
        .collect();
    if unmet.is_empty() {
        Ok(ValidationReport {
            valid: true,
            failing_step: None,
            reason: "all steps applicable and goal reached".into(),
        })
    } else {
        Ok(ValidationReport::fail(
            None,
            format!("goal not reached: {}", unmet.join(", ")),
        ))
    }
}
