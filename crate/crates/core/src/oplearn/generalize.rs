use std::collections::{BTreeMap, BTreeSet};

use super::LearnError;
use crate::model::{Literal, Param, Predicate};
use crate::ontology::EnvironmentRegistry;

type Binding = BTreeMap<String, String>;

/// Above this many candidate renamings the first-occurrence order is used.
const MAX_RENAMINGS: usize = 40_320;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generalized {
    pub params: Vec<Param>,
    pub pre: BTreeSet<Literal>,
    pub eff: BTreeSet<Literal>,
}

/// Replaces every instance by a typed variable (`?Wooden_cube1`, ...), one
/// variable per distinct instance, and adds pairwise inequality between
/// variables of the same type.
///
/// Variable numbering within a type is chosen so that the sorted literal
/// lists are lexicographically smallest; this makes the result independent
/// of the instance names, so demonstrations that differ only by a
/// type-preserving renaming produce identical operators.
pub fn generalize(
    pre: &BTreeSet<Literal>,
    eff: &BTreeSet<Literal>,
    registry: &EnvironmentRegistry,
) -> Result<Generalized, LearnError> {
    let mut by_type: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for lit in pre.iter().chain(eff) {
        for arg in &lit.args {
            if seen.insert(arg.clone()) {
                let ty = registry
                    .type_of(arg)
                    .ok_or_else(|| LearnError::UnknownInstance(arg.clone()))?;
                by_type.entry(ty.to_string()).or_default().push(arg.clone());
            }
        }
    }

    let groups: Vec<(String, Vec<String>)> = by_type.into_iter().collect();
    let total: usize = groups
        .iter()
        .map(|(_, members)| (1..=members.len()).product::<usize>())
        .try_fold(1usize, |acc, n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);

    let orders: Vec<Vec<Vec<String>>> = if total <= MAX_RENAMINGS {
        groups
            .iter()
            .map(|(_, members)| permutations(members))
            .collect()
    } else {
        groups
            .iter()
            .map(|(_, members)| vec![members.clone()])
            .collect()
    };

    // lifted pre, lifted eff, instance -> variable
    let mut best: Option<(Vec<Literal>, Vec<Literal>, Binding)> = None;
    let mut choice = vec![0usize; groups.len()];
    loop {
        let mut binding = BTreeMap::new();
        for (g, (ty, _)) in groups.iter().enumerate() {
            for (i, inst) in orders[g][choice[g]].iter().enumerate() {
                binding.insert(inst.clone(), format!("?{}{}", ty, i + 1));
            }
        }
        let lifted_pre: Vec<Literal> = lift(pre, &binding);
        let lifted_eff: Vec<Literal> = lift(eff, &binding);
        let better = match &best {
            None => true,
            Some((bp, be, _)) => (&lifted_pre, &lifted_eff) < (bp, be),
        };
        if better {
            best = Some((lifted_pre, lifted_eff, binding));
        }
        // odometer over the per-type permutation choices
        let mut g = 0;
        loop {
            if g == groups.len() {
                let (pre, eff, _) = best.expect("at least one renaming");
                return Ok(finish(&groups, pre, eff));
            }
            choice[g] += 1;
            if choice[g] < orders[g].len() {
                break;
            }
            choice[g] = 0;
            g += 1;
        }
    }
}

fn lift(literals: &BTreeSet<Literal>, binding: &BTreeMap<String, String>) -> Vec<Literal> {
    let set: BTreeSet<Literal> = literals.iter().map(|l| l.substitute(binding)).collect();
    set.into_iter().collect()
}

fn finish(groups: &[(String, Vec<String>)], pre: Vec<Literal>, eff: Vec<Literal>) -> Generalized {
    let mut params = Vec::new();
    for (ty, members) in groups {
        for i in 0..members.len() {
            params.push(Param::new(format!("?{}{}", ty, i + 1), ty.clone()));
        }
    }
    let mut pre: BTreeSet<Literal> = pre.into_iter().collect();
    for (ty, members) in groups {
        for i in 1..=members.len() {
            for j in 1..=members.len() {
                if i != j {
                    let (a, b) = (format!("?{ty}{i}"), format!("?{ty}{j}"));
                    pre.insert(Literal::pos(Predicate::Neq, &[&a, &b]));
                }
            }
        }
    }
    Generalized {
        params,
        pre,
        eff: eff.into_iter().collect(),
    }
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}
