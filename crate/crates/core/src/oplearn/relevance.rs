use std::collections::BTreeSet;

use super::{hand_atoms, OperatorDraft};
use crate::model::Literal;

/// Keeps the literals an operator should mention.
///
/// Environment atoms appear only if their value changed. Hand atoms appear
/// if they changed between the pre-state and the final state, or if they
/// held throughout the activity; for `handMove`/`handOpen` a constant false
/// value counts too, since those variables are binary to begin with.
/// Unchanged-false atoms of multi-valued variables never appear.
pub fn filter_relevant(draft: &OperatorDraft) -> (BTreeSet<Literal>, BTreeSet<Literal>) {
    let mut pre = BTreeSet::new();
    let mut eff = BTreeSet::new();

    let before = hand_atoms(&draft.hand, &draft.pre_state);
    let after = hand_atoms(&draft.hand, &draft.eff_state);
    for atom in before.symmetric_difference(&after) {
        pre.insert(Literal::from_atom(atom.clone(), before.contains(atom)));
        eff.insert(Literal::from_atom(atom.clone(), after.contains(atom)));
    }
    for lit in &draft.constant {
        pre.insert(lit.clone());
        eff.insert(lit.clone());
    }
    for (atom, &(was, is)) in &draft.env_changes {
        if was != is {
            pre.insert(Literal::from_atom(atom.clone(), was));
            eff.insert(Literal::from_atom(atom.clone(), is));
        }
    }
    (pre, eff)
}
