use crate::model::{Literal, OperatorLibrary, Predicate, Revocation};

/// Adds "at most one object per hand" knowledge for `actedOn` and
/// `graspable`: an operator that may newly set `pred(h, c)` also clears
/// `pred(h, x)` for every other cube `x`.
///
/// "May newly set" means the effect asserts the atom and the preconditions
/// do not already require it. Idempotent.
pub fn repair_exclusivity(library: &mut OperatorLibrary) {
    for op in &mut library.operators {
        for pred in [Predicate::ActedOn, Predicate::Graspable] {
            let targets: Vec<Literal> = op
                .eff
                .iter()
                .filter(|l| l.pred == pred && l.positive && !op.pre.contains(l))
                .cloned()
                .collect();
            for lit in targets {
                let rev = Revocation {
                    pred,
                    hand: lit.args[0].clone(),
                    keep: lit.args[1].clone(),
                };
                if !op.revocations.contains(&rev) {
                    op.revocations.push(rev);
                }
            }
        }
        op.revocations.sort();
    }
}
