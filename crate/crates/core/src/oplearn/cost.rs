use crate::model::OperatorLibrary;

/// `⌈100·(1 − count/type_count)⌉`, clamped to at least 1 so no action is free.
pub fn operator_cost(count: u32, type_count: u32) -> u32 {
    assert!(
        count >= 1 && count <= type_count,
        "count {count} of {type_count}"
    );
    let (count, total) = (u64::from(count), u64::from(type_count));
    let raw = (100 * (total - count)).div_ceil(total);
    (raw as u32).max(1)
}

/// Sets every counted operator's cost from its share of its activity.
/// Operators without a count keep their cost.
pub fn assign_costs(library: &mut OperatorLibrary) {
    let totals: Vec<u32> = library
        .operators
        .iter()
        .map(|o| library.type_count(o.activity))
        .collect();
    for (op, total) in library.operators.iter_mut().zip(totals) {
        if let Some(count) = op.count.filter(|&c| c > 0) {
            op.cost = Some(operator_cost(count, total));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        assert_eq!(operator_cost(4, 20), 80);
        assert_eq!(operator_cost(1, 31), 97);
        assert_eq!(operator_cost(7, 7), 1);
        assert_eq!(operator_cost(1, 2), 50);
    }

    proptest! {
        #[test]
        fn cost_bounded_and_monotone(total in 1u32..500, a in 1u32..500, b in 1u32..500) {
            let (a, b) = (a.min(total), b.min(total));
            let (ca, cb) = (operator_cost(a, total), operator_cost(b, total));
            prop_assert!((1..=100).contains(&ca));
            if a > b {
                prop_assert!(ca <= cb);
            }
        }
    }
}
