use crate::exact::{aggregate_approx, AggregationMode};
use crate::instance::Instance;

/// A dummy cost exceeding every achievable min-max value: the max-aggregation
/// baseline's worst case plus one.
pub fn default_dummy_cost(instance: &Instance) -> u64 {
    instance.cost1(&aggregate_approx(instance, AggregationMode::MaxAgg)) + 1
}

/// Adds one free dummy tool per group and a final scenario that charges
/// `dummy_cost` to every dummy and nothing to the original tools.
///
/// Dummies take indices `n .. n + p` (dummy of group `i` is `n + i`), so the
/// original tool indices are unchanged. When `dummy_cost` exceeds the
/// min-max optimum, the regret optimum of the result equals that min-max
/// optimum and no dummy is ever part of a regret-optimal selection.
pub fn augment_regret(instance: &Instance, dummy_cost: Option<u64>) -> Instance {
    let big = dummy_cost.unwrap_or_else(|| default_dummy_cost(instance));
    let n = instance.num_tools();
    let p = instance.num_groups();
    let groups = instance
        .groups()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut g = g.clone();
            g.push(n + i);
            g
        })
        .collect();
    let mut costs: Vec<Vec<u64>> = instance
        .costs()
        .iter()
        .map(|row| {
            let mut row = row.clone();
            row.resize(n + p, 0);
            row
        })
        .collect();
    let mut extra = vec![0; n + p];
    extra[n..].iter_mut().for_each(|c| *c = big);
    costs.push(extra);
    Instance::new(groups, costs).expect("augmentation preserves the partition")
}
