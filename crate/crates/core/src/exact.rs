//! Exact oracles and the aggregation baseline.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Objective, Selection};

pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;
pub const DEFAULT_DP_MAX_SCENARIOS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactResult {
    pub optimum: u64,
    pub argmin: Selection,
    /// Search nodes (brute force) or stored states (dynamic program).
    pub explored: u64,
}

/// Exhaustive enumeration of all `prod r_i` selections.
///
/// Ties are broken towards the lexicographically smallest selection. The
/// choices of the first group are explored in parallel and merged in order,
/// so the result does not depend on scheduling.
pub fn brute_force(instance: &Instance, objective: Objective, cap: u128) -> Result<ExactResult> {
    let size = instance.selection_count();
    if size > cap {
        return Err(Error::CapExceeded {
            what: "brute-force enumeration",
            size,
            cap,
        });
    }
    let offsets = match objective {
        Objective::MinMax => vec![0; instance.num_scenarios()],
        Objective::Regret => instance.scenario_optima(),
    };
    let first = instance.group(0);
    type Partial = (Option<(u64, Vec<usize>)>, u64);
    let partials: Vec<Partial> = first
        .par_iter()
        .map(|&t| {
            let mut search = Search {
                instance,
                offsets: &offsets,
                chosen: vec![t],
                best: None,
                explored: 1,
            };
            let acc: Vec<u64> = instance.costs().iter().map(|row| row[t]).collect();
            search.descend(1, &acc);
            (search.best, search.explored)
        })
        .collect();

    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut explored = 0;
    for (b, e) in partials {
        explored += e;
        if let Some((v, sel)) = b {
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, sel));
            }
        }
    }
    let (optimum, chosen) = best.expect("at least one selection");
    Ok(ExactResult {
        optimum,
        argmin: Selection(chosen),
        explored,
    })
}

struct Search<'a> {
    instance: &'a Instance,
    offsets: &'a [u64],
    chosen: Vec<usize>,
    best: Option<(u64, Vec<usize>)>,
    explored: u64,
}

impl Search<'_> {
    fn descend(&mut self, group: usize, acc: &[u64]) {
        if group == self.instance.num_groups() {
            let v = acc
                .iter()
                .zip(self.offsets)
                .map(|(a, o)| a - o)
                .max()
                .unwrap_or(0);
            // enumeration is lexicographic, so strict improvement keeps the smallest tie
            if self.best.as_ref().is_none_or(|(b, _)| v < *b) {
                self.best = Some((v, self.chosen.clone()));
            }
            return;
        }
        let mut next = vec![0; acc.len()];
        for &t in self.instance.group(group) {
            self.explored += 1;
            for (k, row) in self.instance.costs().iter().enumerate() {
                next[k] = acc[k] + row[t];
            }
            self.chosen.push(t);
            self.descend(group + 1, &next);
            self.chosen.pop();
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DpOptions {
    pub max_scenarios: usize,
    pub prune_dominated: bool,
    pub prune_bound: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            max_scenarios: DEFAULT_DP_MAX_SCENARIOS,
            prune_dominated: true,
            prune_bound: true,
        }
    }
}

struct State {
    acc: Vec<u64>,
    parent: usize,
    tool: usize,
}

/// Pareto dynamic program over accumulated scenario-cost vectors, for a
/// small number of scenarios.
pub fn dp_small_k(instance: &Instance, objective: Objective, opts: DpOptions) -> Result<ExactResult> {
    let k = instance.num_scenarios();
    if k > opts.max_scenarios {
        return Err(Error::TooManyScenarios {
            scenarios: k,
            limit: opts.max_scenarios,
        });
    }
    let offsets = match objective {
        Objective::MinMax => vec![0; k],
        Objective::Regret => instance.scenario_optima(),
    };
    let baseline = aggregate_approx(instance, AggregationMode::MaxAgg);
    let upper = instance.objective_value(&baseline, objective)?;

    // rest[g][k]: cheapest completion of groups g.. under scenario k
    let p = instance.num_groups();
    let mut rest = vec![vec![0u64; k]; p + 1];
    for g in (0..p).rev() {
        let (head, tail) = rest.split_at_mut(g + 1);
        for (s, slot) in head[g].iter_mut().enumerate() {
            let m = instance
                .group(g)
                .iter()
                .map(|&t| instance.cost(s, t))
                .min()
                .unwrap_or(0);
            *slot = tail[0][s] + m;
        }
    }

    let mut layers: Vec<Vec<State>> = vec![vec![State {
        acc: vec![0; k],
        parent: usize::MAX,
        tool: usize::MAX,
    }]];
    let mut explored = 1u64;
    for g in 0..p {
        let prev = layers.last().unwrap();
        let mut next: Vec<State> = Vec::new();
        for (pi, st) in prev.iter().enumerate() {
            for &t in instance.group(g) {
                let acc: Vec<u64> = (0..k).map(|s| st.acc[s] + instance.cost(s, t)).collect();
                if opts.prune_bound
                    && (0..k).any(|s| acc[s] + rest[g + 1][s] - offsets[s] > upper)
                {
                    continue;
                }
                next.push(State {
                    acc,
                    parent: pi,
                    tool: t,
                });
            }
        }
        if opts.prune_dominated {
            next = pareto_filter(next);
        }
        explored += next.len() as u64;
        layers.push(next);
    }

    let last = layers.last().unwrap();
    let (best_idx, optimum) = last
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let v = (0..k).map(|s| st.acc[s] - offsets[s]).max().unwrap_or(0);
            (i, v)
        })
        .min_by_key(|&(i, v)| (v, i))
        .ok_or(Error::Infeasible)?;

    let mut chosen = vec![0; p];
    let mut idx = best_idx;
    for g in (0..p).rev() {
        let st = &layers[g + 1][idx];
        chosen[g] = st.tool;
        idx = st.parent;
    }
    Ok(ExactResult {
        optimum,
        argmin: Selection(chosen),
        explored,
    })
}

fn dominates(u: &[u64], v: &[u64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

/// Keeps the vectors not weakly dominated by an earlier-kept one. Sorting by
/// total first means a dominator is always visited before what it dominates.
fn pareto_filter(mut states: Vec<State>) -> Vec<State> {
    states.sort_by(|a, b| {
        let sa: u64 = a.acc.iter().sum();
        let sb: u64 = b.acc.iter().sum();
        sa.cmp(&sb).then_with(|| a.acc.cmp(&b.acc))
    });
    let mut kept: Vec<State> = Vec::new();
    for st in states {
        if !kept.iter().any(|q| dominates(&q.acc, &st.acc)) {
            kept.push(st);
        }
    }
    kept
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMode {
    /// Per-tool worst case over all scenarios.
    MaxAgg,
    /// Per-tool mean over all scenarios.
    Midpoint,
}

/// Optimal selection for aggregated costs; lowest index wins ties.
pub fn aggregate_approx(instance: &Instance, mode: AggregationMode) -> Selection {
    let key = |t: usize| -> u64 {
        match mode {
            AggregationMode::MaxAgg => instance.max_cost(t),
            // the mean orders tools like the sum does
            AggregationMode::Midpoint => instance.costs().iter().map(|row| row[t]).sum(),
        }
    };
    Selection(
        instance
            .groups()
            .iter()
            .map(|g| *g.iter().min_by_key(|&&t| (key(t), t)).unwrap())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gap, gen_random};
    use crate::instance::ref_a;

    fn brute(i: &Instance, o: Objective) -> ExactResult {
        brute_force(i, o, DEFAULT_ENUM_CAP).unwrap()
    }

    #[test]
    fn brute_force_ref_a() {
        let a = ref_a();
        let r = brute(&a, Objective::MinMax);
        assert_eq!((r.optimum, r.argmin.clone()), (3, Selection(vec![0, 2])));
        let r = brute(&a, Objective::Regret);
        assert_eq!((r.optimum, r.argmin), (2, Selection(vec![0, 2])));
    }

    #[test]
    fn brute_force_gap_three() {
        assert_eq!(brute(&gen_gap(3).unwrap(), Objective::MinMax).optimum, 3);
    }

    #[test]
    fn brute_force_respects_cap() {
        let g = gen_gap(3).unwrap();
        match brute_force(&g, Objective::MinMax, 26) {
            Err(Error::CapExceeded { size, cap, .. }) => assert_eq!((size, cap), (27, 26)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn brute_force_breaks_ties_lexicographically() {
        let z = Instance::with_group_sizes(&[3, 2], vec![vec![0; 5]]).unwrap();
        assert_eq!(brute(&z, Objective::MinMax).argmin, Selection(vec![0, 3]));
    }

    #[test]
    fn dp_matches_ref_a() {
        let a = ref_a();
        for o in [Objective::MinMax, Objective::Regret] {
            let r = dp_small_k(&a, o, DpOptions::default()).unwrap();
            assert_eq!(r.optimum, brute(&a, o).optimum);
            assert_eq!(a.objective_value(&r.argmin, o).unwrap(), r.optimum);
        }
    }

    #[test]
    fn dp_single_scenario_is_sum_of_minima() {
        let i = Instance::with_group_sizes(&[3, 2, 2], vec![vec![5, 2, 7, 1, 1, 9, 4]]).unwrap();
        assert_eq!(dp_small_k(&i, Objective::MinMax, DpOptions::default()).unwrap().optimum, 7);
    }

    #[test]
    fn dp_refuses_large_k() {
        let g = gen_gap(2).unwrap();
        assert!(matches!(
            dp_small_k(&g, Objective::MinMax, DpOptions::default()),
            Err(Error::TooManyScenarios { scenarios: 4, limit: 3 })
        ));
        let opts = DpOptions {
            max_scenarios: 4,
            ..DpOptions::default()
        };
        assert_eq!(dp_small_k(&g, Objective::MinMax, opts).unwrap().optimum, 2);
    }

    #[test]
    fn dp_pruning_does_not_change_optimum() {
        let off = DpOptions {
            max_scenarios: 3,
            prune_dominated: false,
            prune_bound: false,
        };
        for seed in 0..30 {
            let i = gen_random(5, 3, 3, 12, seed).unwrap();
            for o in [Objective::MinMax, Objective::Regret] {
                let pruned = dp_small_k(&i, o, DpOptions::default()).unwrap();
                let full = dp_small_k(&i, o, off).unwrap();
                assert_eq!(pruned.optimum, full.optimum);
                assert!(pruned.explored <= full.explored);
            }
        }
    }

    #[test]
    fn dp_matches_brute_force_on_random_k2() {
        for seed in 0..100 {
            let p = 1 + (seed as usize % 8);
            let r = 1 + (seed as usize / 8 % 4);
            let i = gen_random(p, r, 2, 20, seed).unwrap();
            for o in [Objective::MinMax, Objective::Regret] {
                assert_eq!(
                    dp_small_k(&i, o, DpOptions::default()).unwrap().optimum,
                    brute(&i, o).optimum,
                    "seed {seed} {o}"
                );
            }
        }
    }

    #[test]
    fn aggregation_on_ref_a() {
        let a = ref_a();
        let x = aggregate_approx(&a, AggregationMode::MaxAgg);
        assert_eq!(x, Selection(vec![0, 2]));
        assert_eq!(a.cost1(&x), 3);
        assert_eq!(aggregate_approx(&a, AggregationMode::Midpoint), Selection(vec![0, 2]));
    }

    #[test]
    fn aggregation_is_exact_for_one_scenario() {
        let i = gen_random(6, 4, 1, 30, 7).unwrap();
        for mode in [AggregationMode::MaxAgg, AggregationMode::Midpoint] {
            let x = aggregate_approx(&i, mode);
            assert_eq!(i.cost1(&x), brute(&i, Objective::MinMax).optimum);
        }
    }

    #[test]
    fn aggregation_on_gap_family() {
        for p in 2..=4 {
            let g = gen_gap(p).unwrap();
            let x = aggregate_approx(&g, AggregationMode::MaxAgg);
            assert_eq!(g.cost1(&x), p as u64);
            assert!(g.cost1(&x) <= g.num_scenarios() as u64 * p as u64);
        }
    }
}
