//! Rounding a fractional LP point to a selection.
//!
//! * [`round_rmax`]: keep the heaviest tool of each group (weight at least
//!   `1/r_i`), so every load grows by at most a factor `r_max`.
//! * [`round_randomized`]: independent categorical draw per group.
//! * [`round_pessimistic`]: derandomized draw on the bit-plane expansion of
//!   the scaled cost matrix.

mod estimator;
mod scaled;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use estimator::{round_pessimistic_binary, BinaryRounding};
pub use scaled::{build_scaled, fraction_bits, BitPlanes, ScaledMatrix};

use crate::error::{Error, Result};
use crate::instance::{Instance, Selection};
use crate::lp::LpResult;
use crate::simplex::EPS;

/// Per-plane and recombined deviations of the binary-expansion rounding.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionBounds {
    pub bits: u32,
    /// `|(C^(l) z)_k - (C^(l) x)_k|`, indexed `[l][k]`.
    pub plane_deviation: Vec<Vec<f64>>,
    /// `sum_l 2^-l |(C^(l) z)_k - (C^(l) x)_k|` per row.
    pub recombined_bound: Vec<f64>,
    /// `|(C~ z)_k - (C~ x)_k|` per row.
    pub truncated_deviation: Vec<f64>,
}

impl ExpansionBounds {
    pub fn bound_holds(&self) -> bool {
        self.recombined_bound
            .iter()
            .zip(&self.truncated_deviation)
            .all(|(b, d)| *d <= b + 1e-12)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundingReport {
    pub selection: Selection,
    /// Worst-case cost of the selection in original units.
    pub cost1: u64,
    /// `(Cz)_k` with costs divided by `L*` (raw costs when `L* = 0`).
    pub scaled_loads: Vec<f64>,
    /// `(Cx)_k` in the same units.
    pub mu: Vec<f64>,
    /// Rows of the rounded 0/1 system (stacked bit planes), derandomized mode only.
    pub thresholds: Vec<f64>,
    pub binary_loads: Vec<u64>,
    pub estimator_trace: Vec<f64>,
    pub log_estimator_trace: Vec<f64>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub expansion: Option<ExpansionBounds>,
}

impl RoundingReport {
    fn plain(instance: &Instance, lp: &LpResult, selection: Selection) -> Self {
        let scale = if lp.l_star > EPS { lp.l_star } else { 1.0 };
        let scaled_loads = instance
            .costs()
            .iter()
            .map(|row| selection.chosen().iter().map(|&t| row[t] as f64).sum::<f64>() / scale)
            .collect();
        let mu = lp
            .solution
            .loads(instance)
            .into_iter()
            .map(|m| m / scale)
            .collect();
        RoundingReport {
            cost1: instance.cost1(&selection),
            selection,
            scaled_loads,
            mu,
            thresholds: Vec::new(),
            binary_loads: Vec::new(),
            estimator_trace: Vec::new(),
            log_estimator_trace: Vec::new(),
            lambda: None,
            seed: None,
            expansion: None,
        }
    }

    /// Estimator never rises (relative tolerance in log space).
    pub fn estimator_monotone(&self, rel_tol: f64) -> bool {
        self.log_estimator_trace
            .windows(2)
            .all(|w| w[1] <= w[0] + rel_tol * w[0].abs().max(1.0) || w[1] == f64::NEG_INFINITY)
    }

    pub fn thresholds_hold(&self) -> bool {
        self.binary_loads
            .iter()
            .zip(&self.thresholds)
            .all(|(&l, &t)| l as f64 <= t)
    }
}

/// Heaviest tool per group, lowest index on ties.
pub fn round_rmax(instance: &Instance, lp: &LpResult) -> Selection {
    let x = &lp.solution.x;
    Selection(
        instance
            .groups()
            .iter()
            .map(|g| {
                let mut best = g[0];
                for &t in &g[1..] {
                    if x[t] > x[best] {
                        best = t;
                    }
                }
                best
            })
            .collect(),
    )
}

/// One independent draw per group with probabilities `x`, by cumulative sums
/// over ascending tool index.
pub fn round_randomized(instance: &Instance, lp: &LpResult, seed: u64) -> RoundingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = &lp.solution.x;
    let chosen = instance
        .groups()
        .iter()
        .map(|g| {
            let support: Vec<usize> = lp.solution.support(g).collect();
            let u: f64 = rng.gen();
            let mut cum = 0.0;
            for &t in &support {
                cum += x[t];
                if u < cum {
                    return t;
                }
            }
            *support.last().unwrap_or(&g[0])
        })
        .collect();
    let mut report = RoundingReport::plain(instance, lp, Selection(chosen));
    report.seed = Some(seed);
    report
}

/// Lowest-index zero-cost tool per group, for `L* = 0`.
fn zero_threshold_selection(instance: &Instance) -> Result<Selection> {
    instance
        .groups()
        .iter()
        .map(|g| {
            g.iter()
                .copied()
                .find(|&t| instance.max_cost(t) == 0)
                .ok_or(Error::ZeroThreshold)
        })
        .collect::<Result<Vec<_>>>()
        .map(Selection)
}

/// Derandomized rounding through the bit-plane expansion.
///
/// When `L* = 0` the instance has a zero-cost selection, which is returned
/// directly.
pub fn round_pessimistic(instance: &Instance, lp: &LpResult) -> Result<RoundingReport> {
    let scaled = match build_scaled(instance, lp, true) {
        Ok(s) => s,
        Err(Error::ZeroThreshold) => {
            let sel = zero_threshold_selection(instance)?;
            return Ok(RoundingReport::plain(instance, lp, sel));
        }
        Err(e) => return Err(e),
    };
    let planes = scaled.bit_planes.as_ref().expect("requested bit planes");
    let stacked = planes.stacked();
    let bin = round_pessimistic_binary(&stacked, &scaled.groups, &scaled.x)?;

    let k = instance.num_scenarios();
    let z = &bin.chosen;
    let row_dot_x = |row: &[f64]| row.iter().zip(&scaled.x).map(|(c, x)| c * x).sum::<f64>();
    let row_dot_z = |row: &[f64]| z.iter().map(|&c| row[c]).sum::<f64>();

    let plane_deviation: Vec<Vec<f64>> = planes
        .planes
        .iter()
        .map(|plane| {
            plane
                .iter()
                .map(|row| {
                    let r: Vec<f64> = row.iter().map(|&b| b as f64).collect();
                    (row_dot_z(&r) - row_dot_x(&r)).abs()
                })
                .collect()
        })
        .collect();
    let recombined_bound = (0..k)
        .map(|row| {
            plane_deviation
                .iter()
                .enumerate()
                .map(|(l, dev)| BitPlanes::weight(l) * dev[row])
                .sum()
        })
        .collect();
    let truncated_deviation = planes
        .truncated
        .iter()
        .map(|row| (row_dot_z(row) - row_dot_x(row)).abs())
        .collect();

    let selection = Selection(z.iter().map(|&c| scaled.tools[c]).collect());
    let mut report = RoundingReport::plain(instance, lp, selection);
    report.thresholds = bin.thresholds.clone();
    report.binary_loads = bin.loads.clone();
    report.estimator_trace = bin.trace();
    report.log_estimator_trace = bin.log_trace;
    report.lambda = Some(bin.lambda);
    report.expansion = Some(ExpansionBounds {
        bits: planes.bits,
        plane_deviation,
        recombined_bound,
        truncated_deviation,
    });
    Ok(report)
}
