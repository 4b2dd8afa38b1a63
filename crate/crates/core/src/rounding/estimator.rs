//! Derandomized rounding of a 0/1 system by the method of pessimistic
//! estimators.
//!
//! For row `k` with expected load `mu_k = (Cx)_k`, the threshold is
//! `tau_k = mu_k + lambda * max(1, mu_k)` and the Chernoff parameter is
//! `t_k = ln(1 + lambda * max(1, mu_k) / mu_k)`. The estimator
//!
//! ```text
//! Phi = sum_k exp(-t_k tau_k) * prod_i E[exp(t_k c_k,z_i)]
//! ```
//!
//! bounds the probability that some row overshoots its threshold. `lambda`
//! is the smallest value (to relative precision 1e-3) with `Phi < 1`; groups
//! are then fixed one at a time to the support tool that minimizes `Phi`,
//! which never increases it. When all groups are fixed, `Phi < 1` forces
//! every load below its threshold.
//!
//! Everything is carried in log space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::EPS;

const MU_FLOOR: f64 = 1e-12;
const LAMBDA_PRECISION: f64 = 1e-3;
const MAX_DOUBLINGS: u32 = 200;

#[derive(Debug, Clone, Serialize)]
pub struct BinaryRounding {
    /// Chosen column of every group.
    pub chosen: Vec<usize>,
    pub mu: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// `(Cz)_k`, exact.
    pub loads: Vec<u64>,
    pub lambda: f64,
    /// `ln Phi` before any decision, then after each group.
    pub log_trace: Vec<f64>,
}

impl BinaryRounding {
    pub fn trace(&self) -> Vec<f64> {
        self.log_trace.iter().map(|v| v.exp()).collect()
    }

    /// Whether `ln Phi` never rises by more than `rel_tol * max(1, |ln Phi|)`.
    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        self.log_trace
            .windows(2)
            .all(|w| w[1] <= w[0] + rel_tol * w[0].abs().max(1.0) || w[1] == f64::NEG_INFINITY)
    }

    pub fn thresholds_hold(&self) -> bool {
        self.loads
            .iter()
            .zip(&self.thresholds)
            .all(|(&l, &t)| l as f64 <= t)
    }
}

struct Row {
    index: usize,
    t: f64,
    tau: f64,
}

/// Rounds `x` on the 0/1 matrix `matrix` (rows x columns) whose columns are
/// partitioned by `groups`. Candidates in each group are the columns with
/// positive weight; ties go to the lowest column index.
pub fn round_pessimistic_binary(
    matrix: &[Vec<u8>],
    groups: &[Vec<usize>],
    x: &[f64],
) -> Result<BinaryRounding> {
    check_inputs(matrix, groups, x)?;
    let support: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| g.iter().copied().filter(|&c| x[c] > EPS).collect())
        .collect();

    let mu: Vec<f64> = matrix
        .iter()
        .map(|row| row.iter().zip(x).map(|(&c, &xj)| c as f64 * xj).sum())
        .collect();
    // weight[k][i]: mass that group i puts on ones of row k
    let active: Vec<usize> = (0..matrix.len()).filter(|&k| mu[k] > MU_FLOOR).collect();
    let weight: Vec<Vec<f64>> = active
        .iter()
        .map(|&k| {
            support
                .iter()
                .map(|s| s.iter().filter(|&&c| matrix[k][c] == 1).map(|&c| x[c]).sum())
                .collect()
        })
        .collect();

    let lambda = if active.is_empty() {
        0.0
    } else {
        find_lambda(&active, &mu, &weight)?
    };
    let rows: Vec<Row> = active
        .iter()
        .map(|&k| {
            let (t, tau) = parameters(mu[k], lambda);
            Row { index: k, t, tau }
        })
        .collect();

    // acc[r]: log of row r's term with decided groups fixed
    let mut acc: Vec<f64> = rows
        .iter()
        .zip(&weight)
        .map(|(row, w)| -row.t * row.tau + w.iter().map(|&wi| group_log_mgf(row.t, wi)).sum::<f64>())
        .collect();
    let mut log_trace = vec![log_sum_exp(&acc)];
    let mut chosen = Vec::with_capacity(groups.len());
    let mut trial = vec![0.0; acc.len()];

    for (i, cands) in support.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for &c in cands {
            for (r, row) in rows.iter().enumerate() {
                let hit = matrix[row.index][c] as f64;
                trial[r] = acc[r] - group_log_mgf(row.t, weight[r][i]) + row.t * hit;
            }
            let value = log_sum_exp(&trial);
            if best.is_none_or(|(b, _)| value < b) {
                best = Some((value, c));
            }
        }
        let (value, c) = best.expect("every group has a support column");
        for (r, row) in rows.iter().enumerate() {
            let hit = matrix[row.index][c] as f64;
            acc[r] += row.t * hit - group_log_mgf(row.t, weight[r][i]);
        }
        log_trace.push(value);
        chosen.push(c);
    }

    let thresholds = mu
        .iter()
        .map(|&m| m + lambda * m.max(1.0))
        .collect();
    let loads = matrix
        .iter()
        .map(|row| chosen.iter().map(|&c| row[c] as u64).sum())
        .collect();
    Ok(BinaryRounding {
        chosen,
        mu,
        thresholds,
        loads,
        lambda,
        log_trace,
    })
}

fn check_inputs(matrix: &[Vec<u8>], groups: &[Vec<usize>], x: &[f64]) -> Result<()> {
    let n = x.len();
    if let Some(k) = matrix.iter().position(|r| r.len() != n || r.iter().any(|&v| v > 1)) {
        return Err(Error::InvalidArgument(format!(
            "row {k} is not a 0/1 row of length {n}"
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.iter().any(|&c| c >= n) {
            return Err(Error::InvalidArgument(format!("group {i} names a missing column")));
        }
        let s: f64 = g.iter().map(|&c| x[c]).sum();
        if (s - 1.0).abs() > EPS || g.iter().any(|&c| x[c] < -EPS) {
            return Err(Error::InvalidArgument(format!(
                "x is not a distribution on group {i} (sum {s})"
            )));
        }
    }
    Ok(())
}

fn parameters(mu: f64, lambda: f64) -> (f64, f64) {
    let dev = lambda * mu.max(1.0);
    let t = (dev / mu.max(MU_FLOOR)).ln_1p();
    (t, mu + dev)
}

/// `ln(sum_j x_j e^{t c_j})` for a group putting mass `w` on ones.
fn group_log_mgf(t: f64, w: f64) -> f64 {
    (t.exp_m1() * w).ln_1p()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|&a| (a - m).exp()).sum::<f64>().ln()
}

fn log_phi0(lambda: f64, active: &[usize], mu: &[f64], weight: &[Vec<f64>]) -> f64 {
    let terms: Vec<f64> = active
        .iter()
        .zip(weight)
        .map(|(&k, w)| {
            let (t, tau) = parameters(mu[k], lambda);
            -t * tau + w.iter().map(|&wi| group_log_mgf(t, wi)).sum::<f64>()
        })
        .collect();
    log_sum_exp(&terms)
}

/// Smallest `lambda` with `Phi_0 < 1`: doubling, then bisection.
fn find_lambda(active: &[usize], mu: &[f64], weight: &[Vec<f64>]) -> Result<f64> {
    let ok = |l: f64| log_phi0(l, active, mu, weight) < 0.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::InvalidArgument(
                "no deviation parameter brings the estimator below 1".into(),
            ));
        }
    }
    while hi - lo > LAMBDA_PRECISION * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
