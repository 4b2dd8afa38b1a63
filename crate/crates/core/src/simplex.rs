//! Dense two-phase simplex on a condensed tableau.
//!
//! Only the nonbasic columns are stored, so a problem with many inequality
//! rows and few structural variables (the shape of the min-max relaxation)
//! pivots in `O(rows * (vars - equalities))`. Entering and leaving variables
//! follow Bland's lowest-index rule.

use crate::error::{Error, Result};

pub const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// `minimize c.x` subject to linear rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn minimize(&mut self, objective: Vec<f64>) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars);
        self.objective = objective;
        self
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let mut t = Tableau::build(self);
        if t.num_artificial > 0 {
            t.phase_one()?;
        }
        t.set_objective(&self.objective);
        t.run()?;
        Ok(t.extract())
    }
}

struct Tableau {
    num_vars: usize,
    num_artificial: usize,
    first_artificial: usize,
    // x_B[r] + sum_c a[r][c] * x_N[c] = beta[r]
    a: Vec<Vec<f64>>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    // z + sum_c obj[c] * x_N[c] = z0; a positive entry may enter
    obj: Vec<f64>,
    z0: f64,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let nv = lp.num_vars;
        let mut slack_of = Vec::with_capacity(lp.rows.len());
        let mut next = nv;
        for row in &lp.rows {
            if row.relation == Relation::Eq {
                slack_of.push(None);
            } else {
                slack_of.push(Some(next));
                next += 1;
            }
        }
        let first_artificial = next;

        let mut nonbasic: Vec<usize> = (0..nv).collect();
        let mut basis = Vec::with_capacity(lp.rows.len());
        let mut beta = Vec::with_capacity(lp.rows.len());
        let mut normalized = Vec::with_capacity(lp.rows.len());
        let mut num_artificial = 0;

        for (r, row) in lp.rows.iter().enumerate() {
            let (sign, relation) = if row.rhs < 0.0 {
                let flipped = match row.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (-1.0, flipped)
            } else {
                (1.0, row.relation)
            };
            let coeffs: Vec<f64> = row.coeffs.iter().map(|c| c * sign).collect();
            beta.push(row.rhs * sign);
            // +1 slack for Le, -1 surplus for Ge, in original orientation
            let slack_coeff = match row.relation {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => 0.0,
            } * sign;
            match relation {
                Relation::Le => {
                    debug_assert!(slack_coeff > 0.0);
                    basis.push(slack_of[r].unwrap());
                }
                Relation::Ge | Relation::Eq => {
                    if let Some(s) = slack_of[r] {
                        nonbasic.push(s);
                    }
                    basis.push(first_artificial + num_artificial);
                    num_artificial += 1;
                }
            }
            normalized.push((coeffs, slack_of[r], slack_coeff));
        }

        let col_of_var: std::collections::HashMap<usize, usize> =
            nonbasic.iter().enumerate().map(|(c, &v)| (v, c)).collect();
        let a = normalized
            .into_iter()
            .map(|(coeffs, slack, slack_coeff)| {
                let mut full = vec![0.0; nonbasic.len()];
                full[..nv].copy_from_slice(&coeffs);
                if let Some(s) = slack {
                    if let Some(&c) = col_of_var.get(&s) {
                        full[c] = slack_coeff;
                    }
                }
                full
            })
            .collect();

        Tableau {
            num_vars: nv,
            num_artificial,
            first_artificial,
            obj: vec![0.0; nonbasic.len()],
            a,
            beta,
            basis,
            nonbasic,
            z0: 0.0,
            pivots: 0,
        }
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= self.first_artificial
    }

    fn phase_one(&mut self) -> Result<()> {
        // minimize the sum of artificials, written over the nonbasic columns
        let mut obj = vec![0.0; self.nonbasic.len()];
        let mut z0 = 0.0;
        for (r, &b) in self.basis.iter().enumerate() {
            if self.is_artificial(b) {
                z0 += self.beta[r];
                for (o, a) in obj.iter_mut().zip(&self.a[r]) {
                    *o += a;
                }
            }
        }
        self.obj = obj;
        self.z0 = z0;
        self.run()?;

        let scale = 1.0 + self.beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        if self.z0 > EPS * scale {
            return Err(Error::Infeasible);
        }

        // drive zero-level artificials out of the basis; drop redundant rows
        let mut r = 0;
        while r < self.basis.len() {
            if self.is_artificial(self.basis[r]) {
                let col = (0..self.nonbasic.len())
                    .filter(|&c| !self.is_artificial(self.nonbasic[c]))
                    .find(|&c| self.a[r][c].abs() > EPS);
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.a.remove(r);
                        self.beta.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        let keep: Vec<usize> = (0..self.nonbasic.len())
            .filter(|&c| !self.is_artificial(self.nonbasic[c]))
            .collect();
        if keep.len() != self.nonbasic.len() {
            self.nonbasic = keep.iter().map(|&c| self.nonbasic[c]).collect();
            for row in &mut self.a {
                *row = keep.iter().map(|&c| row[c]).collect();
            }
        }
        Ok(())
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let cost_of = |v: usize| if v < cost.len() { cost[v] } else { 0.0 };
        self.z0 = self
            .basis
            .iter()
            .zip(&self.beta)
            .map(|(&b, &beta)| cost_of(b) * beta)
            .sum();
        self.obj = self
            .nonbasic
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                let basic: f64 = self
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(r, &b)| cost_of(b) * self.a[r][c])
                    .sum();
                basic - cost_of(v)
            })
            .collect();
    }

    fn run(&mut self) -> Result<()> {
        loop {
            let entering = (0..self.nonbasic.len())
                .filter(|&c| self.obj[c] > EPS)
                .min_by_key(|&c| self.nonbasic[c]);
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.basis.len() {
                let coef = self.a[r][c];
                if coef > EPS {
                    let ratio = self.beta[r] / coef;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS
                                || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::InvalidArgument(format!(
                    "simplex exceeded {MAX_PIVOTS} pivots"
                )));
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.a[r][c];
        let width = self.nonbasic.len();
        let prow: Vec<f64> = self.a[r].iter().map(|v| v / p).collect();
        let pbeta = self.beta[r] / p;

        let update = |row: &mut [f64], factor: f64| {
            if factor == 0.0 {
                return;
            }
            for j in 0..width {
                if j == c {
                    row[j] = -factor / p;
                } else {
                    row[j] -= factor * prow[j];
                    if row[j].abs() < 1e-13 {
                        row[j] = 0.0;
                    }
                }
            }
        };

        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let factor = self.a[i][c];
            if factor != 0.0 {
                self.beta[i] -= factor * pbeta;
                if self.beta[i].abs() < 1e-13 {
                    self.beta[i] = 0.0;
                }
                update(&mut self.a[i], factor);
            }
        }
        let factor = self.obj[c];
        if factor != 0.0 {
            self.z0 -= factor * pbeta;
            update(&mut self.obj, factor);
        }

        let mut new_row = prow;
        new_row[c] = 1.0 / p;
        self.a[r] = new_row;
        self.beta[r] = pbeta;
        std::mem::swap(&mut self.basis[r], &mut self.nonbasic[c]);
    }

    fn extract(&self) -> LpSolution {
        let mut x = vec![0.0; self.num_vars];
        for (&b, &v) in self.basis.iter().zip(&self.beta) {
            if b < self.num_vars {
                x[b] = v.max(0.0);
            }
        }
        LpSolution {
            x,
            objective: self.z0,
            pivots: self.pivots,
        }
    }
}
