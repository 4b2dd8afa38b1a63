//! LP relaxation of the min-max problem and the minimal feasible threshold L*.
//!
//! For a threshold `L`, `LP(L)` keeps only the tools whose cost never exceeds
//! `L` (the filter set `T(L)`), asks for a fractional selection that puts
//! total weight one on each group, and bounds every scenario load by `L`.
//! Feasibility only changes when `L` crosses a per-tool maximum cost
//! `d_j = max_k c_kj`, so L* is found by scanning those breakpoints and
//! solving one "minimize the load" LP per interval.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::simplex::{LinearProgram, Relation, EPS};

/// Per-tool weights `x_j`, zero outside the filter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalSolution {
    pub x: Vec<f64>,
}

impl FractionalSolution {
    /// The integral point of a selection.
    pub fn from_selection(instance: &Instance, chosen: &[usize]) -> Self {
        let mut x = vec![0.0; instance.num_tools()];
        for &t in chosen {
            x[t] = 1.0;
        }
        FractionalSolution { x }
    }

    pub fn uniform(instance: &Instance) -> Self {
        let mut x = vec![0.0; instance.num_tools()];
        for g in instance.groups() {
            for &t in g {
                x[t] = 1.0 / g.len() as f64;
            }
        }
        FractionalSolution { x }
    }

    /// `(Cx)_k` in original cost units.
    pub fn loads(&self, instance: &Instance) -> Vec<f64> {
        instance
            .costs()
            .iter()
            .map(|row| row.iter().zip(&self.x).map(|(&c, &x)| c as f64 * x).sum())
            .collect()
    }

    pub fn max_load(&self, instance: &Instance) -> f64 {
        self.loads(instance).into_iter().fold(0.0, f64::max)
    }

    /// Tools of group `i` carrying positive weight.
    pub fn support<'a>(&'a self, group: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
        group.iter().copied().filter(move |&t| self.x[t] > EPS)
    }

    pub fn is_integral(&self) -> bool {
        self.x.iter().all(|&v| v <= EPS || v >= 1.0 - EPS)
    }
}

/// Checks constraints (load bound, group sums, sign, filter) of `LP(threshold)`
/// independently of how `x` was produced.
pub fn check_certificate(
    instance: &Instance,
    x: &FractionalSolution,
    threshold: f64,
) -> std::result::Result<(), String> {
    if x.x.len() != instance.num_tools() {
        return Err(format!("x has length {}", x.x.len()));
    }
    let tol = EPS * threshold.abs().max(1.0);
    for (j, &v) in x.x.iter().enumerate() {
        if !(-EPS..=1.0 + EPS).contains(&v) {
            return Err(format!("x[{j}] = {v} outside [0, 1]"));
        }
        if v > EPS && instance.max_cost(j) as f64 > threshold + tol {
            return Err(format!("x[{j}] = {v} but tool {j} is outside the filter set"));
        }
    }
    for (i, g) in instance.groups().iter().enumerate() {
        let s: f64 = g.iter().map(|&t| x.x[t]).sum();
        if (s - 1.0).abs() > EPS {
            return Err(format!("group {i} sums to {s}"));
        }
    }
    for (k, load) in x.loads(instance).into_iter().enumerate() {
        if load > threshold + tol {
            return Err(format!("scenario {k} load {load} exceeds {threshold}"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct LpResult {
    pub l_star: f64,
    pub solution: FractionalSolution,
    /// Sorted distinct values of `d_j = max_k c_kj`.
    pub breakpoints: Vec<u64>,
    /// Filter threshold of the interval where the optimum was attained.
    pub chosen_breakpoint: u64,
    /// `(t_m, L_m)` for every breakpoint whose LP was solved.
    pub scanned: Vec<(u64, f64)>,
}

/// `T(L) = { j : max_k c_kj <= L }`. Negative thresholds behave like zero.
pub fn filter_set(instance: &Instance, threshold: f64) -> Vec<usize> {
    let threshold = threshold.max(0.0);
    (0..instance.num_tools())
        .filter(|&j| instance.max_cost(j) as f64 <= threshold)
        .collect()
}

/// Minimum over `x` supported on `allowed` of the largest scenario load,
/// together with the minimizing `x`.
pub fn min_max_load(instance: &Instance, allowed: &[bool]) -> Result<(f64, FractionalSolution)> {
    if instance
        .groups()
        .iter()
        .any(|g| !g.iter().any(|&t| allowed[t]))
    {
        return Err(Error::Infeasible);
    }
    let cols: Vec<usize> = (0..instance.num_tools()).filter(|&j| allowed[j]).collect();
    let nv = cols.len() + 1;
    let bound = cols.len();

    let mut lp = LinearProgram::new(nv);
    let mut obj = vec![0.0; nv];
    obj[bound] = 1.0;
    lp.minimize(obj);
    for row in instance.costs() {
        let mut coeffs: Vec<f64> = cols.iter().map(|&j| row[j] as f64).collect();
        if coeffs.iter().all(|&c| c == 0.0) {
            continue;
        }
        coeffs.push(-1.0);
        lp.add_row(coeffs, Relation::Le, 0.0);
    }
    for g in instance.groups() {
        let mut coeffs = vec![0.0; nv];
        for (c, &j) in cols.iter().enumerate() {
            if instance.group_of(j) == instance.group_of(g[0]) {
                coeffs[c] = 1.0;
            }
        }
        lp.add_row(coeffs, Relation::Eq, 1.0);
    }
    let sol = lp.solve()?;

    let mut x = vec![0.0; instance.num_tools()];
    for (c, &j) in cols.iter().enumerate() {
        x[j] = sol.x[c].clamp(0.0, 1.0);
    }
    let x = FractionalSolution { x };
    // the reported value is the load of the returned point, not the tableau's z
    Ok((snap(x.max_load(instance)), x))
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= EPS * v.abs().max(1.0) {
        r
    } else {
        v
    }
}

/// Returns a point of `LP(threshold)` if one exists.
pub fn lp_feasible(instance: &Instance, threshold: f64) -> Option<FractionalSolution> {
    let threshold = threshold.max(0.0);
    let allowed: Vec<bool> = (0..instance.num_tools())
        .map(|j| instance.max_cost(j) as f64 <= threshold)
        .collect();
    match min_max_load(instance, &allowed) {
        Ok((load, x)) if load <= threshold + EPS * threshold.max(1.0) => Some(x),
        _ => None,
    }
}

/// Exact L* by scanning the breakpoints `d_j`.
pub fn solve_lstar(instance: &Instance) -> Result<LpResult> {
    let d: Vec<u64> = (0..instance.num_tools())
        .map(|j| instance.max_cost(j))
        .collect();
    let mut breakpoints = d.clone();
    breakpoints.sort_unstable();
    breakpoints.dedup();

    let mut best: Option<(f64, u64, FractionalSolution)> = None;
    let mut scanned = Vec::new();
    for &t in &breakpoints {
        let allowed: Vec<bool> = d.iter().map(|&dj| dj <= t).collect();
        let (load, x) = match min_max_load(instance, &allowed) {
            Ok(v) => v,
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        scanned.push((t, load));
        let candidate = load.max(t as f64);
        if best.as_ref().is_none_or(|(b, _, _)| candidate < *b - EPS) {
            best = Some((candidate, t, x));
        }
        // later intervals start above t, so they cannot beat a candidate of t
        if load <= t as f64 + EPS {
            break;
        }
    }
    let (l_star, chosen_breakpoint, solution) =
        best.expect("the full filter set covers every group");
    Ok(LpResult {
        l_star,
        solution,
        breakpoints,
        chosen_breakpoint,
        scanned,
    })
}

/// L* by bisection on `lp_feasible`, to absolute tolerance `tol`.
/// Slower than the breakpoint scan; kept as an independent cross-check.
pub fn solve_lstar_bisect(instance: &Instance, tol: f64) -> f64 {
    if lp_feasible(instance, 0.0).is_some() {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi: f64 = instance
        .groups()
        .iter()
        .map(|g| g.iter().map(|&t| instance.max_cost(t)).max().unwrap_or(0) as f64)
        .sum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if lp_feasible(instance, mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_gap;
    use crate::instance::ref_a;

    #[test]
    fn filter_sets_on_ref_a() {
        let a = ref_a();
        assert_eq!(filter_set(&a, 2.0), vec![0, 2]);
        assert_eq!(filter_set(&a, 4.0), vec![0, 1, 2, 3]);
        let positive = Instance::with_group_sizes(&[2], vec![vec![1, 2]]).unwrap();
        assert!(filter_set(&positive, -1.0).is_empty());
    }

    #[test]
    fn feasibility_on_ref_a() {
        let a = ref_a();
        let x = lp_feasible(&a, 3.0).expect("LP(3) feasible");
        check_certificate(&a, &x, 3.0).unwrap();
        assert!(lp_feasible(&a, 2.0).is_none());
        assert!(lp_feasible(&a, 2.999).is_none());
    }

    #[test]
    fn zero_costs_feasible_at_zero() {
        let z = Instance::with_group_sizes(&[2, 2], vec![vec![0; 4]; 2]).unwrap();
        let x = lp_feasible(&z, 0.0).unwrap();
        check_certificate(&z, &x, 0.0).unwrap();
        check_certificate(&z, &FractionalSolution::uniform(&z), 0.0).unwrap();
        assert_eq!(solve_lstar(&z).unwrap().l_star, 0.0);
    }

    #[test]
    fn lstar_ref_a() {
        let a = ref_a();
        let r = solve_lstar(&a).unwrap();
        assert_eq!(r.l_star, 3.0);
        assert_eq!(r.breakpoints, vec![2, 3, 4]);
        assert_eq!(r.chosen_breakpoint, 2);
        assert_eq!(r.solution.x, vec![1.0, 0.0, 1.0, 0.0]);
        check_certificate(&a, &r.solution, r.l_star).unwrap();
    }

    #[test]
    fn lstar_gap_two_is_uniform() {
        let g = gen_gap(2).unwrap();
        let r = solve_lstar(&g).unwrap();
        assert!((r.l_star - 1.0).abs() < 1e-9);
        for &v in &r.solution.x {
            assert!((v - 0.5).abs() < 1e-9, "{:?}", r.solution.x);
        }
    }

    #[test]
    fn lstar_single_scenario_is_deterministic_optimum() {
        let i = Instance::with_group_sizes(&[3, 2, 1], vec![vec![4, 1, 9, 3, 2, 6]]).unwrap();
        assert_eq!(solve_lstar(&i).unwrap().l_star, 9.0);
    }

    #[test]
    fn singleton_groups_shift_loads() {
        // forced tool 2 costs 5 in scenario 0; L* = 5 + best split of the other group
        let i = Instance::new(vec![vec![0, 1], vec![2]], vec![vec![2, 0, 5], vec![0, 2, 0]]).unwrap();
        let r = solve_lstar(&i).unwrap();
        check_certificate(&i, &r.solution, r.l_star).unwrap();
        assert!((r.l_star - 5.0).abs() < 1e-9);
    }

    #[test]
    fn fractional_lstar_above_breakpoint() {
        // opposite scenarios over three groups: loads always sum to 6, uniform x hits 3
        let i = Instance::with_group_sizes(
            &[2, 2, 2],
            vec![vec![2, 0, 2, 0, 2, 0], vec![0, 2, 0, 2, 0, 2]],
        )
        .unwrap();
        let r = solve_lstar(&i).unwrap();
        assert_eq!(r.breakpoints, vec![2]);
        assert!((r.l_star - 3.0).abs() < 1e-9);
        check_certificate(&i, &r.solution, r.l_star).unwrap();
    }

    #[test]
    fn bisection_agrees_with_scan() {
        for inst in [ref_a(), gen_gap(3).unwrap()] {
            let exact = solve_lstar(&inst).unwrap().l_star;
            let bis = solve_lstar_bisect(&inst, 1e-7);
            assert!((exact - bis).abs() < 1e-6, "{exact} vs {bis}");
        }
    }
}
