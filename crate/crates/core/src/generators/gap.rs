use crate::error::{Error, Result};
use crate::instance::Instance;

pub const DEFAULT_SCENARIO_CAP: u128 = 100_000;

/// The `p^p`-scenario family on which `L* = 1` while every selection costs `p`.
///
/// Group `i` holds tools `i*p .. i*p + p`. Scenarios run over all tuples
/// `(e_1, .., e_p)` in lexicographic order (first group most significant);
/// the scenario for a tuple charges 1 to tool `e_i` of every group `i`.
pub fn gen_gap(p: usize) -> Result<Instance> {
    gen_gap_capped(p, DEFAULT_SCENARIO_CAP)
}

pub fn gen_gap_capped(p: usize, cap: u128) -> Result<Instance> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("gap family needs p >= 2, got {p}")));
    }
    let k = (p as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if k > cap {
        return Err(Error::CapExceeded {
            what: "gap family scenario count",
            size: k,
            cap,
        });
    }
    let n = p * p;
    let mut costs = Vec::with_capacity(k as usize);
    let mut tuple = vec![0usize; p];
    loop {
        let mut row = vec![0u64; n];
        for (i, &e) in tuple.iter().enumerate() {
            row[i * p + e] = 1;
        }
        costs.push(row);
        // odometer increment, last position fastest
        let mut pos = p;
        loop {
            if pos == 0 {
                return Instance::with_group_sizes(&vec![p; p], costs);
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < p {
                break;
            }
            tuple[pos] = 0;
        }
    }
}
