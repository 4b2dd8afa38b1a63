use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::LpResult;
use crate::simplex::EPS;

/// Binary expansion of the scaled matrix: `C~ = sum_l 2^-l C^(l)` over
/// planes `l = 0..=bits`.
///
/// Plane 0 carries the integer part, which is 1 exactly for entries equal to
/// `L*`; planes `1..=bits` carry the fractional bits.
#[derive(Debug, Clone, Serialize)]
pub struct BitPlanes {
    pub bits: u32,
    /// `planes[l][k][j]`, each entry 0 or 1.
    pub planes: Vec<Vec<Vec<u8>>>,
    /// The truncated matrix `C~`, entries multiples of `2^-bits`.
    pub truncated: Vec<Vec<f64>>,
}

impl BitPlanes {
    /// Stacks the planes plane-major: all rows of plane 0, then plane 1, ...
    pub fn stacked(&self) -> Vec<Vec<u8>> {
        self.planes.iter().flatten().cloned().collect()
    }

    pub fn weight(l: usize) -> f64 {
        (-(l as f64)).exp2()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledMatrix {
    pub l_star: f64,
    /// Retained tools `T(L*)`, ascending original index; column `c` is `tools[c]`.
    pub tools: Vec<usize>,
    /// Column indices of each group.
    pub groups: Vec<Vec<usize>>,
    /// `c_kj / L*` over the retained columns.
    pub matrix: Vec<Vec<f64>>,
    /// LP weights of the retained columns.
    pub x: Vec<f64>,
    /// `(Cx)_k` in scaled units.
    pub mu: Vec<f64>,
    pub bit_planes: Option<BitPlanes>,
}

impl ScaledMatrix {
    pub fn num_columns(&self) -> usize {
        self.tools.len()
    }
}

/// Number of fractional bits for `n` retained columns: `ceil(log2 n)`, at least 1.
pub fn fraction_bits(n: usize) -> u32 {
    (n.max(2) as u64).next_power_of_two().trailing_zeros()
}

pub fn build_scaled(instance: &Instance, lp: &LpResult, with_bit_planes: bool) -> Result<ScaledMatrix> {
    let l = lp.l_star;
    if l <= EPS {
        return Err(Error::ZeroThreshold);
    }
    let tol = EPS * l.max(1.0);
    let tools: Vec<usize> = (0..instance.num_tools())
        .filter(|&j| instance.max_cost(j) as f64 <= l + tol)
        .collect();
    let mut col_of = vec![usize::MAX; instance.num_tools()];
    for (c, &j) in tools.iter().enumerate() {
        col_of[j] = c;
    }
    let groups: Vec<Vec<usize>> = instance
        .groups()
        .iter()
        .map(|g| g.iter().filter(|&&j| col_of[j] != usize::MAX).map(|&j| col_of[j]).collect())
        .collect();
    let matrix: Vec<Vec<f64>> = instance
        .costs()
        .iter()
        .map(|row| tools.iter().map(|&j| row[j] as f64 / l).collect())
        .collect();
    let x: Vec<f64> = tools.iter().map(|&j| lp.solution.x[j]).collect();
    let mu = matrix
        .iter()
        .map(|row| row.iter().zip(&x).map(|(c, x)| c * x).sum())
        .collect();

    let bit_planes = with_bit_planes.then(|| {
        let bits = fraction_bits(tools.len());
        let scale = 1u128 << bits;
        let integral = (l - l.round()).abs() <= EPS;
        let numerators: Vec<Vec<u128>> = instance
            .costs()
            .iter()
            .map(|row| {
                tools
                    .iter()
                    .map(|&j| {
                        let m = if integral {
                            (row[j] as u128 * scale) / l.round() as u128
                        } else {
                            (row[j] as f64 * scale as f64 / l).floor() as u128
                        };
                        m.min(scale)
                    })
                    .collect()
            })
            .collect();
        let planes = (0..=bits)
            .map(|plane| {
                numerators
                    .iter()
                    .map(|row| row.iter().map(|&m| ((m >> (bits - plane)) & 1) as u8).collect())
                    .collect()
            })
            .collect();
        let truncated = numerators
            .iter()
            .map(|row| row.iter().map(|&m| m as f64 / scale as f64).collect())
            .collect();
        BitPlanes {
            bits,
            planes,
            truncated,
        }
    });

    Ok(ScaledMatrix {
        l_star: l,
        tools,
        groups,
        matrix,
        x,
        mu,
        bit_planes,
    })
}
