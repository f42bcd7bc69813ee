//! Ground truth by exhaustive enumeration of the Hamiltonian diagonal.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ising::{DiagonalHamiltonian, IsingError};

/// Two values closer than this are the same optimum / histogram bin.
pub const OPTIMAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub qubits: usize,
    pub optimum: f64,
    /// Every string within [`OPTIMAL_TOL`] of the optimum, ascending.
    pub optimal_set: Vec<u64>,
    /// `(value, count)` over all `2^q` strings, ascending by value. Values
    /// within [`OPTIMAL_TOL`] of a bin's first (smallest) value share it.
    pub histogram: Vec<(f64, u64)>,
}

pub fn solve(h: &DiagonalHamiltonian) -> Result<ExactSolution, IsingError> {
    Ok(solve_diagonal(h.qubits(), h.diagonal()?))
}

/// Same as [`solve`] for a precomputed diagonal of length `2^qubits`.
pub fn solve_diagonal(qubits: usize, diagonal: &[f64]) -> ExactSolution {
    debug_assert_eq!(diagonal.len(), 1usize << qubits);
    let optimum = diagonal.iter().copied().fold(f64::INFINITY, f64::min);
    let optimal_set = (0..diagonal.len() as u64)
        .filter(|&z| diagonal[z as usize] - optimum <= OPTIMAL_TOL)
        .collect();
    let mut sorted = diagonal.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut histogram: Vec<(f64, u64)> = Vec::new();
    for v in sorted {
        match histogram.last_mut() {
            Some((head, count)) if v - *head <= OPTIMAL_TOL => *count += 1,
            _ => histogram.push((v, 1)),
        }
    }
    ExactSolution {
        qubits,
        optimum,
        optimal_set,
        histogram,
    }
}

impl ExactSolution {
    pub fn is_optimal(&self, z: u64) -> bool {
        self.optimal_set.binary_search(&z).is_ok()
    }
}

/// Quality of value `f` relative to optimum `f_star`: `f / f*` for negative
/// optima and `f* / f` for positive ones, so 1 is optimal and smaller is
/// worse. This is the reciprocal of the approximation ratio used by the run
/// profiles, and unlike the ratio it is finite for every string. Undefined
/// when `f* = 0`.
pub fn solution_quality(f: f64, f_star: f64) -> Option<f64> {
    if f_star < 0.0 {
        Some(f / f_star)
    } else if f_star > 0.0 && f > 0.0 {
        Some(f_star / f)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    /// Number of feasible strings; zero is reported, not an error.
    pub feasible: u64,
    pub value_mean: Option<f64>,
    pub value_std: Option<f64>,
    /// Mean and population standard deviation of [`solution_quality`] over
    /// the feasible strings; absent when the optimum is zero.
    pub quality_mean: Option<f64>,
    pub quality_std: Option<f64>,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> Option<(f64, f64)> {
    let (count, sum) = values.clone().fold((0u64, 0.0), |(c, s), v| (c + 1, s + v));
    if count == 0 {
        return None;
    }
    let mean = sum / count as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    Some((mean, libm::sqrt(var)))
}

/// Value distribution of the feasible strings, with quality measured
/// against `optimum` (the optimum of the encoded problem).
pub fn value_distribution_stats(
    diagonal: &[f64],
    optimum: f64,
    feasible: impl Fn(u64) -> bool,
) -> DistributionStats {
    let mask: Vec<bool> = (0..diagonal.len() as u64).map(&feasible).collect();
    let vals = diagonal
        .iter()
        .zip(&mask)
        .filter(|(_, m)| **m)
        .map(|(v, _)| *v);
    let count = vals.clone().count() as u64;
    let value = mean_std(vals.clone());
    let quality = if optimum == 0.0 {
        None
    } else {
        mean_std(vals.filter_map(|v| solution_quality(v, optimum)))
    };
    DistributionStats {
        feasible: count,
        value_mean: value.map(|v| v.0),
        value_std: value.map(|v| v.1),
        quality_mean: quality.map(|v| v.0),
        quality_std: quality.map(|v| v.1),
    }
}
