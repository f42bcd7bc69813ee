//! Run records and the three profile families computed from them.
//!
//! Profiles are evaluated on the integer grid `t = 0, 1, ..., 100` of
//! normalized iterations. At grid point `t` a run with `n` parameters has
//! used `max(1, t (n + 1))` evaluations, so the start point always counts.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optim::{Algorithm, Termination};
use crate::problems::ProblemClass;
use crate::simulator::VariationalForm;

pub const GRID_MAX: usize = 100;

/// Difference below which the start is taken to be optimal already.
pub const LUCKY_START_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub class: ProblemClass,
    pub qubits: usize,
    pub seed: u64,
    pub form: VariationalForm,
    pub optimizer: Algorithm,
    pub budget: usize,
    /// Objective value at the start point.
    pub f_initial: f64,
    pub f_star: f64,
    pub optimal_set: Vec<u64>,
    pub termination: Termination,
    /// Energy of each evaluation in call order.
    pub energies: Vec<f64>,
    /// Probability of sampling an optimal string, per evaluation.
    pub prob_optimal: Vec<f64>,
    /// Parameter vectors, kept only on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<Vec<f64>>>,
}

impl RunRecord {
    pub fn parameters(&self) -> usize {
        self.form.parameter_count()
    }

    /// Evaluations available at grid point `t`.
    pub fn window(&self, t: usize) -> usize {
        (t * (self.parameters() + 1))
            .max(1)
            .min(self.energies.len())
    }

    pub fn best_energy_within(&self, t: usize) -> f64 {
        self.energies[..self.window(t)]
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn best_prob_within(&self, t: usize) -> f64 {
        self.prob_optimal[..self.window(t).min(self.prob_optimal.len())]
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn lucky_start(&self) -> bool {
        self.f_initial - self.f_star <= LUCKY_START_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no records to build a profile from")]
    Empty,
    #[error("record has no evaluations")]
    EmptyTrace,
}

pub fn grid() -> Vec<usize> {
    (0..=GRID_MAX).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub grid: Vec<usize>,
    pub fraction: Vec<f64>,
    pub records: usize,
    /// Records whose start was already optimal (counted as converged at 0).
    pub lucky_starts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCurve {
    pub grid: Vec<usize>,
    /// Geometric mean ratio, absent where no record has a defined ratio.
    pub ratio: Vec<Option<f64>>,
    /// Records without a defined ratio at each grid point.
    pub excluded: Vec<usize>,
}

fn check(records: &[RunRecord]) -> Result<(), MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    if records.iter().any(|r| r.energies.is_empty()) {
        return Err(MetricsError::EmptyTrace);
    }
    Ok(())
}

fn fraction_curve(records: &[RunRecord], hit: impl Fn(&RunRecord, usize) -> bool) -> Vec<f64> {
    grid()
        .into_iter()
        .map(|t| records.iter().filter(|r| hit(r, t)).count() as f64 / records.len() as f64)
        .collect()
}

/// Whether a run has converged to precision `tau` by grid point `t`:
/// `f(x0) - f_b >= (1 - tau) (f(x0) - f*)`.
pub fn converged_within(r: &RunRecord, tau: f64, t: usize) -> bool {
    if r.lucky_start() {
        return true;
    }
    let gap = r.f_initial - r.f_star;
    r.f_initial - r.best_energy_within(t) >= (1.0 - tau) * gap
}

pub fn convergence_profile(records: &[RunRecord], tau: f64) -> Result<ProfileCurve, MetricsError> {
    check(records)?;
    Ok(ProfileCurve {
        grid: grid(),
        fraction: fraction_curve(records, |r, t| converged_within(r, tau, t)),
        records: records.len(),
        lucky_starts: records.iter().filter(|r| r.lucky_start()).count(),
    })
}

/// Fraction of runs whose state has reached probability at least `rho` of
/// sampling an optimal string at some evaluation up to each grid point.
pub fn sampling_profile(records: &[RunRecord], rho: f64) -> Result<ProfileCurve, MetricsError> {
    check(records)?;
    Ok(ProfileCurve {
        grid: grid(),
        fraction: fraction_curve(records, |r, t| r.best_prob_within(t) >= rho),
        records: records.len(),
        lucky_starts: records.iter().filter(|r| r.lucky_start()).count(),
    })
}

/// Approximation ratio of best value `f_b` against optimum `f_star`, defined
/// only when both have the same strict sign: `f*/f_b` for negative optima,
/// `f_b/f*` for positive ones.
pub fn approx_ratio(f_b: f64, f_star: f64) -> Option<f64> {
    if f_star < 0.0 && f_b < 0.0 {
        Some(f_star / f_b)
    } else if f_star > 0.0 && f_b > 0.0 {
        Some(f_b / f_star)
    } else {
        None
    }
}

pub fn approx_ratio_profile(records: &[RunRecord]) -> Result<RatioCurve, MetricsError> {
    check(records)?;
    let mut ratio = Vec::with_capacity(GRID_MAX + 1);
    let mut excluded = Vec::with_capacity(GRID_MAX + 1);
    for t in grid() {
        let (mut log_sum, mut count) = (0.0, 0usize);
        for r in records {
            if let Some(v) = approx_ratio(r.best_energy_within(t), r.f_star) {
                log_sum += libm::log(v);
                count += 1;
            }
        }
        excluded.push(records.len() - count);
        ratio.push(if count > 0 {
            Some(libm::exp(log_sum / count as f64))
        } else {
            None
        });
    }
    Ok(RatioCurve {
        grid: grid(),
        ratio,
        excluded,
    })
}
