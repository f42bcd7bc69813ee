//! Derivative-free minimizers sharing one budget and trace contract.
//!
//! Every algorithm talks to the objective through an [`Evaluator`] that
//! projects points into the box, enforces the evaluation budget and records
//! each call in a [`RunTrace`]. The first recorded evaluation is always the
//! starting point.

mod lbfgs;
mod powell;
mod rbf;
mod spsa;
mod trust;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

pub use lbfgs::{fd_gradient, LbfgsParams};
pub use powell::PowellParams;
pub use rbf::{RbfModel, RbfParams};
pub use spsa::SpsaParams;
pub use trust::TrustParams;

/// Anything that maps a parameter vector to a real value.
pub trait Objective {
    fn evaluate(&mut self, theta: &[f64]) -> f64;
}

impl<F: FnMut(&[f64]) -> f64> Objective for F {
    fn evaluate(&mut self, theta: &[f64]) -> f64 {
        self(theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Limited-memory BFGS on forward-difference gradients.
    FdLbfgs,
    /// Linear interpolation on a simplex inside a shrinking trust region.
    LinearModelTrust,
    /// Powell's conjugate direction method.
    PowellCd,
    Spsa,
    /// Cubic radial basis surrogate with candidate search.
    RbfGlobal,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::FdLbfgs,
        Algorithm::LinearModelTrust,
        Algorithm::PowellCd,
        Algorithm::Spsa,
        Algorithm::RbfGlobal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FdLbfgs => "fd_lbfgs",
            Algorithm::LinearModelTrust => "linear_model_trust",
            Algorithm::PowellCd => "powell_cd",
            Algorithm::Spsa => "spsa",
            Algorithm::RbfGlobal => "rbf_global",
        }
    }

    pub fn is_global(self) -> bool {
        self == Algorithm::RbfGlobal
    }
}

impl core::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-coordinate closed interval `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxBounds {
    pub fn uniform(n: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: alloc::vec![lower; n],
            upper: alloc::vec![upper; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn is_finite(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn validate(&self, n: usize) -> Result<(), OptError> {
        if self.lower.len() != n || self.upper.len() != n {
            return Err(OptError::Dimension {
                expected: n,
                found: self.lower.len().min(self.upper.len()),
            });
        }
        if self
            .lower
            .iter()
            .zip(&self.upper)
            .any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi)
        {
            return Err(OptError::InvalidBounds);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Maximum number of evaluations; `100 (n + 1)` when absent.
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub bounds: Option<BoxBounds>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lbfgs: LbfgsParams,
    #[serde(default)]
    pub trust: TrustParams,
    #[serde(default)]
    pub powell: PowellParams,
    #[serde(default)]
    pub spsa: SpsaParams,
    #[serde(default)]
    pub rbf: RbfParams,
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            budget: None,
            bounds: None,
            seed: 0,
            lbfgs: LbfgsParams::default(),
            trust: TrustParams::default(),
            powell: PowellParams::default(),
            spsa: SpsaParams::default(),
            rbf: RbfParams::default(),
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_bounds(mut self, bounds: BoxBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn budget_for(&self, n: usize) -> usize {
        self.budget.unwrap_or_else(|| default_budget(n))
    }
}

pub fn default_budget(n: usize) -> usize {
    100 * (n + 1)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("cannot optimize over zero parameters")]
    NoParameters,
    #[error("budget {budget} is below the minimum of {min} (n + 2)")]
    BudgetTooSmall { budget: usize, min: usize },
    #[error("expected {expected} coordinates, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("bounds are NaN or have lower > upper")]
    InvalidBounds,
    #[error("starting point lies outside the box")]
    StartOutsideBox,
    #[error("starting point is not finite")]
    NonFiniteStart,
    #[error("{0} needs finite bounds")]
    UnboundedGlobal(Algorithm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    BudgetExhausted,
    /// Step or trust region fell below the algorithm's tolerance.
    Converged,
    /// The objective returned NaN or infinity; the offending value is the
    /// last entry of the trace.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// 1-based position in call order.
    pub index: usize,
    pub theta: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub evaluations: Vec<Evaluation>,
    /// Best finite value among the first `k + 1` evaluations at position `k`.
    pub best_so_far: Vec<f64>,
    pub termination: Termination,
}

impl RunTrace {
    fn new() -> Self {
        Self {
            evaluations: Vec::new(),
            best_so_far: Vec::new(),
            termination: Termination::BudgetExhausted,
        }
    }

    pub fn evaluations_used(&self) -> usize {
        self.evaluations.len()
    }

    pub fn best_value(&self) -> f64 {
        self.best_so_far.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn best(&self) -> Option<&Evaluation> {
        self.evaluations
            .iter()
            .filter(|e| e.value.is_finite())
            .min_by(|a, b| a.value.total_cmp(&b.value))
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.evaluations.iter().map(|e| e.value)
    }
}

/// Normalized iteration of evaluation `k`: `k / (n + 1)`, one equivalent
/// gradient iteration per `n + 1` evaluations.
pub fn normalized_iteration(k: usize, n: usize) -> f64 {
    k as f64 / (n + 1) as f64
}

pub fn normalized_iterations(trace: &RunTrace, n: usize) -> Vec<f64> {
    trace
        .evaluations
        .iter()
        .map(|e| normalized_iteration(e.index, n))
        .collect()
}

/// Why an algorithm stopped before returning normally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Halt {
    Budget,
    NonFinite,
}

pub(crate) struct Evaluator<'a> {
    obj: &'a mut dyn Objective,
    bounds: Option<&'a BoxBounds>,
    budget: usize,
    trace: RunTrace,
    best: Option<(Vec<f64>, f64)>,
}

impl<'a> Evaluator<'a> {
    fn new(obj: &'a mut dyn Objective, bounds: Option<&'a BoxBounds>, budget: usize) -> Self {
        Self {
            obj,
            bounds,
            budget,
            trace: RunTrace::new(),
            best: None,
        }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.budget - self.trace.evaluations.len()
    }

    pub(crate) fn bounds(&self) -> Option<&BoxBounds> {
        self.bounds
    }

    pub(crate) fn project(&self, x: &mut [f64]) {
        if let Some(b) = self.bounds {
            b.project(x);
        }
    }

    pub(crate) fn eval(&mut self, x: &[f64]) -> Result<f64, Halt> {
        if self.remaining() == 0 {
            return Err(Halt::Budget);
        }
        let mut theta = x.to_vec();
        self.project(&mut theta);
        let value = self.obj.evaluate(&theta);
        let prev = self
            .trace
            .best_so_far
            .last()
            .copied()
            .unwrap_or(f64::INFINITY);
        let finite = value.is_finite();
        if finite && value < prev {
            self.best = Some((theta.clone(), value));
        }
        self.trace
            .best_so_far
            .push(if finite { prev.min(value) } else { prev });
        self.trace.evaluations.push(Evaluation {
            index: self.trace.evaluations.len() + 1,
            theta,
            value,
        });
        if finite {
            Ok(value)
        } else {
            Err(Halt::NonFinite)
        }
    }

    pub(crate) fn best(&self) -> Option<(&[f64], f64)> {
        self.best.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }
}

/// Minimizes `obj` from `x0` under `cfg`.
pub fn minimize(
    obj: &mut dyn Objective,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<RunTrace, OptError> {
    let n = x0.len();
    if n == 0 {
        return Err(OptError::NoParameters);
    }
    let budget = cfg.budget_for(n);
    if budget < n + 2 {
        return Err(OptError::BudgetTooSmall { budget, min: n + 2 });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OptError::NonFiniteStart);
    }
    if let Some(b) = &cfg.bounds {
        b.validate(n)?;
        if !b.contains(x0) {
            return Err(OptError::StartOutsideBox);
        }
    }
    let global_box = match (&cfg.bounds, cfg.algorithm.is_global()) {
        (Some(b), true) if b.is_finite() => Some(b),
        (_, true) => return Err(OptError::UnboundedGlobal(cfg.algorithm)),
        _ => None,
    };
    let mut r = rng::stream(cfg.seed, rng::purpose::OPTIMIZER);
    let mut ev = Evaluator::new(obj, cfg.bounds.as_ref(), budget);
    let outcome = match cfg.algorithm {
        Algorithm::FdLbfgs => lbfgs::run(&mut ev, x0, &cfg.lbfgs),
        Algorithm::LinearModelTrust => trust::run(&mut ev, x0, &cfg.trust),
        Algorithm::PowellCd => powell::run(&mut ev, x0, &cfg.powell),
        Algorithm::Spsa => spsa::run(&mut ev, x0, &cfg.spsa, &mut r),
        Algorithm::RbfGlobal => rbf::run(
            &mut ev,
            x0,
            &cfg.rbf,
            global_box.unwrap_or_else(|| unreachable!()),
            &mut r,
        ),
    };
    let mut trace = ev.trace;
    trace.termination = match outcome {
        Ok(()) => Termination::Converged,
        Err(Halt::Budget) => Termination::BudgetExhausted,
        Err(Halt::NonFinite) => Termination::NonFinite,
    };
    Ok(trace)
}
