//! One experiment cell: instance, exact solution, start point and a single
//! optimizer run of the variational objective.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

use crate::exact::{solve, ExactSolution};
use crate::ising::{DiagonalHamiltonian, IsingError};
use crate::metrics::RunRecord;
use crate::optim::{minimize, BoxBounds, OptError, OptimizerConfig};
use crate::problems::{encode_hamiltonian, gen_instance, GenError, ProblemClass, ProblemInstance};
use crate::rng;
use crate::simulator::{energy_with_diagonal, prepare_state, SimError, VariationalForm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CellError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Ising(#[from] IsingError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error("form has {form} qubits but the instance has {instance}")]
    QubitMismatch { form: usize, instance: usize },
}

/// Everything about an instance that does not depend on the optimizer.
#[derive(Debug, Clone)]
pub struct PreparedInstance {
    pub instance: ProblemInstance,
    pub hamiltonian: DiagonalHamiltonian,
    pub exact: ExactSolution,
}

impl PreparedInstance {
    pub fn generate(class: ProblemClass, qubits: usize, seed: u64) -> Result<Self, CellError> {
        Self::from_instance(gen_instance(class, qubits, seed)?)
    }

    pub fn from_instance(instance: ProblemInstance) -> Result<Self, CellError> {
        let (_, hamiltonian) = encode_hamiltonian(&instance)?;
        let exact = solve(&hamiltonian)?;
        Ok(Self {
            instance,
            hamiltonian,
            exact,
        })
    }
}

/// VQE parameter box `[-pi, pi]^n`.
pub fn parameter_box(n: usize) -> BoxBounds {
    BoxBounds::uniform(n, -PI, PI)
}

/// Start point drawn uniformly from the parameter box. It depends only on
/// the seed and `n`, so every optimizer starts from the same point.
pub fn start_point(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng::stream(seed, rng::purpose::START_POINT);
    (0..n).map(|_| r.random_range(-PI..PI)).collect()
}

/// Runs one optimizer on one prepared instance. The optimizer's box is
/// replaced by the parameter box and its seed by `seed`.
pub fn run_cell(
    prepared: &PreparedInstance,
    form: &VariationalForm,
    optimizer: &OptimizerConfig,
    seed: u64,
    keep_thetas: bool,
) -> Result<RunRecord, CellError> {
    form.validate()?;
    if form.qubits != prepared.instance.qubits {
        return Err(CellError::QubitMismatch {
            form: form.qubits,
            instance: prepared.instance.qubits,
        });
    }
    let n = form.parameter_count();
    let diagonal = prepared.hamiltonian.diagonal()?;
    let optimal = &prepared.exact.optimal_set;
    let mut cfg = optimizer.clone();
    cfg.bounds = Some(parameter_box(n));
    cfg.seed = seed;

    let mut probs: Vec<f64> = Vec::new();
    let mut sim_error = None;
    let mut objective = |theta: &[f64]| match prepare_state(form, theta) {
        Ok(psi) => {
            let amps = psi.amplitudes();
            probs.push(
                optimal
                    .iter()
                    .map(|&z| amps[z as usize].norm_sqr())
                    .sum::<f64>()
                    .min(1.0),
            );
            energy_with_diagonal(&psi, diagonal)
        }
        Err(e) => {
            sim_error = Some(e);
            probs.push(0.0);
            f64::NAN
        }
    };
    let x0 = start_point(seed, n);
    let trace = minimize(&mut objective, &x0, &cfg)?;
    if let Some(e) = sim_error {
        return Err(e.into());
    }
    let energies: Vec<f64> = trace.values().collect();
    Ok(RunRecord {
        class: prepared.instance.class,
        qubits: prepared.instance.qubits,
        seed,
        form: *form,
        optimizer: cfg.algorithm,
        budget: cfg.budget_for(n),
        f_initial: energies[0],
        f_star: prepared.exact.optimum,
        optimal_set: optimal.clone(),
        termination: trace.termination,
        energies,
        prob_optimal: probs,
        thetas: keep_thetas.then(|| trace.evaluations.into_iter().map(|e| e.theta).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::Algorithm;
    use crate::simulator::Entangler;

    #[test]
    fn records_respect_budget_and_energy_bound() {
        let prepared = PreparedInstance::generate(ProblemClass::MaxCut, 4, 7).unwrap();
        let form = VariationalForm::new(4, 2, Entangler::FullCz).unwrap();
        for alg in Algorithm::ALL {
            let r = run_cell(&prepared, &form, &OptimizerConfig::new(alg), 7, false).unwrap();
            assert!(r.energies.len() <= 100 * 9);
            assert_eq!(r.energies.len(), r.prob_optimal.len());
            assert!(r.energies.iter().all(|e| *e >= r.f_star - 1e-9));
            assert!(r.prob_optimal.iter().all(|p| (0.0..=1.0).contains(p)));
            assert_eq!(r.f_initial, r.energies[0]);
        }
    }

    #[test]
    fn start_point_is_shared_across_optimizers() {
        let prepared = PreparedInstance::generate(ProblemClass::Partition, 3, 1).unwrap();
        let form = VariationalForm::new(3, 1, Entangler::None).unwrap();
        let a = run_cell(
            &prepared,
            &form,
            &OptimizerConfig::new(Algorithm::Spsa),
            1,
            true,
        )
        .unwrap();
        let b = run_cell(
            &prepared,
            &form,
            &OptimizerConfig::new(Algorithm::PowellCd),
            1,
            true,
        )
        .unwrap();
        assert_eq!(a.thetas.unwrap()[0], b.thetas.unwrap()[0]);
        assert_eq!(a.f_initial, b.f_initial);
    }

    #[test]
    fn optimal_energy_means_optimal_support() {
        let prepared = PreparedInstance::generate(ProblemClass::StableSet, 5, 3).unwrap();
        let form = VariationalForm::new(5, 1, Entangler::None).unwrap();
        let r = run_cell(
            &prepared,
            &form,
            &OptimizerConfig::new(Algorithm::FdLbfgs),
            3,
            false,
        )
        .unwrap();
        for (e, p) in r.energies.iter().zip(&r.prob_optimal) {
            if (e - r.f_star).abs() < 1e-9 {
                assert!((p - 1.0).abs() < 1e-6);
            }
            if (p - 1.0).abs() < 1e-12 {
                assert!((e - r.f_star).abs() < 1e-9);
            }
        }
    }
}
