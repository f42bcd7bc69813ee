//! Core of a benchmark laboratory for hybrid variational (VQE) heuristics on
//! combinatorial optimization problems.
//!
//! Everything here is pure computation over `alloc`: Ising/QUBO encodings,
//! random instance generation, a diagonal-Hamiltonian statevector simulator,
//! derivative-free optimizers, an exhaustive ground-truth solver and the
//! profile metrics. File formats, the experiment runner and the CLI live in
//! the `vqebench` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
pub mod exact;
pub mod ising;
pub(crate) mod linalg;
pub mod metrics;
pub mod optim;
pub mod problems;
pub mod rng;
pub mod simulator;

pub use exact::{solve, ExactSolution};
pub use ising::{
    count_distinct, qubo_to_ising, random_zz_hamiltonian, spectrum_stats, DiagonalHamiltonian,
    IsingError, PauliZTerm, QuboProblem, SpectrumStats, WeightMode,
};
pub use linalg::symmetric_eigenvalues;
pub use metrics::RunRecord;
pub use optim::{minimize, Algorithm, OptimizerConfig, RunTrace};
pub use problems::{encode, gen_instance, ProblemClass, ProblemInstance};
pub use simulator::{energy, prepare_state, prob_optimal, Entangler, Statevector, VariationalForm};
