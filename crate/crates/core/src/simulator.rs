//! Statevector simulation of the layered Ry variational forms.
//!
//! Amplitude index `z` is the little-endian integer of the qubit bits, so
//! qubit 0 is the least significant bit. This matches the bit strings used by
//! [`crate::ising::DiagonalHamiltonian::diagonal`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ising::{DiagonalHamiltonian, IsingError, DEFAULT_MAX_QUBITS};

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// No block between layers; only valid with a single layer.
    None,
    /// CZ on every qubit pair.
    FullCz,
    /// CZ on `(j, j+1)`.
    NearestNeighborCz,
    /// T on every qubit, which never entangles.
    TGate,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a variational form needs at least one qubit and one layer")]
    Empty,
    #[error("{qubits} qubits exceeds the simulator limit of {max}")]
    Capacity { qubits: usize, max: usize },
    #[error("entangler `none` requires exactly one layer, got {layers}")]
    LayersWithoutEntangler { layers: usize },
    #[error("expected {expected} parameters, got {found}")]
    ParameterCount { expected: usize, found: usize },
    #[error("state has {state} qubits but the Hamiltonian has {hamiltonian}")]
    Dimension { state: usize, hamiltonian: usize },
    #[error("optimal set must not be empty")]
    EmptyOptimalSet,
    #[error("state lost normalization: norm^2 = {0}")]
    Normalization(f64),
    #[error(transparent)]
    Ising(#[from] IsingError),
}

/// Layer 1 is a bare Ry layer; each further layer is an entangler block
/// followed by another Ry layer. There are `qubits * layers` parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalForm {
    pub qubits: usize,
    pub layers: usize,
    pub entangler: Entangler,
}

impl VariationalForm {
    pub fn new(qubits: usize, layers: usize, entangler: Entangler) -> Result<Self, SimError> {
        let form = Self {
            qubits,
            layers,
            entangler,
        };
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.qubits == 0 || self.layers == 0 {
            return Err(SimError::Empty);
        }
        if self.qubits > DEFAULT_MAX_QUBITS {
            return Err(SimError::Capacity {
                qubits: self.qubits,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        if self.entangler == Entangler::None && self.layers != 1 {
            return Err(SimError::LayersWithoutEntangler {
                layers: self.layers,
            });
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.qubits * self.layers
    }
}

impl fmt::Display for VariationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.entangler {
            Entangler::None => return write!(f, "{}L", self.layers),
            Entangler::FullCz => "CZ",
            Entangler::NearestNeighborCz => "NN",
            Entangler::TGate => "T",
        };
        write!(f, "{}L-{}", self.layers, tag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `qubits` qubits.
    pub fn zero_state(qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { qubits, amps }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_ry(&mut self, qubit: usize, phi: f64) {
        let (s, c) = libm::sincos(phi / 2.0);
        let bit = 1usize << qubit;
        for z in 0..self.amps.len() {
            if z & bit == 0 {
                let a0 = self.amps[z];
                let a1 = self.amps[z | bit];
                self.amps[z] = a0 * c - a1 * s;
                self.amps[z | bit] = a0 * s + a1 * c;
            }
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (z, amp) in self.amps.iter_mut().enumerate() {
            if z & mask == mask {
                *amp = -*amp;
            }
        }
    }

    pub fn apply_t(&mut self, qubit: usize) {
        let phase = unit_phase(core::f64::consts::FRAC_PI_4);
        let bit = 1usize << qubit;
        for (z, amp) in self.amps.iter_mut().enumerate() {
            if z & bit != 0 {
                *amp *= phase;
            }
        }
    }

    fn apply_entangler(&mut self, entangler: Entangler) {
        match entangler {
            Entangler::None => {}
            Entangler::FullCz => {
                // product of CZ over all pairs is (-1)^(k choose 2), k = popcount
                for (z, amp) in self.amps.iter_mut().enumerate() {
                    let k = z.count_ones();
                    if (k * k.saturating_sub(1) / 2) & 1 == 1 {
                        *amp = -*amp;
                    }
                }
            }
            Entangler::NearestNeighborCz => {
                for (z, amp) in self.amps.iter_mut().enumerate() {
                    if (z & (z >> 1)).count_ones() & 1 == 1 {
                        *amp = -*amp;
                    }
                }
            }
            Entangler::TGate => {
                let phases: Vec<Complex64> = (0..=self.qubits)
                    .map(|k| unit_phase(core::f64::consts::FRAC_PI_4 * k as f64))
                    .collect();
                for (z, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= phases[z.count_ones() as usize];
                }
            }
        }
    }
}

fn unit_phase(angle: f64) -> Complex64 {
    let (s, c) = libm::sincos(angle);
    Complex64::new(c, s)
}

/// Runs the variational circuit on `|0...0>`.
pub fn prepare_state(form: &VariationalForm, theta: &[f64]) -> Result<Statevector, SimError> {
    form.validate()?;
    let n = form.parameter_count();
    if theta.len() != n {
        return Err(SimError::ParameterCount {
            expected: n,
            found: theta.len(),
        });
    }
    let q = form.qubits;
    let mut psi = Statevector::zero_state(q);
    for (layer, angles) in theta.chunks(q).enumerate() {
        if layer > 0 {
            psi.apply_entangler(form.entangler);
        }
        for (j, &phi) in angles.iter().enumerate() {
            psi.apply_ry(j, phi);
        }
    }
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(SimError::Normalization(norm));
    }
    Ok(psi)
}

/// `<psi|H|psi>` for a diagonal `H`.
pub fn energy(psi: &Statevector, h: &DiagonalHamiltonian) -> Result<f64, SimError> {
    if psi.qubits != h.qubits() {
        return Err(SimError::Dimension {
            state: psi.qubits,
            hamiltonian: h.qubits(),
        });
    }
    Ok(energy_with_diagonal(psi, h.diagonal()?))
}

/// Same as [`energy`] with a precomputed diagonal of matching length.
pub fn energy_with_diagonal(psi: &Statevector, diagonal: &[f64]) -> f64 {
    debug_assert_eq!(diagonal.len(), psi.amps.len());
    psi.amps
        .iter()
        .zip(diagonal)
        .map(|(a, d)| a.norm_sqr() * d)
        .sum()
}

/// Probability of measuring any string in `optimal_set`.
pub fn prob_optimal(psi: &Statevector, optimal_set: &[u64]) -> Result<f64, SimError> {
    if optimal_set.is_empty() {
        return Err(SimError::EmptyOptimalSet);
    }
    let p: f64 = optimal_set
        .iter()
        .filter_map(|&z| psi.amps.get(z as usize))
        .map(|a| a.norm_sqr())
        .sum();
    Ok(p.min(1.0))
}
