//! QUBO problems, diagonal Pauli-Z Hamiltonians and the analytics computed on
//! them.
//!
//! Bit `j` of a basis index `z` is the value of binary variable `x_j`, and the
//! spin carried by qubit `j` is `y_j = 1 - 2 x_j` (so `|0>` is spin `+1`,
//! matching `Z|0> = |0>`). With that convention `x_j = (1 - Z_j) / 2` and the
//! Hamiltonian diagonal reproduces the QUBO objective entry by entry.

use alloc::vec;
use alloc::vec::Vec;
use once_cell::race::OnceBox;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::symmetric_eigenvalues;
use crate::rng;

/// Terms whose magnitude does not exceed this are dropped after merging.
pub const DROPOUT_THRESHOLD: f64 = 1e-12;
/// Largest qubit count for which a dense diagonal is materialized by default.
pub const DEFAULT_MAX_QUBITS: usize = 20;
/// Absolute tolerance used to group eigenvalues into distinct classes.
pub const DISTINCT_EIGENVALUE_TOL: f64 = 1e-9;
/// Largest qubit count representable by a `u64` support mask.
pub const MAX_SUPPORT_QUBITS: usize = 63;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsingError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("{qubits} qubits exceeds the supported maximum of {max}")]
    Capacity { qubits: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("quadratic matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("term support must name each qubit at most once and be nonempty")]
    BadSupport,
    #[error("term acting on {weight} qubits has no quadratic binary form")]
    NotQuadratic { weight: u32 },
}

/// Binary quadratic objective `c^T x + x^T Q x + constant` over `x in {0,1}^n`.
///
/// `Q` is kept symmetric; a product `w x_i x_j` with `i != j` is stored as
/// `w/2` in both `Q[i][j]` and `Q[j][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    n: usize,
    quadratic: Vec<f64>,
    linear: Vec<f64>,
    constant: f64,
}

impl QuboProblem {
    pub fn zeros(n: usize) -> Result<Self, IsingError> {
        check_qubits(n)?;
        Ok(Self {
            n,
            quadratic: vec![0.0; n * n],
            linear: vec![0.0; n],
            constant: 0.0,
        })
    }

    /// Builds a QUBO from a row-major `n*n` matrix, which must be symmetric.
    pub fn from_parts(
        n: usize,
        quadratic: Vec<f64>,
        linear: Vec<f64>,
        constant: f64,
    ) -> Result<Self, IsingError> {
        check_qubits(n)?;
        if quadratic.len() != n * n {
            return Err(IsingError::Dimension {
                expected: n * n,
                found: quadratic.len(),
            });
        }
        if linear.len() != n {
            return Err(IsingError::Dimension {
                expected: n,
                found: linear.len(),
            });
        }
        if !constant.is_finite()
            || quadratic
                .iter()
                .chain(linear.iter())
                .any(|v| !v.is_finite())
        {
            return Err(IsingError::NonFinite);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if quadratic[i * n + j] != quadratic[j * n + i] {
                    return Err(IsingError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self {
            n,
            quadratic,
            linear,
            constant,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        self.quadratic[i * self.n + j]
    }

    /// Row-major symmetric `Q`.
    pub fn quadratic_matrix(&self) -> &[f64] {
        &self.quadratic
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn add_constant(&mut self, v: f64) {
        self.constant += v;
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        self.linear[i] += v;
    }

    /// Adds `w * x_i * x_j`; for `i == j` this is `w * x_i` stored on the
    /// diagonal of `Q`.
    pub fn add_product(&mut self, i: usize, j: usize, w: f64) {
        let n = self.n;
        if i == j {
            self.quadratic[i * n + i] += w;
        } else {
            self.quadratic[i * n + j] += 0.5 * w;
            self.quadratic[j * n + i] += 0.5 * w;
        }
    }

    /// Adds `weight * (offset + sum_k coeff_k x_{var_k})^2`, using `x^2 = x`.
    pub fn add_squared_affine(&mut self, weight: f64, offset: f64, terms: &[(usize, f64)]) {
        self.constant += weight * offset * offset;
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.linear[i] += weight * (2.0 * offset * ci + ci * ci);
            for &(j, cj) in &terms[a + 1..] {
                self.add_product(i, j, weight * 2.0 * ci * cj);
            }
        }
    }

    /// Objective value at the assignment whose bit `j` is `x_j`.
    pub fn objective(&self, bits: u64) -> f64 {
        let n = self.n;
        let mut total = self.constant;
        for i in (0..n).filter(|&i| bits >> i & 1 == 1) {
            total += self.linear[i] + self.quadratic[i * n + i];
            for j in (0..i).filter(|&j| bits >> j & 1 == 1) {
                total += 2.0 * self.quadratic[i * n + j];
            }
        }
        total
    }

    /// Symmetric `Q` with `c` added to the diagonal (valid since `x^2 = x`).
    pub fn folded_matrix(&self) -> Vec<f64> {
        let mut m = self.quadratic.clone();
        for i in 0..self.n {
            m[i * self.n + i] += self.linear[i];
        }
        m
    }

    /// Upper-triangular form of the folded matrix: each pair coefficient is
    /// stored once above the diagonal, which is how the objective is handed
    /// to a mixed-integer solver.
    pub fn upper_triangular_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let folded = self.folded_matrix();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = folded[i * n + i];
            for j in (i + 1)..n {
                m[i * n + j] = 2.0 * folded[i * n + j];
            }
        }
        m
    }
}

/// A weighted tensor product of Pauli Z operators on the qubits in `support`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliZTerm {
    pub support: u64,
    pub coeff: f64,
}

impl PauliZTerm {
    pub fn new(support: u64, coeff: f64) -> Self {
        Self { support, coeff }
    }

    pub fn single(i: usize, coeff: f64) -> Self {
        Self::new(1 << i, coeff)
    }

    pub fn pair(i: usize, j: usize, coeff: f64) -> Self {
        Self::new((1 << i) | (1 << j), coeff)
    }

    /// Eigenvalue of the Z-product on basis state `z`: `(-1)^{popcount(z & support)}`.
    #[inline]
    pub fn sign(&self, z: u64) -> f64 {
        if (z & self.support).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&i| self.support >> i & 1 == 1)
    }
}

/// `constant * I + sum_t coeff_t * Z^{support_t}`, diagonal in the computational basis.
///
/// Terms are merged by support, dropped below [`DROPOUT_THRESHOLD`] and kept
/// sorted by support mask. The dense diagonal is computed at most once and
/// cached; the cache is race-free across threads.
#[derive(Serialize, Deserialize)]
#[serde(try_from = "HamiltonianRepr", into = "HamiltonianRepr")]
pub struct DiagonalHamiltonian {
    qubits: usize,
    constant: f64,
    terms: Vec<PauliZTerm>,
    diagonal: OnceBox<Vec<f64>>,
}

impl DiagonalHamiltonian {
    pub fn new(
        qubits: usize,
        constant: f64,
        terms: impl IntoIterator<Item = PauliZTerm>,
    ) -> Result<Self, IsingError> {
        check_qubits(qubits)?;
        if qubits > MAX_SUPPORT_QUBITS {
            return Err(IsingError::Capacity {
                qubits,
                max: MAX_SUPPORT_QUBITS,
            });
        }
        if !constant.is_finite() {
            return Err(IsingError::NonFinite);
        }
        let mut raw: Vec<PauliZTerm> = Vec::new();
        for t in terms {
            if t.support == 0 {
                return Err(IsingError::BadSupport);
            }
            let top = 63 - t.support.leading_zeros() as usize;
            if top >= qubits {
                return Err(IsingError::QubitOutOfRange { index: top, qubits });
            }
            if !t.coeff.is_finite() {
                return Err(IsingError::NonFinite);
            }
            raw.push(t);
        }
        raw.sort_by_key(|t| t.support);
        let mut merged: Vec<PauliZTerm> = Vec::with_capacity(raw.len());
        for t in raw {
            match merged.last_mut() {
                Some(last) if last.support == t.support => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.abs() > DROPOUT_THRESHOLD);
        Ok(Self {
            qubits,
            constant,
            terms: merged,
            diagonal: OnceBox::new(),
        })
    }

    /// The zero operator on `qubits` qubits.
    pub fn zero(qubits: usize) -> Result<Self, IsingError> {
        Self::new(qubits, 0.0, core::iter::empty())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[PauliZTerm] {
        &self.terms
    }

    /// Number of non-identity terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `self + c * I`.
    pub fn shifted(&self, c: f64) -> Self {
        let out = Self {
            qubits: self.qubits,
            constant: self.constant + c,
            terms: self.terms.clone(),
            diagonal: OnceBox::new(),
        };
        if let Some(d) = self.diagonal.get() {
            let _ = out
                .diagonal
                .set(alloc::boxed::Box::new(d.iter().map(|v| v + c).collect()));
        }
        out
    }

    /// Diagonal entry `H_{z,z}` computed directly from the terms.
    pub fn value(&self, z: u64) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, t| acc + t.coeff * t.sign(z))
    }

    /// Dense diagonal of length `2^q`, limited to [`DEFAULT_MAX_QUBITS`].
    pub fn diagonal(&self) -> Result<&[f64], IsingError> {
        self.diagonal_with_limit(DEFAULT_MAX_QUBITS)
    }

    pub fn diagonal_with_limit(&self, max_qubits: usize) -> Result<&[f64], IsingError> {
        if self.qubits > max_qubits {
            return Err(IsingError::Capacity {
                qubits: self.qubits,
                max: max_qubits,
            });
        }
        Ok(self
            .diagonal
            .get_or_init(|| alloc::boxed::Box::new(self.compute_diagonal())))
    }

    fn compute_diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.qubits;
        let mut d = vec![self.constant; dim];
        for t in &self.terms {
            for (z, v) in d.iter_mut().enumerate() {
                *v += t.coeff * t.sign(z as u64);
            }
        }
        d
    }

    /// Converts back to binary variables through `Z_j = 1 - 2 x_j`.
    pub fn to_qubo(&self) -> Result<QuboProblem, IsingError> {
        let mut p = QuboProblem::zeros(self.qubits)?;
        p.add_constant(self.constant);
        for t in &self.terms {
            let mut qs = t.qubits();
            match t.support.count_ones() {
                1 => {
                    let i = qs.next().unwrap();
                    p.add_constant(t.coeff);
                    p.add_linear(i, -2.0 * t.coeff);
                }
                2 => {
                    let i = qs.next().unwrap();
                    let j = qs.next().unwrap();
                    // (1-2x_i)(1-2x_j) = 1 - 2x_i - 2x_j + 4 x_i x_j
                    p.add_constant(t.coeff);
                    p.add_linear(i, -2.0 * t.coeff);
                    p.add_linear(j, -2.0 * t.coeff);
                    p.add_product(i, j, 4.0 * t.coeff);
                }
                w => return Err(IsingError::NotQuadratic { weight: w }),
            }
        }
        Ok(p)
    }
}

impl Clone for DiagonalHamiltonian {
    fn clone(&self) -> Self {
        let diagonal = OnceBox::new();
        if let Some(d) = self.diagonal.get() {
            let _ = diagonal.set(alloc::boxed::Box::new(d.clone()));
        }
        Self {
            qubits: self.qubits,
            constant: self.constant,
            terms: self.terms.clone(),
            diagonal,
        }
    }
}

impl PartialEq for DiagonalHamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.qubits == other.qubits && self.constant == other.constant && self.terms == other.terms
    }
}

impl core::fmt::Debug for DiagonalHamiltonian {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DiagonalHamiltonian")
            .field("qubits", &self.qubits)
            .field("constant", &self.constant)
            .field("terms", &self.terms)
            .finish()
    }
}

/// Wire form: `{q, constant, terms: [{support: [ascending qubits], coeff}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianRepr {
    pub q: usize,
    pub constant: f64,
    pub terms: Vec<TermRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRepr {
    pub support: Vec<usize>,
    pub coeff: f64,
}

impl From<DiagonalHamiltonian> for HamiltonianRepr {
    fn from(h: DiagonalHamiltonian) -> Self {
        Self {
            q: h.qubits,
            constant: h.constant,
            terms: h
                .terms
                .iter()
                .map(|t| TermRepr {
                    support: t.qubits().collect(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }
}

impl TryFrom<HamiltonianRepr> for DiagonalHamiltonian {
    type Error = IsingError;

    fn try_from(r: HamiltonianRepr) -> Result<Self, IsingError> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            let mut mask = 0u64;
            for &i in &t.support {
                if i >= r.q || i >= MAX_SUPPORT_QUBITS {
                    return Err(IsingError::QubitOutOfRange {
                        index: i,
                        qubits: r.q,
                    });
                }
                if mask >> i & 1 == 1 {
                    return Err(IsingError::BadSupport);
                }
                mask |= 1 << i;
            }
            terms.push(PauliZTerm::new(mask, t.coeff));
        }
        DiagonalHamiltonian::new(r.q, r.constant, terms)
    }
}

/// Rewrites a QUBO as a diagonal Hamiltonian with `H_{z,z} = objective(z)`.
pub fn qubo_to_ising(p: &QuboProblem) -> Result<DiagonalHamiltonian, IsingError> {
    let n = p.num_vars();
    check_qubits(n)?;
    let mut constant = p.constant();
    let mut terms = Vec::new();
    for i in 0..n {
        // (c_i + Q_ii) x_i = (c_i + Q_ii)(1 - Z_i)/2
        let a = p.linear()[i] + p.quadratic(i, i);
        constant += 0.5 * a;
        terms.push(PauliZTerm::single(i, -0.5 * a));
        for j in (i + 1)..n {
            // w x_i x_j = w (1 - Z_i - Z_j + Z_i Z_j)/4
            let w = p.quadratic(i, j) + p.quadratic(j, i);
            if w == 0.0 {
                continue;
            }
            constant += 0.25 * w;
            terms.push(PauliZTerm::single(i, -0.25 * w));
            terms.push(PauliZTerm::single(j, -0.25 * w));
            terms.push(PauliZTerm::pair(i, j, 0.25 * w));
        }
    }
    DiagonalHamiltonian::new(n, constant, terms)
}

/// Difficulty indicators for one encoded instance.
///
/// `density` and `negative_eig_fraction` are measured on the upper-triangular
/// QUBO matrix handed to a MIP solver: the density counts nonzeros among the
/// `q(q+1)/2` upper-triangle entries, and the eigenvalues of a triangular
/// matrix are its diagonal. The `symmetric_*` fields measure the symmetric
/// folded matrix instead (nonzeros over `q^2`, Jacobi eigenvalues).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumStats {
    pub term_count: usize,
    pub distinct_eigenvalues: usize,
    pub density: f64,
    pub negative_eig_fraction: f64,
    pub symmetric_density: f64,
    pub symmetric_negative_eig_fraction: f64,
}

/// Counts classes of values whose sorted neighbours differ by at most `tol`.
pub fn count_distinct(values: &[f64], tol: f64) -> usize {
    if values.is_empty() {
        return 0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    1 + v.windows(2).filter(|w| w[1] - w[0] > tol).count()
}

pub fn spectrum_stats(
    h: &DiagonalHamiltonian,
    p: &QuboProblem,
    tol: f64,
) -> Result<SpectrumStats, IsingError> {
    if h.qubits() != p.num_vars() {
        return Err(IsingError::Dimension {
            expected: h.qubits(),
            found: p.num_vars(),
        });
    }
    let diag = h.diagonal()?;
    let n = p.num_vars();
    let nonzero = |v: &f64| v.abs() > DROPOUT_THRESHOLD;

    let folded = p.folded_matrix();
    let symmetric_density = folded.iter().filter(|v| nonzero(v)).count() as f64 / (n * n) as f64;
    let eig = symmetric_eigenvalues(&folded, n, JACOBI_TOL, JACOBI_MAX_SWEEPS);
    let eig_scale = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let symmetric_negative_eig_fraction =
        eig.iter().filter(|&&v| v < -1e-10 * eig_scale).count() as f64 / n as f64;

    let upper = p.upper_triangular_matrix();
    let upper_nonzero = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|&(i, j)| nonzero(&upper[i * n + j]))
        .count();
    let density = upper_nonzero as f64 / (n * (n + 1) / 2) as f64;
    let negative_eig_fraction = (0..n)
        .filter(|&i| upper[i * n + i] < -DROPOUT_THRESHOLD)
        .count() as f64
        / n as f64;

    Ok(SpectrumStats {
        term_count: h.term_count(),
        distinct_eigenvalues: count_distinct(diag, tol),
        density,
        negative_eig_fraction,
        symmetric_density,
        symmetric_negative_eig_fraction,
    })
}

/// How the weights of a random ZZ Hamiltonian are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Uniform on `{-1, +1}`.
    Discrete,
    /// Uniform on `[-1, 1]`.
    Continuous,
}

/// Sum of `num_pairs` randomly chosen `Z_i Z_j` terms (repeats merged).
pub fn random_zz_hamiltonian(
    qubits: usize,
    num_pairs: usize,
    mode: WeightMode,
    seed: u64,
) -> Result<DiagonalHamiltonian, IsingError> {
    if qubits < 2 {
        return Err(IsingError::Dimension {
            expected: 2,
            found: qubits,
        });
    }
    let mut r = rng::seeded(seed);
    let mut terms = Vec::with_capacity(num_pairs);
    for _ in 0..num_pairs {
        let i = r.random_range(0..qubits);
        let mut j = r.random_range(0..qubits - 1);
        if j >= i {
            j += 1;
        }
        let w = match mode {
            WeightMode::Discrete => {
                if r.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            WeightMode::Continuous => r.random_range(-1.0..=1.0),
        };
        terms.push(PauliZTerm::pair(i, j, w));
    }
    DiagonalHamiltonian::new(qubits, 0.0, terms)
}

fn check_qubits(n: usize) -> Result<(), IsingError> {
    if n < 1 {
        Err(IsingError::NoQubits)
    } else if n > MAX_SUPPORT_QUBITS {
        Err(IsingError::Capacity {
            qubits: n,
            max: MAX_SUPPORT_QUBITS,
        })
    } else {
        Ok(())
    }
}
