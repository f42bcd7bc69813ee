//! Random instances of the six benchmark classes and their QUBO encodings.
//!
//! Every class is encoded as a minimization problem; maximization objectives
//! are negated. All randomness comes from [`crate::rng::seeded`] so that a
//! `(class, qubits, seed)` triple always reproduces the same payload.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ising::{
    qubo_to_ising, DiagonalHamiltonian, IsingError, QuboProblem, DEFAULT_MAX_QUBITS,
};
use crate::rng;

pub const STABLE_SET_EDGE_PROBABILITY: f64 = 0.3;
/// Edge penalty of the stable set encoding. Any value above 1 keeps the
/// optimum at minus the maximum stable set size while making every
/// violated edge strictly worse than dropping one of its endpoints.
pub const STABLE_SET_PENALTY: f64 = 2.0;
pub const MAXCUT_WEIGHT_RANGE: (i64, i64) = (-10, 10);
pub const TSP_WEIGHT_RANGE: (i64, i64) = (0, 9);
pub const MARKETSPLIT_MAX_ENTRY: i64 = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemClass {
    StableSet,
    Max3Sat,
    Partition,
    MaxCut,
    MarketSplit,
    Tsp,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 6] = [
        ProblemClass::StableSet,
        ProblemClass::Max3Sat,
        ProblemClass::Partition,
        ProblemClass::MaxCut,
        ProblemClass::MarketSplit,
        ProblemClass::Tsp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemClass::StableSet => "stableset",
            ProblemClass::Max3Sat => "max3sat",
            ProblemClass::Partition => "partition",
            ProblemClass::MaxCut => "maxcut",
            ProblemClass::MarketSplit => "marketsplit",
            ProblemClass::Tsp => "tsp",
        }
    }

    /// Checks the size rules of the class for `qubits`.
    pub fn check_qubits(self, qubits: usize) -> Result<(), GenError> {
        let min = match self {
            ProblemClass::Max3Sat | ProblemClass::MarketSplit => 6,
            ProblemClass::Tsp => 4,
            _ => 2,
        };
        if qubits < min || qubits > DEFAULT_MAX_QUBITS {
            return Err(GenError::QubitRange {
                class: self,
                qubits,
                min,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        match self {
            ProblemClass::Max3Sat if !qubits.is_multiple_of(3) => {
                Err(GenError::NotMultipleOfThree { qubits })
            }
            ProblemClass::Tsp if isqrt(qubits).pow(2) != qubits => {
                Err(GenError::NotPerfectSquare { qubits })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemClass {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let lower = s.to_ascii_lowercase();
        ProblemClass::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .ok_or_else(|| GenError::UnknownClass(String::from(s)))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("unknown problem class `{0}`")]
    UnknownClass(String),
    #[error("{class} needs between {min} and {max} qubits, got {qubits}")]
    QubitRange {
        class: ProblemClass,
        qubits: usize,
        min: usize,
        max: usize,
    },
    #[error("max3sat needs a qubit count divisible by 3 (one qubit per literal of each 3-literal clause), got {qubits}")]
    NotMultipleOfThree { qubits: usize },
    #[error("tsp needs a perfect-square qubit count ((nodes-1)^2 free position variables), got {qubits}")]
    NotPerfectSquare { qubits: usize },
    #[error("payload does not match class {0}")]
    PayloadMismatch(ProblemClass),
    #[error("invalid payload: {0}")]
    InvalidPayload(&'static str),
    #[error(transparent)]
    Ising(#[from] IsingError),
}

/// Class-specific instance data. Nodes and variables are 0-based except
/// clause literals, which use the signed 1-based DIMACS convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// Undirected graph with integer weights as `[i, j, w]` triples.
    Graph {
        nodes: usize,
        edges: Vec<(usize, usize, i64)>,
    },
    Clauses {
        variables: usize,
        clauses: Vec<[i32; 3]>,
        duplicate_clauses_allowed: bool,
    },
    Numbers {
        values: Vec<i64>,
    },
    /// Row-major nonnegative `A` and right-hand side `b`.
    Matrix {
        a: Vec<Vec<i64>>,
        b: Vec<i64>,
    },
    /// Complete directed graph; `weights[i][j]` is the cost of going i -> j.
    Tsp {
        nodes: usize,
        weights: Vec<Vec<i64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    pub class: ProblemClass,
    pub qubits: usize,
    pub seed: u64,
    pub payload: Payload,
}

/// Variable layout of the TSP encoding with node 0 fixed in position 0.
///
/// Free variables are `x_{i,p}` for `i, p in 1..n`, numbered `(i-1)(n-1) + (p-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TspLayout {
    pub nodes: usize,
    pub alpha: f64,
}

impl TspLayout {
    pub fn new(weights: &[Vec<i64>]) -> Self {
        let nodes = weights.len();
        let max_w = (0..nodes)
            .flat_map(|i| (0..nodes).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| weights[i][j])
            .max()
            .unwrap_or(0);
        // all-zero weights would make the penalty vanish
        let alpha = nodes as f64 * max_w.max(1) as f64;
        Self { nodes, alpha }
    }

    pub fn free_vars(&self) -> usize {
        (self.nodes - 1) * (self.nodes - 1)
    }

    /// Qubit of `x_{node, position}` for `node, position >= 1`.
    pub fn var(&self, node: usize, position: usize) -> usize {
        debug_assert!(node >= 1 && position >= 1);
        (node - 1) * (self.nodes - 1) + (position - 1)
    }

    /// Decodes a permutation string into the visiting order (starting at node 0).
    pub fn tour(&self, bits: u64) -> Option<Vec<usize>> {
        let m = self.nodes - 1;
        let mut order = vec![0usize; self.nodes];
        let mut seen = vec![false; self.nodes];
        for p in 1..self.nodes {
            let mut found = None;
            for i in 1..self.nodes {
                if bits >> self.var(i, p) & 1 == 1 {
                    if found.is_some() {
                        return None;
                    }
                    found = Some(i);
                }
            }
            let i = found?;
            if seen[i] {
                return None;
            }
            seen[i] = true;
            order[p] = i;
        }
        debug_assert_eq!(seen.iter().filter(|s| **s).count(), m);
        Some(order)
    }
}

/// Cost of the closed tour visiting nodes in `order`.
pub fn tour_cost(weights: &[Vec<i64>], order: &[usize]) -> i64 {
    let n = order.len();
    (0..n).map(|k| weights[order[k]][order[(k + 1) % n]]).sum()
}

/// Draws a random instance of `class` on `qubits` qubits.
pub fn gen_instance(
    class: ProblemClass,
    qubits: usize,
    seed: u64,
) -> Result<ProblemInstance, GenError> {
    class.check_qubits(qubits)?;
    let mut r = rng::seeded(seed);
    let payload = match class {
        ProblemClass::StableSet => {
            let mut edges = Vec::new();
            for i in 0..qubits {
                for j in (i + 1)..qubits {
                    if r.random_bool(STABLE_SET_EDGE_PROBABILITY) {
                        edges.push((i, j, 1));
                    }
                }
            }
            Payload::Graph {
                nodes: qubits,
                edges,
            }
        }
        ProblemClass::Max3Sat => {
            let variables = qubits / 2;
            let clauses = (0..qubits / 3)
                .map(|_| random_clause(&mut r, variables))
                .collect();
            Payload::Clauses {
                variables,
                clauses,
                duplicate_clauses_allowed: true,
            }
        }
        ProblemClass::Partition => {
            let hi = (qubits * qubits + 1) as i64;
            Payload::Numbers {
                values: (0..qubits).map(|_| r.random_range(1..=hi)).collect(),
            }
        }
        ProblemClass::MaxCut => {
            let (lo, hi) = MAXCUT_WEIGHT_RANGE;
            let mut edges = Vec::new();
            for i in 0..qubits {
                for j in (i + 1)..qubits {
                    edges.push((i, j, r.random_range(lo..=hi)));
                }
            }
            Payload::Graph {
                nodes: qubits,
                edges,
            }
        }
        ProblemClass::MarketSplit => return gen_marketsplit(qubits, seed),
        ProblemClass::Tsp => {
            let nodes = isqrt(qubits) + 1;
            let (lo, hi) = TSP_WEIGHT_RANGE;
            let weights = (0..nodes)
                .map(|i| {
                    (0..nodes)
                        .map(|j| if i == j { 0 } else { r.random_range(lo..=hi) })
                        .collect()
                })
                .collect();
            Payload::Tsp { nodes, weights }
        }
    };
    Ok(ProblemInstance {
        class,
        qubits,
        seed,
        payload,
    })
}

/// Right-hand side rule for generated market split instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarketSplitRhs {
    /// `b_i = sum_j a_ij`. Every column gets a linear spin term, and
    /// `x = 1` is always optimal with value 0.
    FullSum,
    /// `b_i = floor(sum_j a_ij / 2)`, the classical hard split. Rows with an
    /// even sum contribute no linear spin terms.
    HalfSum,
}

/// Market split instance with `floor(q/10) + 1` constraints, entries uniform
/// in `[0, 99]` and `b_i = sum_j a_ij`.
pub fn gen_marketsplit(qubits: usize, seed: u64) -> Result<ProblemInstance, GenError> {
    gen_marketsplit_with(qubits, seed, MarketSplitRhs::FullSum)
}

/// Same matrix as [`gen_marketsplit`] for a given seed, with a chosen
/// right-hand side.
pub fn gen_marketsplit_with(
    qubits: usize,
    seed: u64,
    rhs: MarketSplitRhs,
) -> Result<ProblemInstance, GenError> {
    ProblemClass::MarketSplit.check_qubits(qubits)?;
    let mut r = rng::seeded(seed);
    let rows = qubits / 10 + 1;
    let a: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..qubits)
                .map(|_| r.random_range(0..=MARKETSPLIT_MAX_ENTRY))
                .collect()
        })
        .collect();
    let b = a
        .iter()
        .map(|row| {
            let sum = row.iter().sum::<i64>();
            match rhs {
                MarketSplitRhs::FullSum => sum,
                MarketSplitRhs::HalfSum => sum / 2,
            }
        })
        .collect();
    Ok(ProblemInstance {
        class: ProblemClass::MarketSplit,
        qubits,
        seed,
        payload: Payload::Matrix { a, b },
    })
}

fn random_clause<R: Rng>(r: &mut R, variables: usize) -> [i32; 3] {
    let mut clause = [0i32; 3];
    for k in 0..3 {
        let allowed: Vec<i32> = (1..=variables as i32)
            .filter(|v| !clause[..k].iter().any(|l| l.abs() == *v))
            .flat_map(|v| [v, -v])
            .collect();
        clause[k] = allowed[r.random_range(0..allowed.len())];
    }
    clause
}

impl ProblemInstance {
    /// Checks that the payload is consistent with the class and qubit count.
    pub fn validate(&self) -> Result<(), GenError> {
        let q = self.qubits;
        let mismatch = || GenError::PayloadMismatch(self.class);
        match (&self.payload, self.class) {
            (Payload::Graph { nodes, edges }, ProblemClass::StableSet | ProblemClass::MaxCut) => {
                if *nodes != q {
                    return Err(mismatch());
                }
                if edges.iter().any(|&(i, j, _)| i >= q || j >= q || i == j) {
                    return Err(GenError::InvalidPayload("edge references an invalid node"));
                }
            }
            (
                Payload::Clauses {
                    variables, clauses, ..
                },
                ProblemClass::Max3Sat,
            ) => {
                if clauses.len() * 3 != q {
                    return Err(mismatch());
                }
                for c in clauses {
                    if c.iter()
                        .any(|&l| l == 0 || l.unsigned_abs() as usize > *variables)
                    {
                        return Err(GenError::InvalidPayload(
                            "literal references an invalid variable",
                        ));
                    }
                    let v: Vec<u32> = c.iter().map(|l| l.unsigned_abs()).collect();
                    if v[0] == v[1] || v[0] == v[2] || v[1] == v[2] {
                        return Err(GenError::InvalidPayload("clause repeats a variable"));
                    }
                }
            }
            (Payload::Numbers { values }, ProblemClass::Partition) => {
                if values.len() != q {
                    return Err(mismatch());
                }
            }
            (Payload::Matrix { a, b }, ProblemClass::MarketSplit) => {
                if a.is_empty() || a.len() != b.len() || a.iter().any(|row| row.len() != q) {
                    return Err(mismatch());
                }
                if a.iter().flatten().any(|&v| v < 0) {
                    return Err(GenError::InvalidPayload(
                        "market split matrix must be nonnegative",
                    ));
                }
            }
            (Payload::Tsp { nodes, weights }, ProblemClass::Tsp) => {
                if *nodes < 2
                    || (nodes - 1) * (nodes - 1) != q
                    || weights.len() != *nodes
                    || weights.iter().any(|row| row.len() != *nodes)
                {
                    return Err(mismatch());
                }
            }
            _ => return Err(mismatch()),
        }
        Ok(())
    }

    /// Whether basis string `bits` is a feasible solution of the original
    /// (unpenalized) problem. Only TSP carries hard constraints here.
    pub fn is_feasible(&self, bits: u64) -> bool {
        match &self.payload {
            Payload::Tsp { weights, .. } => TspLayout::new(weights).tour(bits).is_some(),
            _ => true,
        }
    }

    pub fn tsp_layout(&self) -> Option<TspLayout> {
        match &self.payload {
            Payload::Tsp { weights, .. } => Some(TspLayout::new(weights)),
            _ => None,
        }
    }
}

/// Encodes a validated instance as a minimization QUBO on `inst.qubits` variables.
pub fn encode(inst: &ProblemInstance) -> Result<QuboProblem, GenError> {
    inst.validate()?;
    let q = inst.qubits;
    let p = match &inst.payload {
        Payload::Graph { edges, .. } if inst.class == ProblemClass::StableSet => {
            let plain: Vec<(usize, usize)> = edges.iter().map(|&(i, j, _)| (i, j)).collect();
            stable_set_qubo(q, &plain)?
        }
        Payload::Graph { edges, .. } => maxcut_qubo(q, edges)?,
        Payload::Clauses { clauses, .. } => stable_set_qubo(q, &max3sat_conflict_graph(clauses))?,
        Payload::Numbers { values } => {
            // (sum_j a_j y_j)^2 with y_j = 1 - 2 x_j
            let total: i64 = values.iter().sum();
            let mut p = QuboProblem::zeros(q)?;
            let terms: Vec<(usize, f64)> = values
                .iter()
                .enumerate()
                .map(|(j, &a)| (j, -2.0 * a as f64))
                .collect();
            p.add_squared_affine(1.0, total as f64, &terms);
            p
        }
        Payload::Matrix { a, b } => {
            let mut p = QuboProblem::zeros(q)?;
            for (row, &bi) in a.iter().zip(b) {
                let terms: Vec<(usize, f64)> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j, v as f64))
                    .collect();
                p.add_squared_affine(1.0, -(bi as f64), &terms);
            }
            p
        }
        Payload::Tsp { weights, .. } => tsp_qubo(weights)?,
    };
    Ok(p)
}

/// Encodes and converts to the Pauli-Z Hamiltonian in one step.
pub fn encode_hamiltonian(
    inst: &ProblemInstance,
) -> Result<(QuboProblem, DiagonalHamiltonian), GenError> {
    let p = encode(inst)?;
    let h = qubo_to_ising(&p)?;
    Ok((p, h))
}

/// `-sum_j x_j + P sum_{(i,j) in E} x_i x_j` with `P = STABLE_SET_PENALTY`.
pub fn stable_set_qubo(nodes: usize, edges: &[(usize, usize)]) -> Result<QuboProblem, GenError> {
    let mut p = QuboProblem::zeros(nodes)?;
    for j in 0..nodes {
        p.add_linear(j, -1.0);
    }
    for &(i, j) in edges {
        p.add_product(i, j, STABLE_SET_PENALTY);
    }
    Ok(p)
}

/// Negated cut weight: `-sum w_ij (x_i + x_j - 2 x_i x_j)`.
pub fn maxcut_qubo(nodes: usize, edges: &[(usize, usize, i64)]) -> Result<QuboProblem, GenError> {
    let mut p = QuboProblem::zeros(nodes)?;
    for &(i, j, w) in edges {
        if w == 0 {
            continue;
        }
        let w = w as f64;
        p.add_linear(i, -w);
        p.add_linear(j, -w);
        p.add_product(i, j, 2.0 * w);
    }
    Ok(p)
}

/// Vertex `3c + k` is the `k`-th literal of clause `c`. Each clause is a
/// triangle and complementary literals in different clauses are joined.
pub fn max3sat_conflict_graph(clauses: &[[i32; 3]]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for c in 0..clauses.len() {
        edges.push((3 * c, 3 * c + 1));
        edges.push((3 * c, 3 * c + 2));
        edges.push((3 * c + 1, 3 * c + 2));
    }
    let lits: Vec<i32> = clauses.iter().flatten().copied().collect();
    for u in 0..lits.len() {
        for v in (u + 1)..lits.len() {
            if u / 3 != v / 3 && lits[u] == -lits[v] {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Number of clauses satisfied by `assignment` (bit `v-1` is variable `v`).
pub fn satisfied_clauses(clauses: &[[i32; 3]], assignment: u64) -> usize {
    clauses
        .iter()
        .filter(|c| {
            c.iter().any(|&l| {
                let value = assignment >> (l.unsigned_abs() - 1) & 1 == 1;
                value == (l > 0)
            })
        })
        .count()
}

fn tsp_qubo(weights: &[Vec<i64>]) -> Result<QuboProblem, GenError> {
    let layout = TspLayout::new(weights);
    let n = layout.nodes;
    let mut p = QuboProblem::zeros(layout.free_vars())?;
    // leaving node 0 (fixed in position 0) for the node in position 1
    for j in 1..n {
        p.add_linear(layout.var(j, 1), weights[0][j] as f64);
    }
    for pos in 1..(n - 1) {
        for i in 1..n {
            for j in (1..n).filter(|&j| j != i) {
                let w = weights[i][j];
                if w != 0 {
                    p.add_product(layout.var(i, pos), layout.var(j, pos + 1), w as f64);
                }
            }
        }
    }
    // closing the cycle back to node 0
    for j in 1..n {
        p.add_linear(layout.var(j, n - 1), weights[j][0] as f64);
    }
    for i in 1..n {
        let row: Vec<(usize, f64)> = (1..n).map(|pos| (layout.var(i, pos), 1.0)).collect();
        p.add_squared_affine(layout.alpha, -1.0, &row);
    }
    for pos in 1..n {
        let col: Vec<(usize, f64)> = (1..n).map(|i| (layout.var(i, pos), 1.0)).collect();
        p.add_squared_affine(layout.alpha, -1.0, &col);
    }
    Ok(p)
}

fn isqrt(v: usize) -> usize {
    let mut r = 0;
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}
