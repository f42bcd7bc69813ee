//! Experiment and spectrum configuration documents.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use vqebench_core::ising::WeightMode;
use vqebench_core::optim::OptimizerConfig;
use vqebench_core::problems::ProblemClass;
use vqebench_core::simulator::{Entangler, VariationalForm};

/// Either a count `k` (seeds `0..k`) or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::Count(20)
    }
}

impl Seeds {
    pub fn list(&self) -> Vec<u64> {
        match self {
            Seeds::Count(k) => (0..*k).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub layers: usize,
    pub entangler: Entangler,
}

impl FormSpec {
    pub fn for_qubits(&self, qubits: usize) -> VariationalForm {
        VariationalForm {
            qubits,
            layers: self.layers,
            entangler: self.entangler,
        }
    }
}

fn default_forms() -> Vec<FormSpec> {
    vec![FormSpec {
        layers: 2,
        entangler: Entangler::FullCz,
    }]
}

fn default_budget_factor() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub classes: Vec<ProblemClass>,
    /// Sizes to sweep; sizes a class cannot take are skipped.
    pub qubits: Vec<usize>,
    #[serde(default = "default_forms")]
    pub forms: Vec<FormSpec>,
    /// One entry per algorithm. `budget` and `bounds` must be left unset.
    pub optimizers: Vec<OptimizerConfig>,
    #[serde(default)]
    pub seeds: Seeds,
    /// Budget is `budget_factor * (n + 1)` evaluations for `n` parameters.
    #[serde(default = "default_budget_factor")]
    pub budget_factor: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub keep_thetas: bool,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() || self.qubits.is_empty() || self.forms.is_empty() {
            bail!("classes, qubits and forms must be non-empty");
        }
        if self.optimizers.is_empty() {
            bail!("at least one optimizer is required");
        }
        let mut seen = BTreeSet::new();
        for o in &self.optimizers {
            if !seen.insert(o.algorithm) {
                bail!("optimizer {} is listed twice", o.algorithm);
            }
            if o.budget.is_some() || o.bounds.is_some() {
                bail!(
                    "optimizer {}: budget and bounds are set by the harness",
                    o.algorithm
                );
            }
        }
        if self.budget_factor < 2 {
            bail!("budget_factor must be at least 2");
        }
        if self.seeds.list().is_empty() {
            bail!("seed list is empty");
        }
        for f in &self.forms {
            f.for_qubits(1).validate()?;
        }
        if self.threads == Some(0) {
            bail!("threads must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZzSweep {
    pub qubits: Vec<usize>,
    pub pairs: usize,
    pub weights: WeightMode,
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub classes: Vec<ProblemClass>,
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub random_zz: Vec<ZzSweep>,
    /// Eigenvalues closer than this count as one.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}
