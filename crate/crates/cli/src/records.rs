//! JSONL run records: a metadata line followed by one line per evaluation.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vqebench_core::metrics::RunRecord;
use vqebench_core::optim::{Algorithm, Termination};
use vqebench_core::problems::ProblemClass;
use vqebench_core::simulator::VariationalForm;

use crate::formats::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordHeader {
    pub class: ProblemClass,
    pub qubits: usize,
    pub seed: u64,
    pub form: VariationalForm,
    pub optimizer: Algorithm,
    pub budget: usize,
    pub f_initial: f64,
    pub f_star: f64,
    pub optimal_set: Vec<u64>,
    pub termination: Termination,
    pub evaluations: usize,
}

/// Energies that are not finite are stored as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalLine {
    pub eval_index: usize,
    pub energy: Option<f64>,
    pub prob_optimal: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

pub fn file_stem(
    class: ProblemClass,
    qubits: usize,
    seed: u64,
    form: &VariationalForm,
    alg: Algorithm,
) -> String {
    format!("{class}-q{qubits}-s{seed}-{form}-{alg}")
}

pub fn record_path(dir: &Path, r: &RunRecord) -> PathBuf {
    dir.join(format!(
        "{}.jsonl",
        file_stem(r.class, r.qubits, r.seed, &r.form, r.optimizer)
    ))
}

pub fn encode_record(r: &RunRecord) -> Result<Vec<u8>> {
    let header = RecordHeader {
        class: r.class,
        qubits: r.qubits,
        seed: r.seed,
        form: r.form,
        optimizer: r.optimizer,
        budget: r.budget,
        f_initial: r.f_initial,
        f_star: r.f_star,
        optimal_set: r.optimal_set.clone(),
        termination: r.termination,
        evaluations: r.energies.len(),
    };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    for (i, (e, p)) in r.energies.iter().zip(&r.prob_optimal).enumerate() {
        let line = EvalLine {
            eval_index: i + 1,
            energy: e.is_finite().then_some(*e),
            prob_optimal: *p,
            theta: r.thetas.as_ref().map(|t| t[i].clone()),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn write_record(dir: &Path, r: &RunRecord) -> Result<PathBuf> {
    let path = record_path(dir, r);
    write_atomic(&path, &encode_record(r)?)?;
    Ok(path)
}

pub fn read_record(path: &Path) -> Result<RunRecord> {
    let ctx = || format!("reading record {}", path.display());
    let file = fs::File::open(path).with_context(ctx)?;
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .context("record file is empty")
        .with_context(ctx)??;
    let h: RecordHeader = serde_json::from_str(&first).with_context(ctx)?;
    let mut energies = Vec::with_capacity(h.evaluations);
    let mut probs = Vec::with_capacity(h.evaluations);
    let mut thetas = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: EvalLine = serde_json::from_str(&line).with_context(ctx)?;
        if e.eval_index != energies.len() + 1 {
            bail!(
                "{}: evaluation {} out of order",
                path.display(),
                e.eval_index
            );
        }
        energies.push(e.energy.unwrap_or(f64::NAN));
        probs.push(e.prob_optimal);
        if let Some(t) = e.theta {
            thetas.push(t);
        }
    }
    if energies.len() != h.evaluations {
        bail!(
            "{}: expected {} evaluations, found {}",
            path.display(),
            h.evaluations,
            energies.len()
        );
    }
    let thetas = if thetas.is_empty() {
        None
    } else if thetas.len() == energies.len() {
        Some(thetas)
    } else {
        bail!(
            "{}: parameter vectors present on only some lines",
            path.display()
        );
    };
    Ok(RunRecord {
        class: h.class,
        qubits: h.qubits,
        seed: h.seed,
        form: h.form,
        optimizer: h.optimizer,
        budget: h.budget,
        f_initial: h.f_initial,
        f_star: h.f_star,
        optimal_set: h.optimal_set,
        termination: h.termination,
        energies,
        prob_optimal: probs,
        thetas,
    })
}

/// Every `*.jsonl` record in `dir`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_record(p)).collect()
}
