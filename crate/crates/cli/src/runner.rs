//! Experiment sweeps: every (instance, form, optimizer) cell becomes one
//! record file. Existing record files are left alone, so an interrupted run
//! resumes where it stopped.

use std::path::Path;
use std::sync::Mutex;

use anyhow::{Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vqebench_core::bench::{run_cell, PreparedInstance};
use vqebench_core::problems::ProblemClass;

use crate::config::ExperimentConfig;
use crate::formats::write_json;
use crate::records::{file_stem, write_record};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub written: usize,
    /// Cells whose record file already existed.
    pub existing: usize,
    pub failed: Vec<CellFailure>,
    /// `(class, q)` pairs the class cannot be generated at.
    pub skipped_sizes: Vec<(ProblemClass, usize)>,
}

#[derive(Default)]
struct Tally {
    written: usize,
    existing: usize,
    failed: Vec<CellFailure>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut summary = RunSummary::default();
    let mut instances = Vec::new();
    for &class in &cfg.classes {
        for &q in &cfg.qubits {
            if let Err(e) = class.check_qubits(q) {
                warn!("skipping {class} at q={q}: {e}");
                summary.skipped_sizes.push((class, q));
                continue;
            }
            instances.extend(cfg.seeds.list().into_iter().map(|s| (class, q, s)));
        }
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let tally = Mutex::new(Tally::default());
    pool.install(|| {
        instances
            .par_iter()
            .for_each(|&(class, q, seed)| run_instance(cfg, dir, class, q, seed, &tally));
    });
    let tally = tally.into_inner().expect("worker panicked");
    summary.written = tally.written;
    summary.existing = tally.existing;
    summary.failed = tally.failed;
    summary.failed.sort_by(|a, b| a.cell.cmp(&b.cell));
    info!(
        "{} records written, {} already present, {} failed",
        summary.written,
        summary.existing,
        summary.failed.len()
    );
    Ok(summary)
}

fn run_instance(
    cfg: &ExperimentConfig,
    dir: &Path,
    class: ProblemClass,
    q: usize,
    seed: u64,
    tally: &Mutex<Tally>,
) {
    let cells: Vec<_> = cfg
        .forms
        .iter()
        .flat_map(|f| cfg.optimizers.iter().map(move |o| (f.for_qubits(q), o)))
        .map(|(form, o)| (file_stem(class, q, seed, &form, o.algorithm), form, o))
        .collect();
    let pending: Vec<_> = cells
        .into_iter()
        .filter(|(stem, ..)| !dir.join(format!("{stem}.jsonl")).exists())
        .collect();
    let existing = cfg.forms.len() * cfg.optimizers.len() - pending.len();
    if existing > 0 {
        tally.lock().unwrap().existing += existing;
    }
    if pending.is_empty() {
        return;
    }

    let prepared = PreparedInstance::generate(class, q, seed);
    for (stem, form, opt) in pending {
        let mut o = opt.clone();
        o.budget = Some(cfg.budget_factor * (form.parameter_count() + 1));
        let outcome = prepared
            .as_ref()
            .map_err(|e| anyhow::anyhow!("{e}"))
            .and_then(|p| run_cell(p, &form, &o, seed, cfg.keep_thetas).map_err(Into::into))
            .and_then(|r| write_record(dir, &r));
        let error_path = dir.join(format!("{stem}.error.json"));
        match outcome {
            Ok(_) => {
                let _ = std::fs::remove_file(&error_path);
                tally.lock().unwrap().written += 1;
            }
            Err(e) => {
                let failure = CellFailure {
                    cell: stem.clone(),
                    message: format!("{e:#}"),
                };
                warn!("cell {stem} failed: {}", failure.message);
                if let Err(w) = write_json(&error_path, &failure) {
                    warn!("could not record failure of {stem}: {w:#}");
                }
                tally.lock().unwrap().failed.push(failure);
            }
        }
    }
}
