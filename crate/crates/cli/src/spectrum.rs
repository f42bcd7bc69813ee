//! Per-(family, q) averages of the spectrum and matrix statistics.

use anyhow::Result;
use log::warn;
use serde::Serialize;
use vqebench_core::ising::{random_zz_hamiltonian, spectrum_stats, SpectrumStats, WeightMode};
use vqebench_core::problems::{encode_hamiltonian, gen_instance};

use crate::config::SpectrumConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    /// Problem class name, or `random_zz_<weights>_<pairs>`.
    pub family: String,
    pub qubits: usize,
    pub samples: usize,
    pub term_count: f64,
    pub distinct_eigenvalues: f64,
    pub density: f64,
    pub negative_eig_fraction: f64,
    pub symmetric_density: f64,
    pub symmetric_negative_eig_fraction: f64,
}

fn average(family: String, qubits: usize, stats: &[SpectrumStats]) -> SpectrumRow {
    let k = stats.len() as f64;
    let mean = |f: fn(&SpectrumStats) -> f64| stats.iter().map(f).sum::<f64>() / k;
    SpectrumRow {
        family,
        qubits,
        samples: stats.len(),
        term_count: mean(|s| s.term_count as f64),
        distinct_eigenvalues: mean(|s| s.distinct_eigenvalues as f64),
        density: mean(|s| s.density),
        negative_eig_fraction: mean(|s| s.negative_eig_fraction),
        symmetric_density: mean(|s| s.symmetric_density),
        symmetric_negative_eig_fraction: mean(|s| s.symmetric_negative_eig_fraction),
    }
}

pub fn spectrum_report(cfg: &SpectrumConfig) -> Result<Vec<SpectrumRow>> {
    let seeds = cfg.seeds.list();
    let mut rows = Vec::new();
    for &class in &cfg.classes {
        for &q in &cfg.qubits {
            if let Err(e) = class.check_qubits(q) {
                warn!("skipping {class} at q={q}: {e}");
                continue;
            }
            let mut stats = Vec::with_capacity(seeds.len());
            for &s in &seeds {
                let (p, h) = encode_hamiltonian(&gen_instance(class, q, s)?)?;
                stats.push(spectrum_stats(&h, &p, cfg.tolerance)?);
            }
            rows.push(average(class.to_string(), q, &stats));
        }
    }
    for sweep in &cfg.random_zz {
        let mode = match sweep.weights {
            WeightMode::Discrete => "discrete",
            WeightMode::Continuous => "continuous",
        };
        for &q in &sweep.qubits {
            let mut stats = Vec::with_capacity(seeds.len());
            for &s in &seeds {
                let h = random_zz_hamiltonian(q, sweep.pairs, sweep.weights, s)?;
                stats.push(spectrum_stats(&h, &h.to_qubo()?, cfg.tolerance)?);
            }
            rows.push(average(
                format!("random_zz_{mode}_{}", sweep.pairs),
                q,
                &stats,
            ));
        }
    }
    Ok(rows)
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "qubits",
        "samples",
        "term_count",
        "distinct_eigenvalues",
        "density",
        "negative_eig_fraction",
        "symmetric_density",
        "symmetric_negative_eig_fraction",
    ])?;
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.qubits.to_string(),
            r.samples.to_string(),
            format!("{:.6}", r.term_count),
            format!("{:.6}", r.distinct_eigenvalues),
            format!("{:.6}", r.density),
            format!("{:.6}", r.negative_eig_fraction),
            format!("{:.6}", r.symmetric_density),
            format!("{:.6}", r.symmetric_negative_eig_fraction),
        ])?;
    }
    Ok(w.into_inner()?)
}
