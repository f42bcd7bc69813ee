//! Profile tables over persisted records, grouped by optimizer and form.
//! Records of different classes and sizes are pooled; filter beforehand for
//! per-class tables.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Result};
use serde::Serialize;
use vqebench_core::metrics::{
    approx_ratio_profile, convergence_profile, grid, sampling_profile, RunRecord, LUCKY_START_TOL,
};
use vqebench_core::optim::Algorithm;
use vqebench_core::problems::ProblemClass;

use crate::formats::{write_atomic, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum Metric {
    Convergence { tau: f64 },
    Sampling { rho: f64 },
    Ratio,
}

/// One curve: `values[t]` for grid point `t`, plus excluded counts for ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub optimizer: Algorithm,
    pub form: String,
    pub records: usize,
    pub lucky_starts: usize,
    pub values: Vec<Option<f64>>,
    pub excluded: Option<Vec<usize>>,
}

pub fn filter_class(records: Vec<RunRecord>, class: Option<ProblemClass>) -> Vec<RunRecord> {
    match class {
        Some(c) => records.into_iter().filter(|r| r.class == c).collect(),
        None => records,
    }
}

pub fn curves(records: &[RunRecord], metric: Metric) -> Result<Vec<Curve>> {
    if records.is_empty() {
        bail!("no records to report on");
    }
    let mut groups: BTreeMap<(Algorithm, String), Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.optimizer, r.form.to_string()))
            .or_default()
            .push(r.clone());
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((optimizer, form), group) in groups {
        let lucky_starts = group.iter().filter(|r| r.lucky_start()).count();
        let (values, excluded) = match metric {
            Metric::Convergence { tau } => (
                convergence_profile(&group, tau)?
                    .fraction
                    .into_iter()
                    .map(Some)
                    .collect(),
                None,
            ),
            Metric::Sampling { rho } => (
                sampling_profile(&group, rho)?
                    .fraction
                    .into_iter()
                    .map(Some)
                    .collect(),
                None,
            ),
            Metric::Ratio => {
                let c = approx_ratio_profile(&group)?;
                (c.ratio, Some(c.excluded))
            }
        };
        out.push(Curve {
            optimizer,
            form,
            records: group.len(),
            lucky_starts,
            values,
            excluded,
        });
    }
    Ok(out)
}

/// Pointwise `a - b` per optimizer for two forms, where both are present.
pub fn form_difference(
    curves: &[Curve],
    form_a: &str,
    form_b: &str,
) -> Vec<(Algorithm, Vec<Option<f64>>)> {
    let find =
        |alg: Algorithm, form: &str| curves.iter().find(|c| c.optimizer == alg && c.form == form);
    let mut algs: Vec<Algorithm> = curves.iter().map(|c| c.optimizer).collect();
    algs.dedup();
    algs.into_iter()
        .filter_map(|alg| {
            let (a, b) = (find(alg, form_a)?, find(alg, form_b)?);
            let diff = a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| Some((*x)? - (*y)?))
                .collect();
            Some((alg, diff))
        })
        .collect()
}

fn value_column(metric: Metric) -> &'static str {
    match metric {
        Metric::Ratio => "ratio",
        _ => "fraction",
    }
}

fn fmt6(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn curves_csv(curves: &[Curve], metric: Metric) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["optimizer", "form", "normalized_iter", value_column(metric)];
    if metric == Metric::Ratio {
        header.push("excluded");
    }
    w.write_record(&header)?;
    for c in curves {
        for t in grid() {
            let mut row = vec![
                c.optimizer.to_string(),
                c.form.clone(),
                t.to_string(),
                fmt6(c.values[t]),
            ];
            if let Some(ex) = &c.excluded {
                row.push(ex[t].to_string());
            }
            w.write_record(&row)?;
        }
    }
    Ok(w.into_inner()?)
}

pub fn difference_csv(diffs: &[(Algorithm, Vec<Option<f64>>)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["optimizer", "normalized_iter", "difference"])?;
    for (alg, d) in diffs {
        for t in grid() {
            w.write_record([alg.to_string(), t.to_string(), fmt6(d[t])])?;
        }
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
struct ReportMeta<'a> {
    #[serde(flatten)]
    metric: Metric,
    class: Option<ProblemClass>,
    records: usize,
    /// Runs whose start value was within this of the optimum are counted as
    /// converged (and solved) at normalized iteration 0.
    lucky_start_tolerance: f64,
    lucky_start_rule: &'static str,
    groups: Vec<GroupMeta<'a>>,
}

#[derive(Serialize)]
struct GroupMeta<'a> {
    optimizer: Algorithm,
    form: &'a str,
    records: usize,
    lucky_starts: usize,
}

/// Writes the CSV and a `<out>.meta.json` sidecar describing how it was made.
pub fn write_report(
    out: &Path,
    curves: &[Curve],
    metric: Metric,
    class: Option<ProblemClass>,
) -> Result<()> {
    write_atomic(out, &curves_csv(curves, metric)?)?;
    let meta = ReportMeta {
        metric,
        class,
        records: curves.iter().map(|c| c.records).sum(),
        lucky_start_tolerance: LUCKY_START_TOL,
        lucky_start_rule: "converged at normalized iteration 0",
        groups: curves
            .iter()
            .map(|c| GroupMeta {
                optimizer: c.optimizer,
                form: &c.form,
                records: c.records,
                lucky_starts: c.lucky_starts,
            })
            .collect(),
    };
    let mut meta_path = out.as_os_str().to_owned();
    meta_path.push(".meta.json");
    write_json(Path::new(&meta_path), &meta)
}
