use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vqebench::config::{ExperimentConfig, SpectrumConfig};
use vqebench::formats::{read_json, write_atomic, write_json, ExactSolutionFile};
use vqebench::records::load_records;
use vqebench::report::{
    curves, difference_csv, filter_class, form_difference, write_report, Metric,
};
use vqebench::runner::run_experiment;
use vqebench::spectrum::{spectrum_csv, spectrum_report};
use vqebench_core::bench::PreparedInstance;
use vqebench_core::ising::HamiltonianRepr;
use vqebench_core::problems::{gen_instance, ProblemClass, ProblemInstance};

#[derive(Parser)]
#[command(name = "vqebench", version, about = "VQE benchmark laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Convergence,
    Ratio,
    Sampling,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance as JSON.
    Generate {
        #[arg(long)]
        class: ProblemClass,
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the encoded Hamiltonian here.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Solve an instance file by exhaustive enumeration.
    SolveExact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment sweep described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build a profile table from a directory of records.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricArg,
        /// Convergence precision.
        #[arg(long, default_value_t = 0.01)]
        tau: f64,
        /// Sampling probability threshold.
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Restrict to one problem class.
        #[arg(long)]
        class: Option<ProblemClass>,
        /// Write `A - B` per optimizer for two forms instead, e.g. `2L-CZ,2L-T`.
        #[arg(long)]
        diff: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate spectrum and matrix statistics.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Generate {
            class,
            qubits,
            seed,
            out,
            hamiltonian,
        } => {
            let inst = gen_instance(class, qubits, seed)?;
            write_json(&out, &inst)?;
            if let Some(path) = hamiltonian {
                let (_, h) = vqebench_core::problems::encode_hamiltonian(&inst)?;
                write_json(&path, &HamiltonianRepr::from(h))?;
            }
        }
        Command::SolveExact { instance, out } => {
            let inst: ProblemInstance = read_json(&instance)?;
            let prepared = PreparedInstance::from_instance(inst)?;
            write_json(&out, &ExactSolutionFile::from(&prepared.exact))?;
        }
        Command::Run { config } => {
            let cfg: ExperimentConfig = read_json(&config)?;
            let summary = run_experiment(&cfg)?;
            println!(
                "written {} existing {} failed {} skipped sizes {}",
                summary.written,
                summary.existing,
                summary.failed.len(),
                summary.skipped_sizes.len()
            );
            for f in &summary.failed {
                eprintln!("{}: {}", f.cell, f.message);
            }
        }
        Command::Report {
            records,
            metric,
            tau,
            rho,
            class,
            diff,
            out,
        } => {
            let metric = match metric {
                MetricArg::Convergence => Metric::Convergence { tau },
                MetricArg::Ratio => Metric::Ratio,
                MetricArg::Sampling => Metric::Sampling { rho },
            };
            let recs = filter_class(load_records(&records)?, class);
            let cs = curves(&recs, metric)?;
            match diff {
                Some(pair) => {
                    let Some((a, b)) = pair.split_once(',') else {
                        bail!("--diff expects two forms separated by a comma");
                    };
                    let d = form_difference(&cs, a, b);
                    if d.is_empty() {
                        bail!("no optimizer has records for both {a} and {b}");
                    }
                    write_atomic(&out, &difference_csv(&d)?)?;
                }
                None => write_report(&out, &cs, metric, class)?,
            }
        }
        Command::Spectrum { config, out } => {
            let cfg: SpectrumConfig = read_json(&config)?;
            write_atomic(&out, &spectrum_csv(&spectrum_report(&cfg)?)?)?;
        }
    }
    Ok(())
}
