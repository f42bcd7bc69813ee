use std::fs;
use std::path::Path;

use vqebench::config::{ExperimentConfig, FormSpec, Seeds};
use vqebench::records::load_records;
use vqebench::runner::run_experiment;
use vqebench_core::optim::{Algorithm, OptimizerConfig};
use vqebench_core::problems::ProblemClass;
use vqebench_core::simulator::Entangler;

fn config(
    dir: &Path,
    classes: Vec<ProblemClass>,
    qubits: Vec<usize>,
    algs: &[Algorithm],
    seeds: Seeds,
) -> ExperimentConfig {
    ExperimentConfig {
        classes,
        qubits,
        forms: vec![FormSpec {
            layers: 1,
            entangler: Entangler::None,
        }],
        optimizers: algs.iter().map(|&a| OptimizerConfig::new(a)).collect(),
        seeds,
        budget_factor: 100,
        output_dir: dir.to_path_buf(),
        keep_thetas: false,
        threads: Some(1),
    }
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn single_cell_gives_one_record_within_budget() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        vec![ProblemClass::MaxCut],
        vec![4],
        &[Algorithm::FdLbfgs],
        Seeds::List(vec![3]),
    );
    let s = run_experiment(&cfg).unwrap();
    assert_eq!((s.written, s.existing, s.failed.len()), (1, 0, 0));
    let recs = load_records(dir.path()).unwrap();
    assert_eq!(recs.len(), 1);
    assert!(recs[0].energies.len() <= 100 * (4 + 1));
    assert_eq!(recs[0].f_initial, recs[0].energies[0]);
    assert!(recs[0].energies.iter().all(|e| *e >= recs[0].f_star - 1e-9));
}

#[test]
fn sweep_count_seed_sharing_and_skipped_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let algs = [
        Algorithm::FdLbfgs,
        Algorithm::LinearModelTrust,
        Algorithm::PowellCd,
        Algorithm::Spsa,
    ];
    let cfg = config(
        dir.path(),
        ProblemClass::ALL.to_vec(),
        vec![6],
        &algs,
        Seeds::Count(3),
    );
    let s = run_experiment(&cfg).unwrap();
    // TSP needs a perfect square
    assert_eq!(s.skipped_sizes, [(ProblemClass::Tsp, 6)]);
    assert_eq!(s.written, 5 * 1 * algs.len() * 3);
    let recs = load_records(dir.path()).unwrap();
    assert_eq!(recs.len(), s.written);
    for class in ProblemClass::ALL
        .into_iter()
        .filter(|c| *c != ProblemClass::Tsp)
    {
        let seeds_of = |a: Algorithm| {
            let mut v: Vec<u64> = recs
                .iter()
                .filter(|r| r.class == class && r.optimizer == a)
                .map(|r| r.seed)
                .collect();
            v.sort();
            v
        };
        for a in algs {
            assert_eq!(seeds_of(a), [0, 1, 2]);
        }
        let starts: Vec<f64> = recs
            .iter()
            .filter(|r| r.class == class && r.seed == 1)
            .map(|r| r.f_initial)
            .collect();
        assert!(starts.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn rerun_is_bit_identical_and_resumes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let algs = [Algorithm::Spsa, Algorithm::RbfGlobal];
    let mut cfg = config(
        a.path(),
        vec![ProblemClass::Partition],
        vec![3],
        &algs,
        Seeds::Count(2),
    );
    run_experiment(&cfg).unwrap();
    cfg.output_dir = b.path().to_path_buf();
    cfg.threads = Some(2);
    run_experiment(&cfg).unwrap();
    assert_eq!(sorted_files(a.path()), sorted_files(b.path()));

    let victim = sorted_files(a.path())[0].0.clone();
    fs::remove_file(a.path().join(&victim)).unwrap();
    cfg.output_dir = a.path().to_path_buf();
    let s = run_experiment(&cfg).unwrap();
    assert_eq!((s.written, s.existing), (1, 3));
    assert_eq!(sorted_files(a.path()), sorted_files(b.path()));
}

#[test]
fn failing_cell_is_recorded_and_the_run_continues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        vec![ProblemClass::MaxCut],
        vec![3],
        &[Algorithm::PowellCd],
        Seeds::Count(2),
    );
    // a directory where the temp file should go makes the write fail
    fs::create_dir_all(dir.path().join("maxcut-q3-s0-1L-powell_cd.jsonl.tmp")).unwrap();
    let s = run_experiment(&cfg).unwrap();
    assert_eq!(s.written, 1);
    assert_eq!(s.failed.len(), 1);
    assert_eq!(s.failed[0].cell, "maxcut-q3-s0-1L-powell_cd");
    assert!(dir
        .path()
        .join("maxcut-q3-s0-1L-powell_cd.error.json")
        .exists());
}

#[test]
fn thetas_are_kept_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(
        dir.path(),
        vec![ProblemClass::StableSet],
        vec![3],
        &[Algorithm::Spsa],
        Seeds::Count(1),
    );
    cfg.keep_thetas = true;
    run_experiment(&cfg).unwrap();
    let r = &load_records(dir.path()).unwrap()[0];
    let t = r.thetas.as_ref().unwrap();
    assert_eq!(t.len(), r.energies.len());
    assert!(t.iter().all(|v| v.len() == 3));
}
