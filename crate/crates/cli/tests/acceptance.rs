//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.
//!
//! Run with `cargo test -p vqebench --test acceptance`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use vqebench::config::{ExperimentConfig, FormSpec, Seeds};
use vqebench::records::load_records;
use vqebench::report::{curves, form_difference, write_report, Curve, Metric};
use vqebench::runner::run_experiment;
use vqebench_core::ising::{
    random_zz_hamiltonian, spectrum_stats, DiagonalHamiltonian, PauliZTerm, WeightMode,
};
use vqebench_core::metrics::{
    approx_ratio_profile, convergence_profile, sampling_profile, RunRecord, GRID_MAX,
};
use vqebench_core::optim::{minimize, Algorithm, BoxBounds, OptimizerConfig, Termination};
use vqebench_core::problems::{
    encode_hamiltonian, gen_instance, Payload, ProblemClass, ProblemInstance,
};
use vqebench_core::rng::seeded;
use vqebench_core::simulator::{energy, prepare_state, Entangler, VariationalForm};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn binom2(q: usize) -> usize {
    q * (q - 1) / 2
}

// ---------------------------------------------------------------------------
// Direct objectives computed from instance payloads, independent of the
// encoders.

fn bit(z: u64, i: usize) -> i64 {
    (z >> i & 1) as i64
}

fn direct_objective(inst: &ProblemInstance, z: u64) -> f64 {
    let q = inst.qubits;
    match &inst.payload {
        Payload::Graph { edges, .. } if inst.class == ProblemClass::StableSet => {
            let size: i64 = (0..q).map(|i| bit(z, i)).sum();
            let inside: i64 = edges.iter().map(|&(i, j, _)| bit(z, i) * bit(z, j)).sum();
            (-size + 2 * inside) as f64
        }
        Payload::Graph { edges, .. } => {
            let cut: i64 = edges
                .iter()
                .filter(|&&(i, j, _)| bit(z, i) != bit(z, j))
                .map(|e| e.2)
                .sum();
            -cut as f64
        }
        Payload::Clauses { clauses, .. } => {
            // one vertex per literal occurrence
            let lits: Vec<i32> = clauses.iter().flatten().copied().collect();
            let size: i64 = (0..q).map(|i| bit(z, i)).sum();
            let mut conflicts = 0;
            for u in 0..q {
                for v in (u + 1)..q {
                    let adjacent = u / 3 == v / 3 || lits[u] == -lits[v];
                    if adjacent {
                        conflicts += bit(z, u) * bit(z, v);
                    }
                }
            }
            (-size + 2 * conflicts) as f64
        }
        Payload::Numbers { values } => {
            let s: i64 = values
                .iter()
                .enumerate()
                .map(|(j, a)| a * (1 - 2 * bit(z, j)))
                .sum();
            (s * s) as f64
        }
        Payload::Matrix { a, b } => a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let r: i64 = row
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * bit(z, j))
                    .sum::<i64>()
                    - bi;
                (r * r) as f64
            })
            .sum(),
        Payload::Tsp { nodes, weights } => {
            let n = *nodes;
            let x = |i: usize, p: usize| bit(z, (i - 1) * (n - 1) + (p - 1));
            let wmax = weights.iter().flatten().copied().max().unwrap_or(0).max(1);
            let alpha = n as i64 * wmax;
            let mut cost = 0;
            for j in 1..n {
                cost += weights[0][j] * x(j, 1) + weights[j][0] * x(j, n - 1);
            }
            for p in 1..(n - 1) {
                for i in 1..n {
                    for j in 1..n {
                        if i != j {
                            cost += weights[i][j] * x(i, p) * x(j, p + 1);
                        }
                    }
                }
            }
            let mut penalty = 0;
            for i in 1..n {
                let s: i64 = (1..n).map(|p| x(i, p)).sum();
                penalty += (s - 1) * (s - 1);
            }
            for p in 1..n {
                let s: i64 = (1..n).map(|i| x(i, p)).sum();
                penalty += (s - 1) * (s - 1);
            }
            (cost + alpha * penalty) as f64
        }
    }
}

/// Classical optimum of the underlying problem, by its own enumeration.
fn class_optimum(inst: &ProblemInstance) -> f64 {
    match &inst.payload {
        Payload::Clauses {
            variables, clauses, ..
        } => {
            let best = (0..1u64 << variables)
                .map(|a| {
                    clauses
                        .iter()
                        .filter(|c| {
                            c.iter().any(|&l| {
                                let v = (a >> (l.unsigned_abs() - 1) & 1) == 1;
                                if l > 0 {
                                    v
                                } else {
                                    !v
                                }
                            })
                        })
                        .count()
                })
                .max()
                .unwrap();
            -(best as f64)
        }
        Payload::Tsp { nodes, weights } => {
            let mut rest: Vec<usize> = (1..*nodes).collect();
            let mut best = i64::MAX;
            permute(&mut rest, 0, &mut |order| {
                let mut c = weights[0][order[0]] + weights[*order.last().unwrap()][0];
                for w in order.windows(2) {
                    c += weights[w[0]][w[1]];
                }
                best = best.min(c);
            });
            best as f64
        }
        _ => (0..1u64 << inst.qubits)
            .map(|z| direct_objective(inst, z))
            .fold(f64::INFINITY, f64::min),
    }
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

// ---------------------------------------------------------------------------

fn c1_term_counts() -> Outcome {
    let mut detail = Vec::new();
    for q in 15..=18 {
        for seed in 0..20 {
            let (_, h) =
                encode_hamiltonian(&gen_instance(ProblemClass::Partition, q, seed).unwrap())
                    .unwrap();
            ensure(
                h.term_count() == binom2(q),
                format!("partition q={q} seed={seed}: {} terms", h.term_count()),
            )?;
        }
        let counts: Vec<usize> = (0..20)
            .map(|s| {
                encode_hamiltonian(&gen_instance(ProblemClass::MarketSplit, q, s).unwrap())
                    .unwrap()
                    .1
                    .term_count()
            })
            .collect();
        let mean = counts.iter().sum::<usize>() as f64 / 20.0;
        let target = binom2(q) + q;
        ensure(
            (mean.round() - target as f64).abs() <= 1.0,
            format!("marketsplit q={q}: mean {mean} vs {target}"),
        )?;
        ensure(
            counts.iter().all(|&c| c.abs_diff(target) <= 1),
            format!("marketsplit q={q}: instance counts {counts:?}"),
        )?;
        detail.push(format!("q{q}:{}/{mean:.2}", binom2(q)));
    }
    Ok(format!("partition/marketsplit means {}", detail.join(" ")))
}

fn c2_continuous_saturation() -> Outcome {
    let mut out = Vec::new();
    for q in [10usize, 12, 14] {
        // repeated pairs merge, so draw until 50 distinct terms exist (all
        // pairs when there are fewer than 50)
        let want = 50.min(q * (q - 1) / 2);
        for seed in 0..20 {
            let s = (50..)
                .map(|k| {
                    let h = random_zz_hamiltonian(q, k, WeightMode::Continuous, seed).unwrap();
                    spectrum_stats(&h, &h.to_qubo().unwrap(), 1e-9).unwrap()
                })
                .find(|s| s.term_count >= want)
                .unwrap();
            ensure(
                s.distinct_eigenvalues == 1 << (q - 1),
                format!(
                    "q={q} seed={seed}: {} distinct, {} terms",
                    s.distinct_eigenvalues, s.term_count
                ),
            )?;
        }
        out.push(format!("q{q}={}", 1 << (q - 1)));
    }
    Ok(format!("all 60 Hamiltonians saturate ({})", out.join(", ")))
}

fn c3_discrete_counts() -> Outcome {
    let counts: Vec<usize> = (0..20)
        .map(|seed| {
            let h = random_zz_hamiltonian(10, 10, WeightMode::Discrete, seed).unwrap();
            spectrum_stats(&h, &h.to_qubo().unwrap(), 1e-9)
                .unwrap()
                .distinct_eigenvalues
        })
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / 20.0;
    ensure(
        (7.0..=12.0).contains(&mean),
        format!("mean {mean}, counts {counts:?}"),
    )?;
    Ok(format!("mean distinct eigenvalues {mean:.2}"))
}

fn c4_density() -> Outcome {
    let mean_stats = |class| {
        let (mut d, mut neg) = (0.0, 0.0);
        for seed in 0..20 {
            let (p, h) = encode_hamiltonian(&gen_instance(class, 15, seed).unwrap()).unwrap();
            let s = spectrum_stats(&h, &p, 1e-9).unwrap();
            d += s.density / 20.0;
            neg += s.negative_eig_fraction / 20.0;
        }
        (d, neg)
    };
    let mut parts = Vec::new();
    for class in [ProblemClass::Partition, ProblemClass::MarketSplit] {
        let (d, neg) = mean_stats(class);
        ensure(
            (d - 1.0).abs() <= 0.02 && (neg - 1.0).abs() <= 0.02,
            format!("{class}: density {d:.4}, negative fraction {neg:.4}"),
        )?;
        parts.push(format!("{class} {d:.3}/{neg:.3}"));
    }
    let (d, _) = mean_stats(ProblemClass::StableSet);
    ensure(
        (0.35..=0.45).contains(&d),
        format!("stableset density {d:.4}"),
    )?;
    parts.push(format!("stableset density {d:.3}"));
    Ok(parts.join(", "))
}

fn c5_oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for class in ProblemClass::ALL {
        let sizes: &[usize] = if class == ProblemClass::Tsp {
            &[9]
        } else {
            &[6, 8, 10]
        };
        for &q in sizes {
            if class.check_qubits(q).is_err() {
                continue;
            }
            for seed in 0..20 {
                let inst = gen_instance(class, q, seed).unwrap();
                let (qubo, h) = encode_hamiltonian(&inst).unwrap();
                let diag_min = h
                    .diagonal()
                    .unwrap()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                let qubo_min = (0..1u64 << q)
                    .map(|z| qubo.objective(z))
                    .fold(f64::INFINITY, f64::min);
                let oracle = class_optimum(&inst);
                // every class here has integer data, so equality is exact
                ensure(
                    diag_min == qubo_min && qubo_min == oracle,
                    format!("{class} q={q} seed={seed}: diagonal {diag_min}, qubo {qubo_min}, oracle {oracle}"),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} instances, diagonal minimum = enumerated optimum exactly"
    ))
}

fn c6_basis_states() -> Outcome {
    let mut r = seeded(6);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let class = ProblemClass::ALL[r.random_range(0..6)];
        let q = match class {
            ProblemClass::Tsp => [4, 9][r.random_range(0..2)],
            ProblemClass::Max3Sat => [6, 9][r.random_range(0..2)],
            ProblemClass::MarketSplit => r.random_range(6..=10),
            _ => r.random_range(2..=10),
        };
        let inst = gen_instance(class, q, r.random_range(0..1000)).unwrap();
        let (_, h) = encode_hamiltonian(&inst).unwrap();
        let z: u64 = r.random_range(0..1u64 << q);
        let form = VariationalForm::new(q, 1, Entangler::None).unwrap();
        let theta: Vec<f64> = (0..q)
            .map(|i| if z >> i & 1 == 1 { PI } else { 0.0 })
            .collect();
        let psi = prepare_state(&form, &theta).unwrap();
        let e = energy(&psi, &h).unwrap();
        let f = direct_objective(&inst, z);
        let err = (e - f).abs();
        worst = worst.max(err);
        ensure(
            err <= 1e-9,
            format!("pair {k}: {class} q={q} z={z}: energy {e} vs objective {f}"),
        )?;
    }
    Ok(format!("200 pairs, max |energy - objective| = {worst:.2e}"))
}

fn random_hamiltonian(r: &mut impl Rng, q: usize) -> DiagonalHamiltonian {
    let mut terms = Vec::new();
    for i in 0..q {
        terms.push(PauliZTerm::single(i, r.random_range(-1.0..1.0)));
        for j in (i + 1)..q {
            terms.push(PauliZTerm::pair(i, j, r.random_range(-1.0..1.0)));
        }
    }
    DiagonalHamiltonian::new(q, r.random_range(-1.0..1.0), terms).unwrap()
}

fn c7_sinusoidal_slices() -> Outcome {
    let mut r = seeded(7);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let q = r.random_range(1..=6);
        let layers = r.random_range(1..=3);
        let entangler = if layers == 1 {
            Entangler::None
        } else {
            [
                Entangler::FullCz,
                Entangler::NearestNeighborCz,
                Entangler::TGate,
            ][r.random_range(0..3)]
        };
        let form = VariationalForm::new(q, layers, entangler).unwrap();
        let h = random_hamiltonian(&mut r, q);
        let theta: Vec<f64> = (0..form.parameter_count())
            .map(|_| r.random_range(-PI..PI))
            .collect();
        let c = r.random_range(0..theta.len());
        let at = |t: f64| {
            let mut th = theta.clone();
            th[c] += t;
            energy(&prepare_state(&form, &th).unwrap(), &h).unwrap()
        };
        let (e0, e1, e2) = (at(0.0), at(PI / 2.0), at(PI));
        let a = 0.5 * (e0 + e2);
        let (b, s) = (0.5 * (e0 - e2), e1 - a);
        let t = r.random_range(-PI..PI);
        let predicted = a + b * t.cos() + s * t.sin();
        let err = (predicted - at(t)).abs();
        worst = worst.max(err);
        ensure(
            err <= 1e-9,
            format!("probe {k}: form {form}, coordinate {c}: error {err:.3e}"),
        )?;
    }
    Ok(format!("100 probes, max prediction error {worst:.2e}"))
}

fn c8_optimizers() -> Outcome {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let mut starts = vec![vec![1.0; 5]];
    let mut r = seeded(8);
    for _ in 0..4 {
        starts.push((0..5).map(|_| r.random_range(-2.0..2.0)).collect());
    }
    let mut notes = Vec::new();
    for alg in [
        Algorithm::FdLbfgs,
        Algorithm::LinearModelTrust,
        Algorithm::PowellCd,
        Algorithm::Spsa,
    ] {
        let tol = if alg == Algorithm::Spsa { 1e-2 } else { 1e-6 };
        let mut worst: f64 = 0.0;
        for (i, x0) in starts.iter().enumerate() {
            let mut f = sphere;
            let cfg = OptimizerConfig::new(alg).with_seed(i as u64);
            let t = minimize(&mut f, x0, &cfg).unwrap();
            ensure(
                t.evaluations_used() <= 600,
                format!("{alg} used {}", t.evaluations_used()),
            )?;
            ensure(
                t.best_value() <= tol,
                format!("{alg} from {x0:?}: {:.3e}", t.best_value()),
            )?;
            worst = worst.max(t.best_value());
        }
        notes.push(format!("{alg} {worst:.1e}"));
    }
    let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let mut f = rosen;
        let cfg = OptimizerConfig::new(Algorithm::RbfGlobal)
            .with_budget(300)
            .with_bounds(BoxBounds::uniform(2, -2.0, 2.0))
            .with_seed(seed);
        let t = minimize(&mut f, &[-1.2, 1.0], &cfg).unwrap();
        ensure(t.evaluations_used() <= 300, "rbf over budget")?;
        ensure(
            t.best_value() <= 1e-2,
            format!("rbf_global seed {seed}: {:.3e}", t.best_value()),
        )?;
        worst = worst.max(t.best_value());
    }
    notes.push(format!("rbf_global rosenbrock {worst:.1e}"));
    Ok(format!("worst over starts: {}", notes.join(", ")))
}

fn synthetic_record(r: &mut impl Rng) -> RunRecord {
    let n = r.random_range(1..=3);
    let len = r.random_range(1..=(GRID_MAX * (n + 1) + 20));
    let f_star: f64 = [-5.0, 0.0, 3.0][r.random_range(0..3)];
    let lucky = r.random_bool(0.1);
    let f0 = if lucky {
        f_star
    } else {
        f_star + r.random_range(0.5..10.0)
    };
    let mut energies = vec![f0];
    let mut probs = vec![if lucky { 1.0 } else { r.random_range(0.0..0.3) }];
    for _ in 1..len {
        energies.push(f_star + r.random_range(0.0..12.0f64).powi(3) / 144.0);
        probs.push(r.random_range(0.0..1.0f64).powi(4));
    }
    RunRecord {
        class: ProblemClass::MaxCut,
        qubits: n,
        seed: 0,
        form: VariationalForm::new(n, 1, Entangler::None).unwrap(),
        optimizer: Algorithm::Spsa,
        budget: len,
        f_initial: f0,
        f_star,
        optimal_set: vec![0],
        termination: Termination::BudgetExhausted,
        energies,
        prob_optimal: probs,
        thetas: None,
    }
}

/// Grid point at which a run first satisfies a criterion, given the 1-based
/// evaluation at which it first holds.
fn hit_time(first_eval: Option<usize>, n: usize) -> Option<usize> {
    first_eval.map(|k| if k == 1 { 0 } else { k.div_ceil(n + 1) })
}

fn cdf(times: &[Option<usize>]) -> Vec<f64> {
    (0..=GRID_MAX)
        .map(|t| {
            times.iter().filter(|h| h.is_some_and(|h| h <= t)).count() as f64 / times.len() as f64
        })
        .collect()
}

fn c9_profile_oracle() -> Outcome {
    let mut r = seeded(9);
    let records: Vec<RunRecord> = (0..50).map(|_| synthetic_record(&mut r)).collect();
    for tau in [0.1, 0.01, 0.001] {
        let times: Vec<Option<usize>> = records
            .iter()
            .map(|rec| {
                if rec.f_initial - rec.f_star <= 1e-9 {
                    return Some(0);
                }
                let target = rec.f_initial - (1.0 - tau) * (rec.f_initial - rec.f_star);
                hit_time(
                    rec.energies
                        .iter()
                        .position(|&e| e <= target)
                        .map(|i| i + 1),
                    rec.qubits,
                )
            })
            .collect();
        let got = convergence_profile(&records, tau).unwrap().fraction;
        ensure(got == cdf(&times), format!("convergence tau={tau} differs"))?;
    }
    for rho in [0.0, 0.3, 0.9] {
        let times: Vec<Option<usize>> = records
            .iter()
            .map(|rec| {
                hit_time(
                    rec.prob_optimal
                        .iter()
                        .position(|&p| p >= rho)
                        .map(|i| i + 1),
                    rec.qubits,
                )
            })
            .collect();
        let got = sampling_profile(&records, rho).unwrap().fraction;
        ensure(got == cdf(&times), format!("sampling rho={rho} differs"))?;
    }
    let ratio = approx_ratio_profile(&records).unwrap();
    for t in 0..=GRID_MAX {
        let mut product = 1.0;
        let mut count = 0;
        for rec in &records {
            let w = (t * (rec.qubits + 1)).clamp(1, rec.energies.len());
            let fb = rec.energies[..w]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let value = if rec.f_star < 0.0 && fb < 0.0 {
                Some(rec.f_star / fb)
            } else if rec.f_star > 0.0 && fb > 0.0 {
                Some(fb / rec.f_star)
            } else {
                None
            };
            if let Some(v) = value {
                product *= v;
                count += 1;
            }
        }
        ensure(
            ratio.excluded[t] == records.len() - count,
            format!("ratio exclusions differ at t={t}"),
        )?;
        let expect = (count > 0).then(|| product.powf(1.0 / count as f64));
        let ok = match (ratio.ratio[t], expect) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * b,
            (None, None) => true,
            _ => false,
        };
        ensure(
            ok,
            format!("ratio at t={t}: {:?} vs {expect:?}", ratio.ratio[t]),
        )?;
    }
    Ok("50 traces: convergence and sampling equal the hit-time CDF, ratios match".into())
}

fn sweep_config(
    dir: &Path,
    classes: Vec<ProblemClass>,
    qubits: Vec<usize>,
    forms: Vec<FormSpec>,
) -> ExperimentConfig {
    ExperimentConfig {
        classes,
        qubits,
        forms,
        optimizers: Algorithm::ALL
            .iter()
            .map(|&a| OptimizerConfig::new(a))
            .collect(),
        seeds: Seeds::Count(20),
        budget_factor: 100,
        output_dir: dir.to_path_buf(),
        keep_thetas: false,
        threads: None,
    }
}

const CZ: FormSpec = FormSpec {
    layers: 2,
    entangler: Entangler::FullCz,
};

fn final_fraction(records: &[RunRecord], tau: f64) -> f64 {
    *convergence_profile(records, tau)
        .unwrap()
        .fraction
        .last()
        .unwrap()
}

fn c10_trends(dir: &Path) -> Outcome {
    let cfg = sweep_config(
        dir,
        vec![ProblemClass::Max3Sat, ProblemClass::MarketSplit],
        (6..=10).collect(),
        vec![CZ],
    );
    let summary = run_experiment(&cfg).map_err(|e| format!("{e:#}"))?;
    ensure(
        summary.failed.is_empty(),
        format!("failed cells: {:?}", summary.failed),
    )?;
    let records = load_records(dir).map_err(|e| format!("{e:#}"))?;
    let of = |class: ProblemClass, alg: Algorithm| -> Vec<RunRecord> {
        records
            .iter()
            .filter(|r| r.class == class && r.optimizer == alg)
            .cloned()
            .collect()
    };
    let mut lines = Vec::new();
    let mut problems = Vec::new();
    for alg in Algorithm::ALL {
        let sat = final_fraction(&of(ProblemClass::Max3Sat, alg), 0.1);
        let ms = final_fraction(&of(ProblemClass::MarketSplit, alg), 0.1);
        lines.push(format!("{alg} {sat:.2}>{ms:.2}"));
        if sat <= ms {
            problems.push(format!(
                "(a) {alg}: max3sat {sat:.3} <= marketsplit {ms:.3}"
            ));
        }
    }
    let pooled = |alg: Algorithm| -> Vec<RunRecord> {
        records
            .iter()
            .filter(|r| r.optimizer == alg)
            .cloned()
            .collect()
    };
    let rbf = final_fraction(&pooled(Algorithm::RbfGlobal), 0.01);
    let mut b_line = vec![format!("rbf {rbf:.3}")];
    for alg in Algorithm::ALL.into_iter().filter(|a| !a.is_global()) {
        let f = final_fraction(&pooled(alg), 0.01);
        b_line.push(format!("{alg} {f:.3}"));
        if rbf < f {
            problems.push(format!("(b) rbf_global {rbf:.3} < {alg} {f:.3}"));
        }
    }
    let detail = format!(
        "{} records; (a) tau=0.1 {}; (b) tau=0.01 {}",
        records.len(),
        lines.join(", "),
        b_line.join(", ")
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", problems.join("; ")))
    }
}

fn c11_entangler_comparison(dir: &Path) -> Outcome {
    let t_form = FormSpec {
        layers: 2,
        entangler: Entangler::TGate,
    };
    // 2L-CZ cells at q=6 already exist from the trend sweep and are reused
    let cfg = sweep_config(
        dir,
        vec![ProblemClass::Max3Sat, ProblemClass::MarketSplit],
        vec![6],
        vec![CZ, t_form],
    );
    let summary = run_experiment(&cfg).map_err(|e| format!("{e:#}"))?;
    ensure(
        summary.failed.is_empty(),
        format!("failed cells: {:?}", summary.failed),
    )?;
    let records: Vec<RunRecord> = load_records(dir)
        .map_err(|e| format!("{e:#}"))?
        .into_iter()
        .filter(|r| r.qubits == 6)
        .collect();
    let mut notes = Vec::new();
    for metric in [
        Metric::Convergence { tau: 0.1 },
        Metric::Sampling { rho: 0.5 },
        Metric::Ratio,
    ] {
        let subset: Vec<RunRecord> = match metric {
            // market split optima are zero, where the ratio is undefined
            Metric::Ratio => records
                .iter()
                .filter(|r| r.f_star != 0.0)
                .cloned()
                .collect(),
            _ => records.clone(),
        };
        let cs: Vec<Curve> = curves(&subset, metric).map_err(|e| format!("{e:#}"))?;
        let out = dir
            .parent()
            .unwrap_or(dir)
            .join(format!("entangler-{}.csv", notes.len()));
        write_report(&out, &cs, metric, None).map_err(|e| format!("{e:#}"))?;
        let diffs = form_difference(&cs, "2L-CZ", "2L-T");
        ensure(
            diffs.len() == Algorithm::ALL.len(),
            format!("{metric:?}: only {} optimizers comparable", diffs.len()),
        )?;
        let mut worst: f64 = 0.0;
        for (alg, d) in &diffs {
            ensure(
                d.len() == GRID_MAX + 1 && d.iter().all(|v| v.is_some_and(f64::is_finite)),
                format!("{metric:?}: {alg} has an undefined difference"),
            )?;
            worst = worst.max(d.iter().map(|v| v.unwrap().abs()).fold(0.0, f64::max));
        }
        notes.push(format!("{metric:?} max |CZ-T| {worst:.3}"));
    }
    Ok(notes.join(", "))
}

fn main() {
    let work = tempfile::tempdir().expect("temporary directory");
    let records = work.path().join("records");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("term counts", Box::new(c1_term_counts)),
        (
            "distinct eigenvalue saturation",
            Box::new(c2_continuous_saturation),
        ),
        ("discrete weight counts", Box::new(c3_discrete_counts)),
        ("density and eigenvalue sign", Box::new(c4_density)),
        (
            "encoding oracle equivalence",
            Box::new(c5_oracle_equivalence),
        ),
        ("basis state identity", Box::new(c6_basis_states)),
        ("sinusoidal slices", Box::new(c7_sinusoidal_slices)),
        ("optimizer sanity", Box::new(c8_optimizers)),
        ("profile machinery oracle", Box::new(c9_profile_oracle)),
        (
            "qualitative trends",
            Box::new({
                let d = records.clone();
                move || c10_trends(&d)
            }),
        ),
        (
            "entangler comparison",
            Box::new({
                let d = records.clone();
                move || c11_entangler_comparison(&d)
            }),
        ),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
