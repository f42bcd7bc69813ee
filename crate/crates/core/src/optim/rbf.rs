//! Surrogate-based global search with a cubic radial basis function.
//!
//! Each iteration fits `s(x) = sum_i l_i |x - x_i|^3 + c_0 + c^T x` to a
//! working set of evaluated points, scores a batch of random candidates by a
//! weighted mix of surrogate value and distance to known points, and
//! evaluates the best-scored one. The weight cycles so that the search
//! alternates between exploring and refining.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BoxBounds, Evaluator, Halt};
use crate::linalg::solve_refined;
use crate::rng::BenchRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbfParams {
    pub candidates_per_dim: usize,
    pub max_candidates: usize,
    /// Largest number of points the surrogate is fitted to; the nearest
    /// points to the incumbent are kept.
    pub working_set: usize,
    /// Surrogate weights cycled through, from exploration to refinement.
    pub weights: Vec<f64>,
    /// Fraction of candidates drawn uniformly from the box on the
    /// lowest-weight step of the cycle.
    pub uniform_fraction: f64,
    /// Initial perturbation scale relative to the box width.
    pub sigma_init: f64,
    pub sigma_min: f64,
}

impl Default for RbfParams {
    fn default() -> Self {
        Self {
            candidates_per_dim: 100,
            max_candidates: 500,
            working_set: 80,
            weights: alloc::vec![0.3, 0.5, 0.8, 0.95],
            uniform_fraction: 0.25,
            sigma_init: 0.2,
            sigma_min: 1e-3,
        }
    }
}

/// Cubic RBF interpolant with a linear tail.
#[derive(Debug, Clone)]
pub struct RbfModel {
    centers: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    tail: Vec<f64>,
}

impl RbfModel {
    /// Fits the interpolant through `(points[i], values[i])`. Returns `None`
    /// when the system is singular, e.g. too few affinely independent points.
    pub fn fit(points: &[&[f64]], values: &[f64]) -> Option<Self> {
        let m = points.len();
        let n = points.first()?.len();
        let size = m + n + 1;
        let mut a = alloc::vec![0.0; size * size];
        for i in 0..m {
            for j in 0..i {
                let r = dist(points[i], points[j]);
                a[i * size + j] = r * r * r;
                a[j * size + i] = r * r * r;
            }
            a[i * size + m] = 1.0;
            a[m * size + i] = 1.0;
            for k in 0..n {
                a[i * size + m + 1 + k] = points[i][k];
                a[(m + 1 + k) * size + i] = points[i][k];
            }
        }
        let mut rhs = alloc::vec![0.0; size];
        rhs[..m].copy_from_slice(values);
        let sol = solve_refined(&a, size, &rhs, 1)?;
        Some(Self {
            centers: points.iter().map(|p| p.to_vec()).collect(),
            lambda: sol[..m].to_vec(),
            tail: sol[m..].to_vec(),
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.tail[0];
        for (k, xk) in x.iter().enumerate() {
            v += self.tail[k + 1] * xk;
        }
        for (c, l) in self.centers.iter().zip(&self.lambda) {
            let r = dist(c, x);
            v += l * r * r * r;
        }
        v
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn uniform_point(r: &mut BenchRng, b: &BoxBounds) -> Vec<f64> {
    b.lower
        .iter()
        .zip(&b.upper)
        .map(|(lo, hi)| {
            if hi > lo {
                r.random_range(*lo..*hi)
            } else {
                *lo
            }
        })
        .collect()
}

/// Replaces each value by its rank scaled to `[0, 1]`.
fn rank_scale(v: &mut [f64]) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let d = (v.len().max(2) - 1) as f64;
    for (rank, i) in idx.into_iter().enumerate() {
        v[i] = rank as f64 / d;
    }
}

/// Normalizes to `[0, 1]`; a constant slice maps to zeros.
fn unit_scale(v: &mut [f64]) {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(*x), b.max(*x))
        });
    let span = hi - lo;
    for x in v.iter_mut() {
        *x = if span > 0.0 { (*x - lo) / span } else { 0.0 };
    }
}

pub(super) fn run(
    ev: &mut Evaluator<'_>,
    x0: &[f64],
    p: &RbfParams,
    bounds: &BoxBounds,
    r: &mut BenchRng,
) -> Result<(), Halt> {
    let n = x0.len();
    let width: Vec<f64> = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(lo, hi)| hi - lo)
        .collect();
    let mean_width = width.iter().sum::<f64>() / n as f64;
    let min_sep = 1e-8 * mean_width.max(1e-300);

    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut fs: Vec<f64> = Vec::new();
    fs.push(ev.eval(x0)?);
    xs.push(x0.to_vec());
    // initial design: Latin hypercube of 2n + 1 points around the start
    let m0 = 2 * n + 1;
    let strata: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..m0).collect();
            for i in (1..m0).rev() {
                s.swap(i, r.random_range(0..=i));
            }
            s
        })
        .collect();
    for i in 0..m0 {
        let x: Vec<f64> = (0..n)
            .map(|k| {
                bounds.lower[k] + width[k] * (strata[k][i] as f64 + r.random::<f64>()) / m0 as f64
            })
            .collect();
        fs.push(ev.eval(&x)?);
        xs.push(x);
    }

    let n_cand = (p.candidates_per_dim * n).clamp(1, p.max_candidates.max(1));
    let n_uniform = libm::round(n_cand as f64 * p.uniform_fraction) as usize;
    let scales = [1.0, 0.2, 0.04];
    let mut sigma = p.sigma_init;
    let (mut fails, mut successes) = (0usize, 0usize);
    let fail_limit = n.max(5);
    let weights = if p.weights.is_empty() {
        alloc::vec![0.5]
    } else {
        p.weights.clone()
    };
    let w_min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let mut iter = 0usize;
    loop {
        let (xb, fb) = match ev.best() {
            Some((x, f)) => (x.to_vec(), f),
            None => return Err(Halt::NonFinite),
        };
        // working set: nearest points to the incumbent
        let mut order: Vec<usize> = (0..xs.len()).collect();
        if order.len() > p.working_set.max(n + 2) {
            let k = p.working_set.max(n + 2);
            order.select_nth_unstable_by(k, |&a, &b| {
                dist(&xs[a], &xb).total_cmp(&dist(&xs[b], &xb))
            });
            order.truncate(k);
            order.sort_unstable();
        }
        let pts: Vec<&[f64]> = order.iter().map(|&i| xs[i].as_slice()).collect();
        let vals: Vec<f64> = order.iter().map(|&i| fs[i]).collect();
        let model = RbfModel::fit(&pts, &vals);

        let w = weights[iter % weights.len()];
        // box samples only join the most exploratory step of the cycle
        let explore = w <= w_min;
        let mut cands: Vec<Vec<f64>> = Vec::with_capacity(n_cand);
        for c in 0..n_cand {
            if c < n_uniform && explore {
                cands.push(uniform_point(r, bounds));
            } else {
                let s = sigma * scales[c % scales.len()];
                let mut x: Vec<f64> = xb
                    .iter()
                    .zip(&width)
                    .map(|(v, w)| {
                        let z: f64 = r.sample(StandardNormal);
                        v + s * w * z
                    })
                    .collect();
                bounds.project(&mut x);
                cands.push(x);
            }
        }
        let mut dmin: Vec<f64> = cands
            .iter()
            .map(|c| pts.iter().map(|q| dist(c, q)).fold(f64::INFINITY, f64::min))
            .collect();
        let keep: Vec<bool> = dmin.iter().map(|d| *d > min_sep).collect();
        let choice = match &model {
            Some(model) => {
                let mut sv: Vec<f64> = cands.iter().map(|c| model.eval(c)).collect();
                rank_scale(&mut sv);
                unit_scale(&mut dmin);
                (0..cands.len()).filter(|&i| keep[i]).min_by(|&a, &b| {
                    let sa = w * sv[a] + (1.0 - w) * (1.0 - dmin[a]);
                    let sb = w * sv[b] + (1.0 - w) * (1.0 - dmin[b]);
                    sa.total_cmp(&sb)
                })
            }
            None => (0..cands.len()).find(|&i| keep[i]),
        };
        let x = match choice {
            Some(i) => cands.swap_remove(i),
            None => uniform_point(r, bounds),
        };
        let f = ev.eval(&x)?;
        xs.push(x);
        fs.push(f);
        iter += 1;

        if f < fb - 1e-10 * fb.abs().max(1.0) {
            successes += 1;
            fails = 0;
            if successes >= 3 {
                sigma = (2.0 * sigma).min(p.sigma_init);
                successes = 0;
            }
        } else {
            fails += 1;
            successes = 0;
            if fails >= fail_limit {
                sigma = (0.5 * sigma).max(p.sigma_min);
                fails = 0;
            }
        }
    }
}
