use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, Halt};
use crate::rng::BenchRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaParams {
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant as a fraction of the iteration count.
    pub stability_fraction: f64,
    /// Desired size of the first update step, used to calibrate `a`.
    pub target_step: f64,
    /// Evaluations spent on the calibration probe (rounded down to pairs).
    pub calibration_evals: usize,
}

impl Default for SpsaParams {
    fn default() -> Self {
        Self {
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability_fraction: 0.1,
            target_step: core::f64::consts::PI / 10.0,
            calibration_evals: 10,
        }
    }
}

fn bernoulli(r: &mut BenchRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if r.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect()
}

fn shifted(x: &[f64], delta: &[f64], ck: f64) -> Vec<f64> {
    x.iter().zip(delta).map(|(a, d)| a + ck * d).collect()
}

pub(super) fn run(
    ev: &mut Evaluator<'_>,
    x0: &[f64],
    p: &SpsaParams,
    r: &mut BenchRng,
) -> Result<(), Halt> {
    let n = x0.len();
    let mut x = x0.to_vec();
    ev.eval(&x)?;
    // one evaluation stays reserved for the final iterate
    let pairs_total = ev.remaining().saturating_sub(1) / 2;
    let probe_pairs = (p.calibration_evals / 2).min(pairs_total / 2);
    let iterations = pairs_total - probe_pairs;
    let big_a = p.stability_fraction * iterations as f64;

    let mut magnitude = 0.0;
    for _ in 0..probe_pairs {
        let delta = bernoulli(r, n);
        let fp = ev.eval(&shifted(&x, &delta, p.c))?;
        let fm = ev.eval(&shifted(&x, &delta, -p.c))?;
        magnitude += ((fp - fm) / (2.0 * p.c)).abs();
    }
    let magnitude = if probe_pairs > 0 {
        magnitude / probe_pairs as f64
    } else {
        0.0
    };
    let a = if magnitude > 0.0 {
        p.target_step / magnitude * libm::pow(big_a + 1.0, p.alpha)
    } else {
        p.target_step * libm::pow(big_a + 1.0, p.alpha)
    };

    for k in 0..iterations {
        let ak = a / libm::pow(k as f64 + 1.0 + big_a, p.alpha);
        let ck = p.c / libm::pow(k as f64 + 1.0, p.gamma);
        let delta = bernoulli(r, n);
        let fp = ev.eval(&shifted(&x, &delta, ck))?;
        let fm = ev.eval(&shifted(&x, &delta, -ck))?;
        let scale = (fp - fm) / (2.0 * ck);
        for (xi, d) in x.iter_mut().zip(&delta) {
            *xi -= ak * scale * d;
        }
        ev.project(&mut x);
    }
    ev.eval(&x)?;
    Err(Halt::Budget)
}
