use alloc::collections::VecDeque;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Evaluator, Halt};
use crate::linalg::{dot, norm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LbfgsParams {
    pub memory: usize,
    /// Relative forward-difference step: `h_j = fd_step * max(1, |x_j|)`.
    pub fd_step: f64,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    pub max_backtracks: usize,
    pub step_tol: f64,
}

impl Default for LbfgsParams {
    fn default() -> Self {
        Self {
            memory: 10,
            fd_step: 1e-6,
            c1: 1e-4,
            max_backtracks: 30,
            step_tol: 1e-8,
        }
    }
}

/// Forward-difference gradient at `x` (with `f(x) = fx` already known),
/// stepping backwards on coordinates whose forward step would leave the box.
/// Costs `n` evaluations.
pub(crate) fn fd_gradient_with(
    ev: &mut Evaluator<'_>,
    x: &[f64],
    fx: f64,
    rel: f64,
) -> Result<Vec<f64>, Halt> {
    let mut g = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let mut h = rel * x[j].abs().max(1.0);
        if let Some(b) = ev.bounds() {
            if x[j] + h > b.upper[j] {
                h = -h;
            }
        }
        xp[j] = x[j] + h;
        let f = ev.eval(&xp)?;
        g.push((f - fx) / h);
        xp[j] = x[j];
    }
    Ok(g)
}

/// Forward-difference gradient of a plain function, for checking step sizes.
pub fn fd_gradient(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], rel: f64) -> Vec<f64> {
    let fx = f(x);
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|j| {
            let h = rel * x[j].abs().max(1.0);
            xp[j] = x[j] + h;
            let d = (f(&xp) - fx) / h;
            xp[j] = x[j];
            d
        })
        .collect()
}

fn two_loop(g: &[f64], mem: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y, rho) in mem.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = mem.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in mem.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

pub(super) fn run(ev: &mut Evaluator<'_>, x0: &[f64], p: &LbfgsParams) -> Result<(), Halt> {
    let mut x = x0.to_vec();
    let mut fx = ev.eval(&x)?;
    let mut g = fd_gradient_with(ev, &x, fx, p.fd_step)?;
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(p.memory);
    loop {
        let mut d = two_loop(&g, &mem);
        if !(dot(&g, &d) < 0.0) {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
        }
        let dn = norm(&d);
        if dn == 0.0 {
            return Ok(());
        }
        let mut alpha = if mem.is_empty() {
            (1.0 / dn).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..p.max_backtracks {
            let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            ev.project(&mut xn);
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            if norm(&s) < p.step_tol {
                break;
            }
            let fn_ = ev.eval(&xn)?;
            if fn_ <= fx + p.c1 * dot(&g, &s) {
                accepted = Some((xn, s, fn_));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, s, fn_)) = accepted else {
            if mem.is_empty() {
                return Ok(());
            }
            mem.clear();
            continue;
        };
        let gn = fd_gradient_with(ev, &xn, fn_, p.fd_step)?;
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if mem.len() == p.memory {
                mem.pop_front();
            }
            mem.push_back((s.clone(), y, 1.0 / sy));
        }
        x = xn;
        fx = fn_;
        g = gn;
        if norm(&s) < p.step_tol {
            return Ok(());
        }
    }
}
