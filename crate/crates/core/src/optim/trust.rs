//! Unconstrained COBYLA-style method: a linear interpolant on `n + 1`
//! points, minimized over a ball of radius `rho` that halves whenever the
//! model stops producing progress on a well-poised simplex.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Evaluator, Halt};
use crate::linalg::{norm, solve_refined};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrustParams {
    pub rho_begin: f64,
    pub rho_end: f64,
    pub shrink: f64,
}

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            rho_begin: 0.5,
            rho_end: 1e-6,
            shrink: 0.5,
        }
    }
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Simplex {
    fn best(&self) -> usize {
        (0..self.values.len())
            .min_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
            .unwrap_or(0)
    }

    /// Rows `x_i - x_b` for every vertex except the best, with their indices.
    fn displacements(&self, b: usize) -> (Vec<usize>, Vec<f64>) {
        let n = self.points[0].len();
        let idx: Vec<usize> = (0..self.points.len()).filter(|&i| i != b).collect();
        let mut d = Vec::with_capacity(n * n);
        for &i in &idx {
            d.extend(
                self.points[i]
                    .iter()
                    .zip(&self.points[b])
                    .map(|(a, c)| a - c),
            );
        }
        (idx, d)
    }
}

/// Columns of `D^{-1}` for row-major `d`, as vectors.
fn inverse_columns(d: &[f64], n: usize) -> Option<Vec<Vec<f64>>> {
    (0..n)
        .map(|j| {
            let mut e = alloc::vec![0.0; n];
            e[j] = 1.0;
            solve_refined(d, n, &e, 1)
        })
        .collect()
}

fn offset_point(ev: &Evaluator<'_>, base: &[f64], dir: &[f64], rho: f64) -> Vec<f64> {
    let mut x: Vec<f64> = base.iter().zip(dir).map(|(a, b)| a + rho * b).collect();
    ev.project(&mut x);
    if norm(&sub(&x, base)) < 0.5 * rho {
        // pinned against the box; go the other way
        x = base.iter().zip(dir).map(|(a, b)| a - rho * b).collect();
        ev.project(&mut x);
    }
    x
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn build(ev: &mut Evaluator<'_>, base: Vec<f64>, fbase: f64, rho: f64) -> Result<Simplex, Halt> {
    let n = base.len();
    let mut points = alloc::vec![base.clone()];
    let mut values = alloc::vec![fbase];
    for j in 0..n {
        let mut e = alloc::vec![0.0; n];
        e[j] = 1.0;
        let x = offset_point(ev, &base, &e, rho);
        values.push(ev.eval(&x)?);
        points.push(x);
    }
    Ok(Simplex { points, values })
}

pub(super) fn run(ev: &mut Evaluator<'_>, x0: &[f64], p: &TrustParams) -> Result<(), Halt> {
    let n = x0.len();
    let mut rho = p.rho_begin;
    let f0 = ev.eval(x0)?;
    let mut s = build(ev, x0.to_vec(), f0, rho)?;
    loop {
        let b = s.best();
        let (idx, d) = s.displacements(b);
        let delta: Vec<f64> = idx.iter().map(|&i| s.values[i] - s.values[b]).collect();
        let Some(g) = solve_refined(&d, n, &delta, 1) else {
            let (xb, fb) = (s.points[b].clone(), s.values[b]);
            s = build(ev, xb, fb, rho)?;
            continue;
        };
        let gn = norm(&g);
        let xb = s.points[b].clone();
        let mut improved = false;
        if gn > 0.0 {
            let dir: Vec<f64> = g.iter().map(|v| -v / gn).collect();
            let mut xt: Vec<f64> = xb.iter().zip(&dir).map(|(a, c)| a + rho * c).collect();
            ev.project(&mut xt);
            let step = sub(&xt, &xb);
            if norm(&step) > 1e-3 * rho {
                let ft = ev.eval(&xt)?;
                // replace the vertex whose removal keeps the simplex best poised
                let lambda = solve_refined(&transpose(&d, n), n, &step, 0);
                let j = match &lambda {
                    Some(l) => (0..n)
                        .max_by(|&a, &c| {
                            let wa = l[a].abs() * norm(&d[a * n..(a + 1) * n]).max(rho);
                            let wc = l[c].abs() * norm(&d[c * n..(c + 1) * n]).max(rho);
                            wa.total_cmp(&wc)
                        })
                        .unwrap_or(0),
                    None => 0,
                };
                if ft < s.values[b] {
                    improved = true;
                    s.points[idx[j]] = xt;
                    s.values[idx[j]] = ft;
                } else if ft < s.values[idx[j]] && lambda.is_some() {
                    s.points[idx[j]] = xt;
                    s.values[idx[j]] = ft;
                }
            }
        }
        if improved {
            continue;
        }
        // far vertex: move it back onto the ball in a direction that keeps
        // the simplex nondegenerate, before giving up on this radius
        let b = s.best();
        let (idx, d) = s.displacements(b);
        let far = (0..n)
            .map(|k| (k, norm(&d[k * n..(k + 1) * n])))
            .max_by(|a, c| a.1.total_cmp(&c.1));
        if let Some((k, dist)) = far {
            if dist > 2.0 * rho {
                let xb = s.points[b].clone();
                let dir = match inverse_columns(&d, n) {
                    Some(cols) => {
                        let c = &cols[k];
                        let cn = norm(c);
                        c.iter().map(|v| v / cn).collect()
                    }
                    None => {
                        let mut e = alloc::vec![0.0; n];
                        e[k % n] = 1.0;
                        e
                    }
                };
                let x = offset_point(ev, &xb, &dir, rho);
                let f = ev.eval(&x)?;
                s.points[idx[k]] = x;
                s.values[idx[k]] = f;
                continue;
            }
        }
        rho *= p.shrink;
        if rho < p.rho_end {
            return Ok(());
        }
    }
}

fn transpose(d: &[f64], n: usize) -> Vec<f64> {
    let mut t = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = d[i * n + j];
        }
    }
    t
}
