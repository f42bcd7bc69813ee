use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Evaluator, Halt};
use crate::linalg::norm;

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const ZEPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowellParams {
    /// Relative tolerance of each Brent line search.
    pub line_tol: f64,
    /// First trial step along a (unit) direction.
    pub initial_step: f64,
    /// Relative decrease over a full sweep below which the method stops.
    pub ftol: f64,
    pub step_tol: f64,
    pub max_line_iters: usize,
}

impl Default for PowellParams {
    fn default() -> Self {
        Self {
            line_tol: 1e-6,
            initial_step: 0.5,
            ftol: 1e-10,
            step_tol: 1e-8,
            max_line_iters: 100,
        }
    }
}

struct Line<'e, 'a> {
    ev: &'e mut Evaluator<'a>,
    x: Vec<f64>,
    u: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Line<'_, '_> {
    fn new<'e, 'a>(ev: &'e mut Evaluator<'a>, x: &[f64], u: &[f64]) -> Line<'e, 'a> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        if let Some(b) = ev.bounds() {
            for i in 0..x.len() {
                if u[i] != 0.0 {
                    let t1 = (b.lower[i] - x[i]) / u[i];
                    let t2 = (b.upper[i] - x[i]) / u[i];
                    lo = lo.max(t1.min(t2));
                    hi = hi.min(t1.max(t2));
                }
            }
        }
        Line {
            ev,
            x: x.to_vec(),
            u: u.to_vec(),
            lo: lo.min(0.0),
            hi: hi.max(0.0),
        }
    }

    fn point(&self, t: f64) -> Vec<f64> {
        self.x.iter().zip(&self.u).map(|(a, b)| a + t * b).collect()
    }

    fn at(&mut self, t: f64) -> Result<f64, Halt> {
        let p = self.point(t);
        self.ev.eval(&p)
    }

    fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.lo, self.hi)
    }

    /// Returns `(a, b, c, f(b))` with `b` between `a` and `c` and `f(b)` no
    /// larger than the values seen at the ends (or `b` on the box boundary).
    fn bracket(&mut self, f0: f64, step: f64) -> Result<(f64, f64, f64, f64), Halt> {
        let mut a = 0.0;
        let mut b = self.clamp(step);
        if b == 0.0 {
            b = self.clamp(-step);
            if b == 0.0 {
                return Ok((0.0, 0.0, 0.0, f0));
            }
        }
        let mut fb = self.at(b)?;
        if fb >= f0 {
            let back = self.clamp(-b);
            if back == 0.0 {
                return Ok((0.0, 0.0, b, f0));
            }
            let fback = self.at(back)?;
            if fback >= f0 {
                return Ok((back, 0.0, b, f0));
            }
            b = back;
            fb = fback;
        }
        loop {
            let c = self.clamp(b + GOLD * (b - a));
            if c == b {
                return Ok((a, b, b, fb));
            }
            let fc = self.at(c)?;
            if fc >= fb {
                return Ok((a, b, c, fb));
            }
            a = b;
            b = c;
            fb = fc;
        }
    }

    /// Brent's parabolic/golden-section minimization on `[lo, hi]` from `x`.
    fn brent(
        &mut self,
        lo: f64,
        hi: f64,
        x0: f64,
        f0: f64,
        tol: f64,
        iters: usize,
    ) -> Result<(f64, f64), Halt> {
        let (mut a, mut b) = (lo.min(hi), lo.max(hi));
        let (mut x, mut w, mut v) = (x0, x0, x0);
        let (mut fx, mut fw, mut fv) = (f0, f0, f0);
        let (mut d, mut e): (f64, f64) = (0.0, 0.0);
        for _ in 0..iters {
            let xm = 0.5 * (a + b);
            let tol1 = tol * x.abs() + ZEPS;
            let tol2 = 2.0 * tol1;
            if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
                break;
            }
            let mut golden = true;
            if e.abs() > tol1 {
                let r = (x - w) * (fx - fv);
                let mut q = (x - v) * (fx - fw);
                let mut p = (x - v) * q - (x - w) * r;
                q = 2.0 * (q - r);
                if q > 0.0 {
                    p = -p;
                }
                q = q.abs();
                let etemp = e;
                if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                    e = d;
                    d = p / q;
                    let u = x + d;
                    if u - a < tol2 || b - u < tol2 {
                        d = tol1.copysign(xm - x);
                    }
                    golden = false;
                }
            }
            if golden {
                e = if x >= xm { a - x } else { b - x };
                d = CGOLD * e;
            }
            let u = if d.abs() >= tol1 {
                x + d
            } else {
                x + tol1.copysign(d)
            };
            let fu = self.at(u)?;
            if fu <= fx {
                if u >= x {
                    a = x;
                } else {
                    b = x;
                }
                v = w;
                fv = fw;
                w = x;
                fw = fx;
                x = u;
                fx = fu;
            } else {
                if u < x {
                    a = u;
                } else {
                    b = u;
                }
                if fu <= fw || w == x {
                    v = w;
                    fv = fw;
                    w = u;
                    fw = fu;
                } else if fu <= fv || v == x || v == w {
                    v = u;
                    fv = fu;
                }
            }
        }
        Ok((x, fx))
    }
}

/// Minimizes along unit direction `u` from `x`; returns the new point and value.
fn line_minimize(
    ev: &mut Evaluator<'_>,
    x: &[f64],
    fx: f64,
    u: &[f64],
    p: &PowellParams,
) -> Result<(Vec<f64>, f64), Halt> {
    let mut line = Line::new(ev, x, u);
    let (a, b, c, fb) = line.bracket(fx, p.initial_step)?;
    if a == c {
        return Ok((x.to_vec(), fx));
    }
    let (t, ft) = line.brent(a, c, b, fb, p.line_tol, p.max_line_iters)?;
    let mut xn = line.point(t);
    line.ev.project(&mut xn);
    Ok((xn, ft))
}

pub(super) fn run(ev: &mut Evaluator<'_>, x0: &[f64], p: &PowellParams) -> Result<(), Halt> {
    let n = x0.len();
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = alloc::vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut x = x0.to_vec();
    let mut fx = ev.eval(&x)?;
    loop {
        let (x_start, f_start) = (x.clone(), fx);
        let (mut big_delta, mut ibig) = (0.0, 0);
        for (i, u) in dirs.iter().enumerate() {
            let before = fx;
            (x, fx) = line_minimize(ev, &x, fx, u, p)?;
            if before - fx > big_delta {
                big_delta = before - fx;
                ibig = i;
            }
        }
        let moved: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        let step = norm(&moved);
        if 2.0 * (f_start - fx) <= p.ftol * (f_start.abs() + fx.abs()) + 1e-20 || step < p.step_tol
        {
            return Ok(());
        }
        let mut x_ext: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| 2.0 * a - b).collect();
        ev.project(&mut x_ext);
        let f_ext = ev.eval(&x_ext)?;
        if f_ext < f_start {
            let t = 2.0
                * (f_start - 2.0 * fx + f_ext)
                * (f_start - fx - big_delta)
                * (f_start - fx - big_delta)
                - big_delta * (f_start - f_ext) * (f_start - f_ext);
            if t < 0.0 {
                let u: Vec<f64> = moved.iter().map(|v| v / step).collect();
                (x, fx) = line_minimize(ev, &x, fx, &u, p)?;
                dirs[ibig] = dirs[n - 1].clone();
                dirs[n - 1] = u;
            }
        }
    }
}
