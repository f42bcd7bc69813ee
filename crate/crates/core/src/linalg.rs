//! Small dense linear algebra used by the spectrum analytics and the
//! model-based optimizers. Matrices are row-major `Vec<f64>`.

use alloc::vec::Vec;

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot falls below `tiny` (numerically singular).
    pub(crate) fn factor(mut a: Vec<f64>, n: usize, tiny: f64) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for r in (k + 1)..n {
                let v = a[r * n + k].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if !(best > tiny) {
                return None;
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                perm.swap(k, piv);
            }
            let d = a[k * n + k];
            for r in (k + 1)..n {
                let f = a[r * n + k] / d;
                a[r * n + k] = f;
                if f != 0.0 {
                    for c in (k + 1)..n {
                        a[r * n + c] -= f * a[k * n + c];
                    }
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in (r + 1)..n {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s / self.lu[r * n + r];
        }
        x
    }
}

/// Solves `a x = b`, applying `refine` rounds of iterative refinement.
pub(crate) fn solve_refined(a: &[f64], n: usize, b: &[f64], refine: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let lu = Lu::factor(a.to_vec(), n, scale * 1e-14)?;
    let mut x = lu.solve(b);
    for _ in 0..refine {
        let resid: Vec<f64> = (0..n)
            .map(|r| b[r] - (0..n).map(|c| a[r * n + c] * x[c]).sum::<f64>())
            .collect();
        let dx = lu.solve(&resid);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below `tol`
/// (relative to the full norm) or after `max_sweeps`.
pub fn symmetric_eigenvalues(a: &[f64], n: usize, tol: f64, max_sweeps: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n*n");
    let mut m = a.to_vec();
    let total = libm::sqrt(m.iter().map(|v| v * v).sum::<f64>());
    let threshold = tol * total.max(f64::MIN_POSITIVE);
    for _ in 0..max_sweeps {
        let off_sq: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let off = libm::sqrt(off_sq);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}
