//! Small dense linear algebra kernels: symmetric tridiagonal eigenvalues,
//! complex LU with partial pivoting and one-sided Jacobi SVD.
//!
//! Every matrix handled here is at most a few hundred rows, so the kernels
//! favour clarity and accuracy over blocking.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{FgigError, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`), in ascending
/// order. Implicit QL with Wilkinson-type shifts.
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1), "off-diagonal must have n - 1 entries");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(FgigError::NoConvergence("tridiagonal QL iteration"));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// LU factorization `P A = L U` of a dense complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    factors: Array2<Complex64>,
    pivots: Vec<usize>,
}

/// Pivot failure reported by [`ComplexLu::factor`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotBreakdown {
    pub pivot: f64,
    pub threshold: f64,
}

/// Infinity norm (max absolute row sum) of a complex matrix.
pub fn norm_inf(a: &Array2<Complex64>) -> f64 {
    a.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl ComplexLu {
    /// Factor `a` with partial pivoting. Any pivot whose modulus falls below
    /// `rel_tol * ||a||_inf` aborts the factorization.
    pub fn factor(a: &Array2<Complex64>, rel_tol: f64) -> std::result::Result<Self, PivotBreakdown> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU requires a square matrix");
        let threshold = rel_tol * norm_inf(a);
        let mut lu = a.clone();
        let mut pivots = Vec::with_capacity(n);

        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[[i, k]].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= threshold || pivot_abs == 0.0 {
                return Err(PivotBreakdown {
                    pivot: pivot_abs,
                    threshold,
                });
            }
            pivots.push(p);
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
            }
            let inv = lu[[k, k]].inv();
            for i in k + 1..n {
                let factor = lu[[i, k]] * inv;
                lu[[i, k]] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let update = factor * lu[[k, j]];
                    lu[[i, j]] -= update;
                }
            }
        }
        Ok(Self {
            factors: lu,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.factors[[i, j]] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.factors[[i, j]] * x[j];
            }
            x[i] = acc / self.factors[[i, i]];
        }
        x
    }
}

/// Full singular value decomposition `A = U diag(sigma) V^H`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<Complex64>,
    pub sigma: Array1<f64>,
    pub v: Array2<Complex64>,
}

impl Svd {
    pub fn reconstruct(&self) -> Array2<Complex64> {
        let n = self.sigma.len();
        let mut out = Array2::zeros((self.u.nrows(), self.v.nrows()));
        for i in 0..self.u.nrows() {
            for j in 0..self.v.nrows() {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.u[[i, k]] * self.sigma[k] * self.v[[j, k]].conj();
                }
                out[[i, j]] = acc;
            }
        }
        out
    }
}

/// One-sided (Hestenes) Jacobi SVD of a square complex matrix. Singular
/// values are returned in descending order with matching columns of `u`, `v`.
pub fn jacobi_svd(a: &Array2<Complex64>) -> Result<Svd> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(FgigError::NotSquare { rows, cols });
    }
    let n = cols;
    let mut w = a.clone();
    let mut v = Array2::<Complex64>::eye(n);
    let tol = f64::EPSILON * n.max(1) as f64;

    let mut converged = n <= 1;
    for _sweep in 0..80 {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let (wp, wq) = (w[[i, p]], w[[i, q]]);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of gamma so the 2x2 Gram block is real.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                let phase_conj = phase.conj();
                for i in 0..n {
                    let wp = w[[i, p]];
                    let wq = w[[i, q]] * phase_conj;
                    w[[i, p]] = wp * c - wq * s;
                    w[[i, q]] = wp * s + wq * c;
                    let vp = v[[i, p]];
                    let vq = v[[i, q]] * phase_conj;
                    v[[i, p]] = vp * c - vq * s;
                    v[[i, q]] = vp * s + vq * c;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(FgigError::NoConvergence("one-sided Jacobi SVD"));
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| w.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = Array2::zeros((n, n));
    let mut vs = Array2::zeros((n, n));
    let mut sigma = Array1::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = norms[src];
        for i in 0..n {
            vs[[i, dst]] = v[[i, src]];
            if norms[src] > 0.0 {
                u[[i, dst]] = w[[i, src]] / norms[src];
            }
        }
    }
    Ok(Svd { u, sigma, v: vs })
}
