//! Gegenbauer-Gauss nodes, Christoffel numbers and barycentric machinery.
//!
//! The nodes are the zeros of the degree `M + 1` Gegenbauer polynomial with
//! index `lambda`, i.e. the Gauss rule for the weight `(1 - x^2)^(lambda - 1/2)`
//! on `(-1, 1)`. They are obtained from the eigenvalues of the symmetric
//! Jacobi matrix (Golub-Welsch), polished by Newton steps, and paired with
//! Christoffel numbers evaluated through the Christoffel function
//! `1 / sum_k p_k(z)^2` of the orthonormal polynomials.
//!
//! The first-order integration matrix `Q` maps nodal samples of `f` to
//! approximations of `int_{-1}^{z_l} f`. Its rows are built by integrating the
//! barycentric Lagrange basis with a Gauss-Legendre rule that is exact for
//! polynomials of degree `M`.

use ndarray::Array2;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{FgigError, Result};
use crate::linalg::symmetric_tridiagonal_eigenvalues;

/// Safety margin kept above the admissible limit `lambda = -1/2`.
pub const LAMBDA_GUARD: f64 = 1e-6;

/// Two abscissae closer than this are treated as the same node.
pub const NODE_COINCIDENCE_TOL: f64 = 1e-14;

/// Gegenbauer-Gauss quadrature data on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerBasis {
    lambda: f64,
    order: usize,
    nodes: Vec<f64>,
    christoffel: Vec<f64>,
    bary_weights: Vec<f64>,
}

/// `int_{-1}^{1} (1 - x^2)^(lambda - 1/2) dx = sqrt(pi) Gamma(lambda + 1/2) / Gamma(lambda + 1)`.
pub fn weight_mass(lambda: f64) -> f64 {
    (0.5 * std::f64::consts::PI.ln() + ln_gamma(lambda + 0.5) - ln_gamma(lambda + 1.0)).exp()
}

/// Squared off-diagonal of the monic Gegenbauer recurrence,
/// `p_{k+1} = x p_k - beta_k p_{k-1}`, for `k >= 1`.
fn recurrence_beta(lambda: f64, k: usize) -> f64 {
    let k = k as f64;
    if k == 1.0 {
        // k (k + 2 lambda - 1) / (4 (k + lambda)(k + lambda - 1)) after cancelling 2 lambda.
        1.0 / (2.0 * (1.0 + lambda))
    } else {
        k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0))
    }
}

/// Gegenbauer polynomial of degree `degree` normalized to equal 1 at `x = 1`,
/// together with its derivative. For `lambda = 0` this is the Chebyshev
/// polynomial `T_n`, for `lambda = 1/2` the Legendre polynomial `P_n`.
pub fn normalized_gegenbauer(lambda: f64, degree: usize, x: f64) -> (f64, f64) {
    if degree == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut dp_prev) = (1.0, 0.0);
    let (mut p, mut dp) = (x, 1.0);
    for n in 1..degree {
        let nf = n as f64;
        let a = (2.0 * nf + 2.0 * lambda) / (nf + 2.0 * lambda);
        let b = nf / (nf + 2.0 * lambda);
        let p_next = a * x * p - b * p_prev;
        let dp_next = a * (p + x * dp) - b * dp_prev;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
    }
    (p, dp)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > -0.5 + LAMBDA_GUARD) || !lambda.is_finite() {
        return Err(FgigError::InvalidLambda {
            lambda,
            guard: LAMBDA_GUARD,
        });
    }
    Ok(())
}

/// Christoffel function `1 / sum_{k=0}^{order} p_k(x)^2` for the orthonormal
/// Gegenbauer family.
fn christoffel_number(lambda: f64, order: usize, mass: f64, x: f64) -> f64 {
    let mut p_prev = 0.0;
    let mut p = 1.0 / mass.sqrt();
    let mut sum = p * p;
    let mut sqrt_beta_prev = 0.0;
    for k in 0..order {
        let sqrt_beta = recurrence_beta(lambda, k + 1).sqrt();
        let next = (x * p - sqrt_beta_prev * p_prev) / sqrt_beta;
        p_prev = p;
        p = next;
        sqrt_beta_prev = sqrt_beta;
        sum += p * p;
    }
    1.0 / sum
}

/// Evaluate all Lagrange basis polynomials on the nodes at `t`, given the
/// barycentric weights. Writes into `out`.
fn lagrange_basis_into(nodes: &[f64], weights: &[f64], t: f64, out: &mut [f64]) {
    if let Some(hit) = nodes.iter().position(|&z| (t - z).abs() <= NODE_COINCIDENCE_TOL) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[hit] = 1.0;
        return;
    }
    let mut denom = 0.0;
    for ((o, &z), &w) in out.iter_mut().zip(nodes).zip(weights) {
        *o = w / (t - z);
        denom += *o;
    }
    out.iter_mut().for_each(|v| *v /= denom);
}

impl GegenbauerBasis {
    /// Build the `M + 1` point Gegenbauer-Gauss rule for index `lambda`.
    pub fn new(lambda: f64, order: usize) -> Result<Self> {
        check_lambda(lambda)?;
        if order < 1 {
            return Err(FgigError::InvalidOrder(order));
        }
        let npts = order + 1;
        let off: Vec<f64> = (1..npts).map(|k| recurrence_beta(lambda, k).sqrt()).collect();
        let mut nodes = symmetric_tridiagonal_eigenvalues(&vec![0.0; npts], &off)?;

        for z in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = normalized_gegenbauer(lambda, npts, *z);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                if !(step.abs() < 1e-8) {
                    break;
                }
                *z -= step;
                if step.abs() <= f64::EPSILON * z.abs().max(1e-300) {
                    break;
                }
            }
        }

        // Enforce exact mirror symmetry about the origin.
        for l in 0..npts / 2 {
            let r = npts - 1 - l;
            let half = 0.5 * (nodes[r] - nodes[l]);
            nodes[l] = -half;
            nodes[r] = half;
        }
        if npts % 2 == 1 {
            nodes[npts / 2] = 0.0;
        }

        let mass = weight_mass(lambda);
        let mut christoffel: Vec<f64> = nodes
            .iter()
            .map(|&z| christoffel_number(lambda, order, mass, z))
            .collect();
        for l in 0..npts / 2 {
            let r = npts - 1 - l;
            let avg = 0.5 * (christoffel[l] + christoffel[r]);
            christoffel[l] = avg;
            christoffel[r] = avg;
        }

        let bary_weights = nodes
            .iter()
            .zip(&christoffel)
            .enumerate()
            .map(|(l, (&z, &w))| {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                sign * ((1.0 - z) * (1.0 + z)).sqrt() * w.sqrt()
            })
            .collect();

        Ok(Self {
            lambda,
            order,
            nodes,
            christoffel,
            bary_weights,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Highest node index `M`; the basis holds `M + 1` nodes.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn christoffel(&self) -> &[f64] {
        &self.christoffel
    }

    pub fn bary_weights(&self) -> &[f64] {
        &self.bary_weights
    }

    /// Values of every Lagrange basis polynomial at `t`.
    pub fn lagrange_basis(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        lagrange_basis_into(&self.nodes, &self.bary_weights, t, &mut out);
        out
    }

    /// Barycentric interpolation of complex nodal data at `t`.
    ///
    /// A `t` within [`NODE_COINCIDENCE_TOL`] of a node returns that nodal value
    /// unchanged.
    pub fn interpolate(&self, values: &[Complex64], t: f64) -> Complex64 {
        assert_eq!(values.len(), self.len(), "expected one value per node");
        if let Some(hit) = self
            .nodes
            .iter()
            .position(|&z| (t - z).abs() <= NODE_COINCIDENCE_TOL)
        {
            return values[hit];
        }
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((&z, &w), &f) in self.nodes.iter().zip(&self.bary_weights).zip(values) {
            let c = w / (t - z);
            num += f * c;
            den += c;
        }
        num / den
    }

    /// Real-valued convenience wrapper over [`GegenbauerBasis::interpolate`].
    pub fn interpolate_real(&self, values: &[f64], t: f64) -> f64 {
        let lifted: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.interpolate(&lifted, t).re
    }

    /// Time grid `T (z_l + 1) / 2` on `(0, T)`.
    pub fn time_grid(&self, horizon: f64) -> Result<TimeGrid> {
        TimeGrid::new(self, horizon)
    }
}

/// Barycentric interpolation of `values` on `basis` at `t in [-1, 1]`.
pub fn bary_interpolate(basis: &GegenbauerBasis, values: &[Complex64], t: f64) -> Complex64 {
    basis.interpolate(values, t)
}

/// Dense first-order integration matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationMatrix {
    entries: Array2<f64>,
    /// Length of the integration interval divided by two (1 on `[-1, 1]`).
    scale: f64,
}

impl IntegrationMatrix {
    /// Highest node index `M`.
    pub fn order(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// `T / 2` for a shifted matrix, 1 for the reference one.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.entries.ncols());
        self.entries
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(samples).map(|(q, f)| q * f).sum())
            .collect()
    }

    pub fn to_complex(&self) -> Array2<Complex64> {
        self.entries.mapv(|q| Complex64::new(q, 0.0))
    }
}

/// `Q[l][j] = int_{-1}^{z_l} L_j(t) dt` for the Lagrange basis on the nodes.
pub fn build_integration_matrix(basis: &GegenbauerBasis) -> IntegrationMatrix {
    let npts = basis.len();
    let gl_points = npts.div_ceil(2) + 1;
    let legendre = GegenbauerBasis::new(0.5, gl_points - 1).expect("Legendre rule is always valid");

    let mut entries = Array2::zeros((npts, npts));
    let mut basis_values = vec![0.0; npts];
    for (l, &z) in basis.nodes().iter().enumerate() {
        let half = 0.5 * (z + 1.0);
        let mid = 0.5 * (z - 1.0);
        for (&s, &w) in legendre.nodes().iter().zip(legendre.christoffel()) {
            let tau = half * s + mid;
            lagrange_basis_into(basis.nodes(), basis.bary_weights(), tau, &mut basis_values);
            for (j, &b) in basis_values.iter().enumerate() {
                entries[[l, j]] += half * w * b;
            }
        }
    }
    IntegrationMatrix {
        entries,
        scale: 1.0,
    }
}

/// Scale a reference integration matrix to the interval `[0, T]`.
pub fn shift_integration_matrix(q: &IntegrationMatrix, horizon: f64) -> Result<IntegrationMatrix> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(FgigError::InvalidHorizon(horizon));
    }
    let factor = 0.5 * horizon;
    Ok(IntegrationMatrix {
        entries: q.entries.mapv(|v| v * factor),
        scale: q.scale * factor,
    })
}

/// Shifted Gegenbauer-Gauss nodes on `(0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(basis: &GegenbauerBasis, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(FgigError::InvalidHorizon(horizon));
        }
        let nodes = basis
            .nodes()
            .iter()
            .map(|&z| 0.5 * horizon * (z + 1.0))
            .collect();
        Ok(Self { horizon, nodes })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Map a physical time in `[0, T]` onto `[-1, 1]`.
    pub fn to_reference(&self, t: f64) -> f64 {
        2.0 * t / self.horizon - 1.0
    }

    /// Nodes followed by the horizon itself.
    pub fn augmented(&self) -> Vec<f64> {
        let mut out = self.nodes.clone();
        out.push(self.horizon);
        out
    }
}
