//! Semi-analytic evaluation: every mode coefficient in closed form
//! `u_n exp(-alpha_n t)`, no linear solves.

use num_complex::Complex64;

use crate::error::{FgigError, Result};
use crate::fourier::{synthesize_derivative, synthesize_field, wavenumber, FourierGrid, InitialSpectrum, ModeCoefficients};
use crate::problem::AdProblem;
use crate::solver::mode_alpha;

#[derive(Debug, Clone)]
pub struct SaField {
    spectrum: InitialSpectrum,
    problem: AdProblem,
    modes: usize,
}

impl SaField {
    /// Sample the initial condition at `n0` points and keep modes up to `N/2`.
    pub fn new(problem: &AdProblem, modes: usize, n0: usize) -> Result<Self> {
        let spectrum = InitialSpectrum::sample(|x| problem.u0(x), problem.period, n0)?;
        Self::from_spectrum(problem, spectrum, modes)
    }

    pub fn from_spectrum(problem: &AdProblem, spectrum: InitialSpectrum, modes: usize) -> Result<Self> {
        if modes < 2 || modes % 2 != 0 {
            return Err(FgigError::InvalidGrid(format!("N must be even and >= 2, got {modes}")));
        }
        if modes + 2 > spectrum.n0() {
            return Err(FgigError::InvalidGrid(format!(
                "N = {modes} must not exceed N0 - 2 = {}",
                spectrum.n0() as i64 - 2
            )));
        }
        problem.validate()?;
        Ok(Self {
            spectrum,
            problem: problem.clone(),
            modes,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn spectrum(&self) -> &InitialSpectrum {
        &self.spectrum
    }

    pub fn problem(&self) -> &AdProblem {
        &self.problem
    }

    /// `u_n exp(-alpha_n t)` for `1 <= n <= N/2`.
    pub fn coefficient(&self, n: usize, t: f64) -> Complex64 {
        assert!(n >= 1 && n <= self.modes / 2, "mode {n} outside 1..=N/2");
        self.spectrum.get(n as i64) * (-mode_alpha(n as i64, &self.problem) * t).exp()
    }

    /// Offset-solution coefficients for every mode at time `t`.
    pub fn coefficients_at(&self, t: f64) -> ModeCoefficients {
        let positive: Vec<Complex64> = (1..=self.modes / 2).map(|n| self.coefficient(n, t)).collect();
        ModeCoefficients::from_positive_modes(&positive)
    }

    /// `2 Re(sum_k c_k(t) e^{i w_k x}) - 2 sum_k Re c_k(t) + g(t)`.
    pub fn evaluate_u(&self, x: f64, t: f64) -> f64 {
        let mut series = Complex64::new(0.0, 0.0);
        let mut offset = 0.0;
        for n in 1..=self.modes / 2 {
            let c = self.coefficient(n, t);
            let w = wavenumber(self.problem.period, n as i64);
            series += c * Complex64::from_polar(1.0, w * x);
            offset += c.re;
        }
        2.0 * series.re - 2.0 * offset + self.problem.g(t)
    }

    /// `-2 Im(sum_k w_k c_k(t) e^{i w_k x})`.
    pub fn evaluate_ux(&self, x: f64, t: f64) -> f64 {
        let series: Complex64 = (1..=self.modes / 2)
            .map(|n| {
                let w = wavenumber(self.problem.period, n as i64);
                self.coefficient(n, t) * w * Complex64::from_polar(1.0, w * x)
            })
            .sum();
        -2.0 * series.im
    }

    /// Field on the collocation grid through the shared synthesis path.
    pub fn evaluate_u_grid(&self, grid: &FourierGrid, t: f64) -> Result<Vec<f64>> {
        synthesize_field(&self.coefficients_at(t), grid, self.problem.g(t))
    }

    pub fn evaluate_ux_grid(&self, grid: &FourierGrid, t: f64) -> Result<Vec<f64>> {
        synthesize_derivative(&self.coefficients_at(t), grid)
    }
}
