//! Equispaced periodic grid, DFT interpolation coefficients and synthesis of
//! a field (and its spatial derivative) from Fourier mode coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FgigError, Result};

/// Imaginary synthesis residue above which coefficients are rejected, relative
/// to the magnitude of the summed terms (floored at 1).
pub const RESIDUE_TOL: f64 = 1e-8;

/// `N` equispaced nodes `x_j = L j / N` covering `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierGrid {
    period: f64,
    modes: usize,
    nodes: Vec<f64>,
}

impl FourierGrid {
    pub fn new(period: f64, modes: usize) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(FgigError::InvalidGrid(format!(
                "spatial period must be positive, got {period}"
            )));
        }
        if modes < 2 || modes % 2 != 0 {
            return Err(FgigError::InvalidGrid(format!(
                "N must be even and at least 2, got {modes}"
            )));
        }
        let nodes = (0..modes)
            .map(|j| period * j as f64 / modes as f64)
            .collect();
        Ok(Self {
            period,
            modes,
            nodes,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of nodes `N` (modes run over `-N/2..=N/2`).
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn wavenumber(&self, k: i64) -> f64 {
        wavenumber(self.period, k)
    }
}

/// `omega_k = 2 pi k / L`.
pub fn wavenumber(period: f64, k: i64) -> f64 {
    2.0 * PI * k as f64 / period
}

/// `exp(2 pi i k j / n)` with the phase reduced modulo `n` before the
/// trigonometric evaluation.
fn grid_phase(k: i64, j: usize, n: usize) -> Complex64 {
    let r = (k * j as i64).rem_euclid(n as i64);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// DFT interpolation coefficients `u_k` for `k in -N0/2 .. N0/2 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpectrum {
    n0: usize,
    coeffs: Vec<Complex64>,
}

impl InitialSpectrum {
    /// Sample `u0` at `N0` equispaced points of `[0, L)` and transform.
    pub fn sample(u0: impl Fn(f64) -> f64, period: f64, n0: usize) -> Result<Self> {
        let grid = FourierGrid::new(period, n0)?;
        let samples: Vec<f64> = grid.nodes().iter().map(|&x| u0(x)).collect();
        dft_coefficients(&samples)
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Coefficient of mode `k`, for `-N0/2 <= k < N0/2`.
    pub fn get(&self, k: i64) -> Complex64 {
        let half = (self.n0 / 2) as i64;
        assert!(
            (-half..half).contains(&k),
            "mode {k} outside stored range [-{half}, {half})"
        );
        self.coeffs[(k + half) as usize]
    }

    /// `(k, u_k)` pairs in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = (self.n0 / 2) as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - half, c))
    }
}

/// `u_k = (1/N0) sum_j u_j exp(-2 pi i k j / N0)` by direct summation.
pub fn dft_coefficients(samples: &[f64]) -> Result<InitialSpectrum> {
    let n0 = samples.len();
    if n0 < 4 || n0 % 2 != 0 {
        return Err(FgigError::InvalidGrid(format!(
            "N0 must be even and at least 4, got {n0}"
        )));
    }
    let half = (n0 / 2) as i64;
    let coeffs = (-half..half)
        .map(|k| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, &u)| grid_phase(-k, j, n0) * u)
                .sum();
            sum / n0 as f64
        })
        .collect();
    Ok(InitialSpectrum { n0, coeffs })
}

/// Complex mode coefficients for `k in -N/2..=N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    half: usize,
    values: Vec<Complex64>,
}

impl ModeCoefficients {
    pub fn zeros(modes: usize) -> Self {
        assert!(modes % 2 == 0, "N must be even");
        Self {
            half: modes / 2,
            values: vec![Complex64::new(0.0, 0.0); modes + 1],
        }
    }

    /// Build from a function of the mode index.
    pub fn from_fn(modes: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let mut out = Self::zeros(modes);
        let half = out.half as i64;
        for k in -half..=half {
            out.values[(k + half) as usize] = f(k);
        }
        out
    }

    /// Positive modes `n = 1..=N/2` given; negative modes by conjugation and
    /// the zero mode chosen so the coefficients sum to zero.
    pub fn from_positive_modes(positive: &[Complex64]) -> Self {
        let half = positive.len();
        let mut out = Self::zeros(2 * half);
        let mut zero = 0.0;
        for (i, &c) in positive.iter().enumerate() {
            let n = i + 1;
            out.values[half + n] = c;
            out.values[half - n] = c.conj();
            zero += c.re;
        }
        out.values[half] = Complex64::new(-2.0 * zero, 0.0);
        out
    }

    /// Coefficients of the offset solution at `t = 0`: the interior modes of
    /// the initial spectrum, truncated to `|k| <= N/2`, with the zero mode
    /// recovered from the zero-sum condition.
    pub fn from_spectrum(spectrum: &InitialSpectrum, modes: usize) -> Result<Self> {
        if modes + 2 > spectrum.n0() {
            return Err(FgigError::InvalidGrid(format!(
                "N = {modes} requires N0 >= N + 2, got N0 = {}",
                spectrum.n0()
            )));
        }
        let positive: Vec<Complex64> = (1..=(modes / 2) as i64).map(|n| spectrum.get(n)).collect();
        Ok(Self::from_positive_modes(&positive))
    }

    pub fn modes(&self) -> usize {
        2 * self.half
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let half = self.half as i64;
        assert!((-half..=half).contains(&k), "mode {k} out of range");
        self.values[(k + half) as usize]
    }

    pub fn set(&mut self, k: i64, value: Complex64) {
        let half = self.half as i64;
        assert!((-half..=half).contains(&k), "mode {k} out of range");
        self.values[(k + half) as usize] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = self.half as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - half, c))
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

fn real_part_checked(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > RESIDUE_TOL * scale.max(1.0) {
        return Err(FgigError::ImaginaryResidue { residue: z.im.abs() });
    }
    Ok(z.re)
}

fn require_modes(coeffs: &ModeCoefficients, grid: &FourierGrid) -> Result<()> {
    if coeffs.modes() != grid.modes() {
        return Err(FgigError::InvalidGrid(format!(
            "coefficients cover N = {} but grid has N = {}",
            coeffs.modes(),
            grid.modes()
        )));
    }
    Ok(())
}

/// `u_j = sum_k c_k exp(i omega_k x_j) + g` at every grid node.
pub fn synthesize_field(coeffs: &ModeCoefficients, grid: &FourierGrid, g_value: f64) -> Result<Vec<f64>> {
    require_modes(coeffs, grid)?;
    let n = grid.modes();
    let scale: f64 = coeffs.iter().map(|(_, c)| c.norm()).sum();
    (0..n)
        .map(|j| {
            let sum: Complex64 = coeffs.iter().map(|(k, c)| c * grid_phase(k, j, n)).sum();
            Ok(real_part_checked(sum, scale)? + g_value)
        })
        .collect()
}

/// `u_x(x_j) = Re(i sum_k omega_k c_k exp(i omega_k x_j))` at every grid node.
pub fn synthesize_derivative(coeffs: &ModeCoefficients, grid: &FourierGrid) -> Result<Vec<f64>> {
    require_modes(coeffs, grid)?;
    let n = grid.modes();
    let i = Complex64::new(0.0, 1.0);
    let scale: f64 = coeffs
        .iter()
        .map(|(k, c)| c.norm() * grid.wavenumber(k).abs())
        .sum();
    (0..n)
        .map(|j| {
            let sum: Complex64 = coeffs
                .iter()
                .map(|(k, c)| c * grid.wavenumber(k) * grid_phase(k, j, n))
                .sum();
            real_part_checked(i * sum, scale)
        })
        .collect()
}

/// Largest `|Im sum_k c_k exp(i omega_k x_j)|` over the grid nodes.
pub fn imaginary_residue(coeffs: &ModeCoefficients, grid: &FourierGrid) -> Result<f64> {
    require_modes(coeffs, grid)?;
    let n = grid.modes();
    Ok((0..n)
        .map(|j| {
            let sum: Complex64 = coeffs.iter().map(|(k, c)| c * grid_phase(k, j, n)).sum();
            sum.im.abs()
        })
        .fold(0.0, f64::max))
}
