//! Fourier-Gegenbauer integral-Galerkin solve.
//!
//! Each positive Fourier mode `n` of the offset solution satisfies the
//! Volterra equation `psi_n(t) + alpha_n int_0^t psi_n = u_n`, collocated at
//! the shifted Gegenbauer-Gauss nodes as `(I + alpha_n TQ) psi_n = u_n 1`.
//! Negative modes follow by conjugation and the zero mode from the zero-sum
//! condition at `x = 0`.

use std::time::{Duration, Instant};

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{FgigError, Result};
use crate::fourier::{
    synthesize_derivative, synthesize_field, wavenumber, FourierGrid, InitialSpectrum, ModeCoefficients,
};
use crate::gegenbauer::{build_integration_matrix, shift_integration_matrix, GegenbauerBasis, IntegrationMatrix, TimeGrid};
use crate::linalg::ComplexLu;
use crate::problem::{AdProblem, SolverConfig};

/// Pivots below this multiple of `||A||_inf` abort a mode solve.
pub const PIVOT_TOL: f64 = 1e-14;

/// `alpha_n = omega_n (nu omega_n + i mu)`.
pub fn mode_alpha(n: i64, problem: &AdProblem) -> Complex64 {
    let w = wavenumber(problem.period, n);
    Complex64::new(problem.nu * w * w, problem.mu * w)
}

/// Collocated system for one positive mode.
#[derive(Debug, Clone)]
pub struct ModeSystem {
    pub n: usize,
    pub alpha: Complex64,
    pub matrix: Array2<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl ModeSystem {
    pub fn solve(&self) -> Result<Vec<Complex64>> {
        if self.alpha == Complex64::new(0.0, 0.0) {
            return Ok(self.rhs.clone());
        }
        let lu = ComplexLu::factor(&self.matrix, PIVOT_TOL).map_err(|b| FgigError::SingularSystem {
            mode: self.n,
            pivot: b.pivot,
            threshold: b.threshold,
        })?;
        Ok(lu.solve(&self.rhs))
    }
}

/// `A = I + alpha_n TQ`, right-hand side `u_n` on every node. `tq` must
/// already carry the `T/2` scaling.
pub fn assemble_mode(
    n: usize,
    problem: &AdProblem,
    config: &SolverConfig,
    tq: &IntegrationMatrix,
    spectrum: &InitialSpectrum,
) -> ModeSystem {
    assert!(n >= 1 && n <= config.n / 2, "mode {n} outside 1..=N/2");
    let alpha = mode_alpha(n as i64, problem);
    let size = tq.order() + 1;
    let mut matrix = Array2::<Complex64>::eye(size);
    if alpha != Complex64::new(0.0, 0.0) {
        for ((i, j), &q) in tq.entries().indexed_iter() {
            matrix[[i, j]] += alpha * q;
        }
    }
    ModeSystem {
        n,
        alpha,
        matrix,
        rhs: vec![spectrum.get(n as i64); size],
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Distribute the independent mode solves over the rayon pool.
    pub parallel: bool,
}

/// Everything that does not depend on the mode solves: the time basis, the
/// shifted integration matrix and the initial spectrum.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub problem: AdProblem,
    pub config: SolverConfig,
    pub basis: GegenbauerBasis,
    pub time_grid: TimeGrid,
    pub tq: IntegrationMatrix,
    pub spectrum: InitialSpectrum,
}

impl Discretization {
    pub fn new(problem: &AdProblem, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        problem.validate()?;
        let basis = GegenbauerBasis::new(config.lambda, config.m)?;
        let time_grid = basis.time_grid(problem.horizon)?;
        let tq = shift_integration_matrix(&build_integration_matrix(&basis), problem.horizon)?;
        let spectrum = InitialSpectrum::sample(|x| problem.u0(x), problem.period, config.n0)?;
        Ok(Self {
            problem: problem.clone(),
            config: *config,
            basis,
            time_grid,
            tq,
            spectrum,
        })
    }

    pub fn assemble(&self, n: usize) -> ModeSystem {
        assemble_mode(n, &self.problem, &self.config, &self.tq, &self.spectrum)
    }

    pub fn solve(&self, options: SolveOptions) -> Result<SpectralSolution> {
        let half = self.config.n / 2;
        let solve_one = |n: usize| self.assemble(n).solve();
        let positive: Vec<Vec<Complex64>> = if options.parallel {
            (1..=half).into_par_iter().map(solve_one).collect::<Result<_>>()?
        } else {
            (1..=half).map(solve_one).collect::<Result<_>>()?
        };
        Ok(SpectralSolution::from_positive_modes(self, positive))
    }
}

/// Nodal values of every mode coefficient on the shifted time grid.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    config: SolverConfig,
    problem: AdProblem,
    basis: GegenbauerBasis,
    time_grid: TimeGrid,
    /// `psi[k + N/2][l]` = coefficient of mode `k` at time node `l`.
    psi: Vec<Vec<Complex64>>,
}

impl SpectralSolution {
    fn from_positive_modes(disc: &Discretization, positive: Vec<Vec<Complex64>>) -> Self {
        let half = disc.config.n / 2;
        let nodes = disc.basis.len();
        let mut psi = vec![vec![Complex64::new(0.0, 0.0); nodes]; 2 * half + 1];
        for (i, column) in positive.into_iter().enumerate() {
            let n = i + 1;
            psi[half - n] = column.iter().map(|c| c.conj()).collect();
            psi[half + n] = column;
        }
        for l in 0..nodes {
            let real_sum: f64 = (1..=half).map(|n| psi[half + n][l].re).sum();
            psi[half][l] = Complex64::new(-2.0 * real_sum, 0.0);
        }
        Self {
            config: disc.config,
            problem: disc.problem.clone(),
            basis: disc.basis.clone(),
            time_grid: disc.time_grid.clone(),
            psi,
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn problem(&self) -> &AdProblem {
        &self.problem
    }

    pub fn basis(&self) -> &GegenbauerBasis {
        &self.basis
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    /// Nodal values `psi_k(t_l)` for `l = 0..=M`.
    pub fn nodal(&self, k: i64) -> &[Complex64] {
        let half = (self.config.n / 2) as i64;
        assert!((-half..=half).contains(&k), "mode {k} out of range");
        &self.psi[(k + half) as usize]
    }

    /// Coefficients of every mode at time node `l`.
    pub fn nodal_column(&self, l: usize) -> ModeCoefficients {
        ModeCoefficients::from_fn(self.config.n, |k| self.nodal(k)[l])
    }

    /// Coefficients at any `t in [0, T]` by barycentric interpolation in time.
    pub fn coefficients_at(&self, t: f64) -> Result<ModeCoefficients> {
        let horizon = self.time_grid.horizon();
        if !(-1e-14 * horizon..=horizon * (1.0 + 1e-14)).contains(&t) {
            return Err(FgigError::TimeOutOfRange { t, horizon });
        }
        let s = self.time_grid.to_reference(t);
        Ok(ModeCoefficients::from_fn(self.config.n, |k| {
            self.basis.interpolate(self.nodal(k), s)
        }))
    }

    pub fn evaluate_u(&self, grid: &FourierGrid, t: f64) -> Result<Vec<f64>> {
        let coeffs = self.coefficients_at(t)?;
        synthesize_field(&coeffs, grid, self.problem.g(t))
    }

    pub fn evaluate_ux(&self, grid: &FourierGrid, t: f64) -> Result<Vec<f64>> {
        let coeffs = self.coefficients_at(t)?;
        synthesize_derivative(&coeffs, grid)
    }

    /// The spatial grid matching the solve's mode count.
    pub fn grid(&self) -> Result<FourierGrid> {
        FourierGrid::new(self.problem.period, self.config.n)
    }
}

/// Solve all positive-mode systems serially.
pub fn solve_modes(problem: &AdProblem, config: &SolverConfig) -> Result<SpectralSolution> {
    solve_modes_with(problem, config, SolveOptions::default())
}

pub fn solve_modes_with(problem: &AdProblem, config: &SolverConfig, options: SolveOptions) -> Result<SpectralSolution> {
    Discretization::new(problem, config)?.solve(options)
}

/// Wall-clock split of one end-to-end solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTimings {
    pub assembly: Duration,
    pub solve: Duration,
    pub synthesis: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.assembly + self.solve + self.synthesis
    }
}

/// Discretize, solve and synthesize `u` and `u_x` at `t_final`, timing each stage.
pub fn timed_solve(
    problem: &AdProblem,
    config: &SolverConfig,
    t_final: f64,
    options: SolveOptions,
) -> Result<(SpectralSolution, StageTimings)> {
    let start = Instant::now();
    let disc = Discretization::new(problem, config)?;
    let assembled = Instant::now();
    let sol = disc.solve(options)?;
    let solved = Instant::now();
    let grid = sol.grid()?;
    sol.evaluate_u(&grid, t_final)?;
    sol.evaluate_ux(&grid, t_final)?;
    let done = Instant::now();
    Ok((
        sol,
        StageTimings {
            assembly: assembled - start,
            solve: solved - assembled,
            synthesis: done - solved,
        },
    ))
}
