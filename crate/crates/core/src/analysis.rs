//! Error metrics, convergence sweeps, conditioning studies and timing.

use std::time::Duration;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{FgigError, Result};
use crate::fourier::FourierGrid;
use crate::gegenbauer::{build_integration_matrix, shift_integration_matrix, GegenbauerBasis};
use crate::linalg::jacobi_svd;
use crate::problem::{AdProblem, SolverConfig};
use crate::semianalytic::SaField;
use crate::solver::{assemble_mode, solve_modes, timed_solve, SolveOptions};
use crate::fourier::InitialSpectrum;

/// Discretization parameters an error was measured with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDescriptor {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub n0: usize,
    pub t_final: f64,
}

impl GridDescriptor {
    pub fn new(config: &SolverConfig, t_final: f64) -> Self {
        Self {
            n: config.n,
            m: config.m,
            lambda: config.lambda,
            n0: config.n0,
            t_final,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Maximum absolute error over the spatial grid.
    pub pointwise_max: f64,
    /// `sqrt((L/N) sum_j e_j^2)`.
    pub dne: f64,
    pub grid: GridDescriptor,
}

/// Discrete norm `sqrt((L/N) sum_j e_j^2)` of nodal errors.
pub fn discrete_norm(errors: &[f64], period: f64) -> f64 {
    let sum: f64 = errors.iter().map(|e| e * e).sum();
    (period / errors.len() as f64 * sum).sqrt()
}

impl ErrorReport {
    /// Compare an approximate field with exact values on the same grid.
    pub fn from_fields(approx: &[f64], exact: &[f64], period: f64, grid: GridDescriptor) -> Self {
        assert_eq!(approx.len(), exact.len());
        let errors: Vec<f64> = approx.iter().zip(exact).map(|(a, e)| e - a).collect();
        Self {
            pointwise_max: errors.iter().fold(0.0, |m, e| f64::max(m, e.abs())),
            dne: discrete_norm(&errors, period),
            grid,
        }
    }
}

fn exact_on_grid(problem: &AdProblem, grid: &FourierGrid, t: f64) -> Result<Vec<f64>> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| FgigError::MissingExact(problem.name.clone()))?;
    Ok(grid.nodes().iter().map(|&x| exact(x, t)).collect())
}

/// Error of the integral-Galerkin solution at `t_final` on the `N` spatial nodes.
pub fn error_report(problem: &AdProblem, config: &SolverConfig, t_final: f64) -> Result<ErrorReport> {
    if problem.exact.is_none() {
        return Err(FgigError::MissingExact(problem.name.clone()));
    }
    let sol = solve_modes(problem, config)?;
    let grid = sol.grid()?;
    let approx = sol.evaluate_u(&grid, t_final)?;
    let exact = exact_on_grid(problem, &grid, t_final)?;
    Ok(ErrorReport::from_fields(
        &approx,
        &exact,
        problem.period,
        GridDescriptor::new(config, t_final),
    ))
}

/// Error of the semi-analytic solution at `t_final` on the `N` spatial nodes.
pub fn sa_error_report(problem: &AdProblem, config: &SolverConfig, t_final: f64) -> Result<ErrorReport> {
    let grid = FourierGrid::new(problem.period, config.n)?;
    let exact = exact_on_grid(problem, &grid, t_final)?;
    let field = SaField::new(problem, config.n, config.n0)?;
    let approx: Vec<f64> = grid.nodes().iter().map(|&x| field.evaluate_u(x, t_final)).collect();
    Ok(ErrorReport::from_fields(
        &approx,
        &exact,
        problem.period,
        GridDescriptor::new(config, t_final),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub dne: f64,
    pub pointwise_max: f64,
    pub log10_dne: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    /// Sorted by `(N, M)`.
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log10(DNE)` against `M` for each `N`.
    pub slopes: Vec<(usize, f64)>,
}

impl ConvergenceTable {
    pub fn slope_for(&self, n: usize) -> Option<f64> {
        self.slopes.iter().find(|(k, _)| *k == n).map(|(_, s)| *s)
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return f64::NAN;
    }
    let count = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / count;
    let my = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// DNE at `t = T` for every `(N, M)` pair, with `N0 = N + 2`.
pub fn convergence_sweep(
    problem: &AdProblem,
    n_range: &[usize],
    m_range: &[usize],
    lambda: f64,
) -> Result<ConvergenceTable> {
    if n_range.is_empty() || m_range.is_empty() {
        return Err(FgigError::InvalidGrid("sweep ranges must be nonempty".into()));
    }
    let mut ns = n_range.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut ms = m_range.to_vec();
    ms.sort_unstable();
    ms.dedup();

    let mut rows = Vec::with_capacity(ns.len() * ms.len());
    let mut slopes = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut points = Vec::with_capacity(ms.len());
        for &m in &ms {
            let cfg = SolverConfig::with_all(n, n + 2, m, lambda)?;
            let report = error_report(problem, &cfg, problem.horizon)?;
            let log10_dne = report.dne.max(1e-300).log10();
            points.push((m as f64, log10_dne));
            rows.push(ConvergenceRow {
                n,
                m,
                lambda,
                dne: report.dne,
                pointwise_max: report.pointwise_max,
                log10_dne,
            });
        }
        slopes.push((n, least_squares_slope(&points)));
    }
    Ok(ConvergenceTable { rows, slopes })
}

/// Singular values of a square matrix in descending order.
pub fn singular_values<T>(matrix: &Array2<T>) -> Result<Vec<f64>>
where
    T: Copy + Into<Complex64>,
{
    let lifted = matrix.mapv(Into::into);
    Ok(jacobi_svd(&lifted)?.sigma.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatrixKind {
    /// Shifted integration matrix `TQ`.
    IntegrationMatrix,
    /// Collocation matrix `I + alpha_n TQ`.
    Collocation,
}

impl MatrixKind {
    pub fn label(&self) -> &'static str {
        match self {
            MatrixKind::IntegrationMatrix => "TQ",
            MatrixKind::Collocation => "A",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningReport {
    pub kind: MatrixKind,
    pub lambda: f64,
    pub m: usize,
    /// Mode index; 0 for the integration matrix itself.
    pub n: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub cond: f64,
}

impl ConditioningReport {
    fn from_sigma(kind: MatrixKind, lambda: f64, m: usize, n: usize, sigma: &[f64]) -> Self {
        let sigma_max = sigma[0];
        let sigma_min = *sigma.last().unwrap();
        Self {
            kind,
            lambda,
            m,
            n,
            sigma_max,
            sigma_min,
            cond: sigma_max / sigma_min,
        }
    }
}

/// Empirical checks drawn from a conditioning study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningChecks {
    /// `cond(A^(N/2)) >= cond(A^(1))` in every cell; `None` when `mu = nu = 0`.
    pub peak_at_highest_mode: Option<bool>,
    /// `sigma_min(TQ)` shrinks as `lambda` falls toward `-1/2`: non-decreasing
    /// in `lambda` over the sampled `lambda <= 0` at every `M`. Beyond the
    /// Legendre-to-Chebyshev range it peaks and falls again, so larger
    /// `lambda` are not compared.
    pub sigma_min_decays_toward_singular_index: bool,
    /// Largest `cond(A^(1))` seen.
    pub max_fundamental_cond: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningStudy {
    /// Sorted by `(lambda, M, kind, n)`.
    pub reports: Vec<ConditioningReport>,
    pub checks: ConditioningChecks,
}

/// Spectral condition numbers of `TQ` and of `A^(n,M)` for `n in {1, N/2}`
/// over a grid of `(lambda, M)`.
pub fn conditioning_study(
    problem: &AdProblem,
    config: &SolverConfig,
    lambda_list: &[f64],
    m_list: &[usize],
) -> Result<ConditioningStudy> {
    if lambda_list.is_empty() || m_list.is_empty() {
        return Err(FgigError::InvalidGrid("lambda and M lists must be nonempty".into()));
    }
    let mut lambdas = lambda_list.to_vec();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let mut ms = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();

    let spectrum = InitialSpectrum::sample(|x| problem.u0(x), problem.period, config.n0)?;
    let mut modes = vec![1, config.n / 2];
    modes.dedup();

    let mut reports = Vec::new();
    for &lambda in &lambdas {
        for &m in &ms {
            let cfg = SolverConfig::with_all(config.n, config.n0, m, lambda)?;
            let basis = GegenbauerBasis::new(lambda, m)?;
            let tq = shift_integration_matrix(&build_integration_matrix(&basis), problem.horizon)?;
            let sigma = singular_values(tq.entries())?;
            reports.push(ConditioningReport::from_sigma(
                MatrixKind::IntegrationMatrix,
                lambda,
                m,
                0,
                &sigma,
            ));
            for &n in &modes {
                let sys = assemble_mode(n, problem, &cfg, &tq, &spectrum);
                let sigma = singular_values(&sys.matrix)?;
                reports.push(ConditioningReport::from_sigma(
                    MatrixKind::Collocation,
                    lambda,
                    m,
                    n,
                    &sigma,
                ));
            }
        }
    }

    let find = |kind: MatrixKind, lambda: f64, m: usize, n: usize| {
        reports
            .iter()
            .find(|r| r.kind == kind && r.lambda == lambda && r.m == m && r.n == n)
            .copied()
    };

    let transport = problem.mu != 0.0 || problem.nu != 0.0;
    let peak_at_highest_mode = transport.then(|| {
        lambdas.iter().all(|&lambda| {
            ms.iter().all(|&m| {
                let low = find(MatrixKind::Collocation, lambda, m, 1).unwrap();
                let high = find(MatrixKind::Collocation, lambda, m, config.n / 2).unwrap();
                high.cond >= low.cond
            })
        })
    });
    let near_singular: Vec<f64> = lambdas.iter().copied().filter(|&l| l <= 0.0).collect();
    let sigma_min_decays_toward_singular_index = ms.iter().all(|&m| {
        near_singular.windows(2).all(|w| {
            let a = find(MatrixKind::IntegrationMatrix, w[0], m, 0).unwrap();
            let b = find(MatrixKind::IntegrationMatrix, w[1], m, 0).unwrap();
            a.sigma_min <= b.sigma_min
        })
    });
    let max_fundamental_cond = reports
        .iter()
        .filter(|r| r.kind == MatrixKind::Collocation && r.n == 1)
        .fold(0.0, |acc, r| f64::max(acc, r.cond));

    Ok(ConditioningStudy {
        reports,
        checks: ConditioningChecks {
            peak_at_highest_mode,
            sigma_min_decays_toward_singular_index,
            max_fundamental_cond,
        },
    })
}

/// Condition number of `I + alpha_n TQ` for every `n in 1..=N/2`.
pub fn mode_condition_numbers(problem: &AdProblem, config: &SolverConfig) -> Result<Vec<f64>> {
    let basis = GegenbauerBasis::new(config.lambda, config.m)?;
    let tq = shift_integration_matrix(&build_integration_matrix(&basis), problem.horizon)?;
    let spectrum = InitialSpectrum::sample(|x| problem.u0(x), problem.period, config.n0)?;
    (1..=config.n / 2)
        .map(|n| {
            let sigma = singular_values(&assemble_mode(n, problem, config, &tq, &spectrum).matrix)?;
            Ok(sigma[0] / sigma[sigma.len() - 1])
        })
        .collect()
}

/// Median wall-clock timings of repeated end-to-end solves, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub n: usize,
    pub m: usize,
    pub repeats: usize,
    pub assembly: f64,
    pub solve: f64,
    pub synthesis: f64,
    pub total: f64,
    pub parallel_total: f64,
    /// Serial over parallel median total.
    pub parallel_speedup: f64,
    /// Parallel and serial nodal coefficients agree bit for bit.
    pub parallel_identical: bool,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

pub fn bench_solve(problem: &AdProblem, config: &SolverConfig, repeats: usize) -> Result<BenchReport> {
    if repeats < 3 {
        return Err(FgigError::InvalidGrid(format!("benchmark needs at least 3 repeats, got {repeats}")));
    }
    let t_final = problem.horizon;
    let secs = |d: Duration| d.as_secs_f64();
    let mut serial = Vec::with_capacity(repeats);
    let mut parallel = Vec::with_capacity(repeats);
    let mut reference = None;
    let mut identical = true;
    for _ in 0..repeats {
        let (sol, timings) = timed_solve(problem, config, t_final, SolveOptions { parallel: false })?;
        serial.push(timings);
        let (psol, ptimings) = timed_solve(problem, config, t_final, SolveOptions { parallel: true })?;
        parallel.push(ptimings);
        let half = (config.n / 2) as i64;
        identical &= (-half..=half).all(|k| sol.nodal(k) == psol.nodal(k));
        if reference.is_none() {
            reference = Some(sol);
        }
    }
    let total = median(serial.iter().map(|t| secs(t.total())).collect());
    let parallel_total = median(parallel.iter().map(|t| secs(t.total())).collect());
    Ok(BenchReport {
        n: config.n,
        m: config.m,
        repeats,
        assembly: median(serial.iter().map(|t| secs(t.assembly)).collect()),
        solve: median(serial.iter().map(|t| secs(t.solve)).collect()),
        synthesis: median(serial.iter().map(|t| secs(t.synthesis)).collect()),
        total,
        parallel_total,
        parallel_speedup: if parallel_total > 0.0 { total / parallel_total } else { f64::NAN },
        parallel_identical: identical,
    })
}
