//! Command implementations behind the `fgig` binary. Each command reads a
//! run config, drives the library and writes CSV files into the output
//! directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use fgig::analysis::{
    bench_solve, conditioning_study, convergence_sweep, ErrorReport, GridDescriptor,
};
use fgig::solver::{solve_modes_with, SolveOptions};
use fgig::{FourierGrid, RunConfig, SaField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Integral-Galerkin solve: solution, coefficients and error report.
    Solve,
    /// Semi-analytic evaluation: solution and error report.
    Sa,
    /// Error sweep over (N, M).
    Convergence,
    /// Singular values of TQ and of the collocation matrices.
    Conditioning,
    /// Per-stage timings of repeated solves.
    Bench,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "fgig", version, about = "Fourier-Gegenbauer integral-Galerkin solver for periodic advection-diffusion")]
pub struct Manifest {
    #[arg(value_enum)]
    pub command: Command,
    /// Run config file (flat key = value lines).
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving the CSV outputs; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Solve the independent mode systems on the rayon pool.
    #[arg(long)]
    pub parallel: bool,
    /// Recorded in report.csv and bench.csv; no code path is randomized.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// 17 significant digits, enough to round-trip any `f64`. Negative zero is
/// written as zero.
fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        let mut table = Self { path, writer };
        table.row(header.iter().map(|s| s.to_string()))?;
        Ok(table)
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        self.writer
            .write_record(fields.into_iter().collect::<Vec<_>>())
            .with_context(|| format!("cannot write {}", self.path.display()))
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.writer
            .flush()
            .with_context(|| format!("cannot write {}", self.path.display()))?;
        Ok(self.path)
    }
}

fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let probe = dir.join(".fgig-write-check");
    fs::write(&probe, b"").with_context(|| format!("output directory {} is not writable", dir.display()))?;
    fs::remove_file(&probe).with_context(|| format!("output directory {} is not writable", dir.display()))?;
    Ok(())
}

/// Run one command; returns the files written.
pub fn run(manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let run = RunConfig::load(&manifest.config)
        .with_context(|| format!("invalid config {}", manifest.config.display()))?;
    prepare_output(&manifest.out)?;
    match manifest.command {
        Command::Solve => cmd_solve(&run, manifest),
        Command::Sa => cmd_sa(&run, manifest),
        Command::Convergence => cmd_convergence(&run, manifest),
        Command::Conditioning => cmd_conditioning(&run, manifest),
        Command::Bench => cmd_bench(&run, manifest),
    }
}

const SOLUTION_HEADER: [&str; 6] = ["x", "t", "u", "ux", "u_exact", "abs_err"];
const REPORT_HEADER: [&str; 11] = [
    "method", "problem", "N", "N0", "M", "lambda", "t_final", "pointwise_max", "dne", "parallel", "seed",
];

fn solution_row(x: f64, t: f64, u: f64, ux: f64, exact: Option<f64>) -> Vec<String> {
    let (e, err) = match exact {
        Some(e) => (num(e), num((e - u).abs())),
        None => (String::new(), String::new()),
    };
    vec![num(x), num(t), num(u), num(ux), e, err]
}

fn write_report(
    out: &Path,
    method: &str,
    run: &RunConfig,
    manifest: &Manifest,
    approx: &[f64],
    grid: &FourierGrid,
) -> Result<PathBuf> {
    let cfg = &run.solver;
    let (max, dne) = match run.problem.exact.as_ref() {
        Some(exact) => {
            let exact: Vec<f64> = grid.nodes().iter().map(|&x| exact(x, run.t_final)).collect();
            let r = ErrorReport::from_fields(approx, &exact, run.problem.period, GridDescriptor::new(cfg, run.t_final));
            (num(r.pointwise_max), num(r.dne))
        }
        None => (String::new(), String::new()),
    };
    let mut table = Table::create(out, "report.csv", &REPORT_HEADER)?;
    table.row([
        method.to_string(),
        run.problem.name.clone(),
        cfg.n.to_string(),
        cfg.n0.to_string(),
        cfg.m.to_string(),
        num(cfg.lambda),
        num(run.t_final),
        max,
        dne,
        manifest.parallel.to_string(),
        manifest.seed.to_string(),
    ])?;
    table.finish()
}

/// Solution times: the shifted Gegenbauer nodes followed by `T`.
fn augmented_times(run: &RunConfig) -> Result<Vec<f64>> {
    let basis = fgig::GegenbauerBasis::new(run.solver.lambda, run.solver.m)?;
    Ok(basis.time_grid(run.problem.horizon)?.augmented())
}

fn cmd_solve(run: &RunConfig, manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let options = SolveOptions {
        parallel: manifest.parallel,
    };
    let sol = solve_modes_with(&run.problem, &run.solver, options)?;
    let grid = sol.grid()?;
    let exact = run.problem.exact.as_ref();
    let out = &manifest.out;

    let mut solution = Table::create(out, "solution.csv", &SOLUTION_HEADER)?;
    for t in sol.time_grid().augmented() {
        let u = sol.evaluate_u(&grid, t)?;
        let ux = sol.evaluate_ux(&grid, t)?;
        for (j, &x) in grid.nodes().iter().enumerate() {
            solution.row(solution_row(x, t, u[j], ux[j], exact.map(|f| f(x, t))))?;
        }
    }

    let mut coefficients = Table::create(out, "coefficients.csv", &["k", "l", "t_node", "re_psi", "im_psi"])?;
    let half = (run.solver.n / 2) as i64;
    for k in -half..=half {
        for (l, (&t, c)) in sol.time_grid().nodes().iter().zip(sol.nodal(k)).enumerate() {
            coefficients.row([k.to_string(), l.to_string(), num(t), num(c.re), num(c.im)])?;
        }
    }

    let approx = sol.evaluate_u(&grid, run.t_final)?;
    let report = write_report(out, "fgig", run, manifest, &approx, &grid)?;
    Ok(vec![solution.finish()?, coefficients.finish()?, report])
}

fn cmd_sa(run: &RunConfig, manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let field = SaField::new(&run.problem, run.solver.n, run.solver.n0)?;
    let grid = FourierGrid::new(run.problem.period, run.solver.n)?;
    let exact = run.problem.exact.as_ref();
    let out = &manifest.out;

    let mut solution = Table::create(out, "solution.csv", &SOLUTION_HEADER)?;
    for t in augmented_times(run)? {
        for &x in grid.nodes() {
            let (u, ux) = (field.evaluate_u(x, t), field.evaluate_ux(x, t));
            solution.row(solution_row(x, t, u, ux, exact.map(|f| f(x, t))))?;
        }
    }
    let approx: Vec<f64> = grid.nodes().iter().map(|&x| field.evaluate_u(x, run.t_final)).collect();
    let report = write_report(out, "sa", run, manifest, &approx, &grid)?;
    Ok(vec![solution.finish()?, report])
}

fn cmd_convergence(run: &RunConfig, manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let ns = run.study.sweep_n.clone().unwrap_or_else(|| vec![run.solver.n]);
    let ms = run.study.sweep_m.clone().unwrap_or_else(|| vec![run.solver.m]);
    let table = convergence_sweep(&run.problem, &ns, &ms, run.solver.lambda)?;
    let mut sweep = Table::create(
        &manifest.out,
        "sweep.csv",
        &["N", "M", "lambda", "dne", "pointwise_max", "log10_dne"],
    )?;
    for r in &table.rows {
        sweep.row([
            r.n.to_string(),
            r.m.to_string(),
            num(r.lambda),
            num(r.dne),
            num(r.pointwise_max),
            num(r.log10_dne),
        ])?;
    }
    Ok(vec![sweep.finish()?])
}

fn cmd_conditioning(run: &RunConfig, manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let lambdas = run.study.lambda_list.clone().unwrap_or_else(|| vec![run.solver.lambda]);
    let ms = run.study.m_list.clone().unwrap_or_else(|| vec![run.solver.m]);
    let study = conditioning_study(&run.problem, &run.solver, &lambdas, &ms)?;
    let mut table = Table::create(
        &manifest.out,
        "conditioning.csv",
        &["matrix", "lambda", "M", "n", "sigma_max", "sigma_min", "cond"],
    )?;
    for r in &study.reports {
        table.row([
            r.kind.label().to_string(),
            num(r.lambda),
            r.m.to_string(),
            r.n.to_string(),
            num(r.sigma_max),
            num(r.sigma_min),
            num(r.cond),
        ])?;
    }
    Ok(vec![table.finish()?])
}

fn cmd_bench(run: &RunConfig, manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let repeats = run.study.repeats.unwrap_or(5);
    if repeats < 3 {
        bail!("config key 'repeats': benchmark needs at least 3 repeats, got {repeats}");
    }
    let r = bench_solve(&run.problem, &run.solver, repeats)?;
    let mut table = Table::create(
        &manifest.out,
        "bench.csv",
        &[
            "N",
            "M",
            "repeats",
            "assembly_s",
            "solve_s",
            "synthesis_s",
            "total_s",
            "parallel_total_s",
            "parallel_speedup",
            "parallel_identical",
            "seed",
        ],
    )?;
    table.row([
        r.n.to_string(),
        r.m.to_string(),
        r.repeats.to_string(),
        num(r.assembly),
        num(r.solve),
        num(r.synthesis),
        num(r.total),
        num(r.parallel_total),
        num(r.parallel_speedup),
        r.parallel_identical.to_string(),
        manifest.seed.to_string(),
    ])?;
    Ok(vec![table.finish()?])
}
