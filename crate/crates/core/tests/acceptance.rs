use std::time::Instant;

use fgig::analysis::{convergence_sweep, error_report, mode_condition_numbers, sa_error_report, singular_values};
use fgig::fourier::imaginary_residue;
use fgig::gegenbauer::build_integration_matrix;
use fgig::problem::test_problem;
use fgig::solver::{solve_modes_with, SolveOptions};
use fgig::{AdProblem, GegenbauerBasis, SaField, SolverConfig};
use num_complex::Complex64;

fn verdict(criterion: &str, pass: bool, detail: String) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion} failed: {detail}");
}

/// Test problem whose horizon is the evaluation time.
fn at_horizon(id: i64, t: f64) -> AdProblem {
    test_problem(id).unwrap().with_horizon(t).unwrap()
}

fn table_row(id: i64, t: f64, m: usize) -> (f64, f64) {
    let problem = at_horizon(id, t);
    let config = SolverConfig::with_all(4, 6, m, -0.4).unwrap();
    let start = Instant::now();
    let report = error_report(&problem, &config, t).unwrap();
    (report.pointwise_max, start.elapsed().as_secs_f64())
}

#[test]
fn criterion_1_tp1_table() {
    let (e8, s8) = table_row(1, 0.1, 8);
    let (e10, s10) = table_row(1, 0.1, 10);
    let pass = (1e-13..=1e-11).contains(&e8) && e10 <= 1e-14 && s8 < 1.0 && s10 < 1.0;
    verdict(
        "1 TP1 t=0.1",
        pass,
        format!("M=8 err {e8:.4e} in [1e-13,1e-11]; M=10 err {e10:.4e} <= 1e-14; runtime {s8:.2e}s, {s10:.2e}s < 1s"),
    );
}

#[test]
fn criterion_2_tp2_table() {
    let (e7, s7) = table_row(2, 1.0, 7);
    let (e10, s10) = table_row(2, 1.0, 10);
    let pass = (7e-12..=7e-10).contains(&e7) && e10 <= 1e-14 && s7 < 1.0 && s10 < 1.0;
    verdict(
        "2 TP2 t=1",
        pass,
        format!("M=7 err {e7:.4e} in [7e-12,7e-10]; M=10 err {e10:.4e} <= 1e-14; runtime {s7:.2e}s, {s10:.2e}s < 1s"),
    );
}

#[test]
fn criterion_3_semi_analytic() {
    let config = SolverConfig::with_all(4, 6, 10, -0.4).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    for (id, t) in [(1, 0.1), (2, 1.0)] {
        let start = Instant::now();
        let report = sa_error_report(&at_horizon(id, t), &config, t).unwrap();
        let secs = start.elapsed().as_secs_f64();
        pass &= report.pointwise_max <= 1e-15 && secs < 0.1;
        details.push(format!("TP{id} err {:.4e} in {secs:.2e}s", report.pointwise_max));
    }
    verdict("3 SA TP1/TP2", pass, format!("{} (<= 1e-15, < 0.1s)", details.join("; ")));
}

#[test]
fn criterion_4_tp3_sanity() {
    let config = SolverConfig::with_all(16, 18, 4, -0.4).unwrap();
    let err = error_report(&at_horizon(3, 0.1), &config, 0.1).unwrap().pointwise_max;
    verdict("4 TP3 N=16 M=4", err <= 1e-2, format!("err {err:.4e} <= 1e-2"));
}

#[test]
fn criterion_5_temporal_convergence() {
    let ms: Vec<usize> = (4..=12).collect();
    let table = convergence_sweep(&test_problem(1).unwrap(), &[4], &ms, -0.4).unwrap();
    let logs: Vec<f64> = table.rows.iter().map(|r| r.log10_dne).collect();
    let drop = logs[0] - logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let monotone = logs
        .windows(2)
        .all(|w| w[1] < w[0] || w[1] <= floor + 1.0);
    verdict(
        "5 temporal convergence",
        drop >= 8.0 && monotone,
        format!("log10 DNE {:.2} -> {:.2}, drop {drop:.2} >= 8 decades, monotone {monotone}", logs[0], logs[logs.len() - 1]),
    );
}

#[test]
fn criterion_6_oracle_equivalence() {
    let mut worst: f64 = 0.0;
    for (id, n, n0) in [(1, 4, 6), (2, 4, 6), (3, 16, 18)] {
        let problem = test_problem(id).unwrap();
        let config = SolverConfig::with_all(n, n0, 12, -0.4).unwrap();
        let sol = solve_modes_with(&problem, &config, SolveOptions::default()).unwrap();
        let sa = SaField::new(&problem, n, n0).unwrap();
        for k in 1..=n / 2 {
            for (l, &t) in sol.time_grid().nodes().iter().enumerate() {
                worst = worst.max((sol.nodal(k as i64)[l] - sa.coefficient(k, t)).norm());
            }
        }
    }
    verdict("6 oracle equivalence M=12", worst <= 1e-11, format!("max deviation {worst:.4e} <= 1e-11"));
}

#[test]
fn criterion_7_quadrature_suite() {
    let mut exact_err: f64 = 0.0;
    let mut row_err: f64 = 0.0;
    let mut bary_err: f64 = 0.0;
    for lambda in [-0.4, 0.0, 0.5, 1.0, 2.0] {
        for m in [4, 12, 40] {
            let basis = GegenbauerBasis::new(lambda, m).unwrap();
            let q = build_integration_matrix(&basis);
            let z = basis.nodes();
            for (l, &zl) in z.iter().enumerate() {
                let sum: f64 = q.entries().row(l).sum();
                row_err = row_err.max((sum - (zl + 1.0)).abs());
            }
            for d in 0..=m as i32 {
                let samples: Vec<f64> = z.iter().map(|x| x.powi(d)).collect();
                let integrated = q.apply(&samples);
                for (l, &zl) in z.iter().enumerate() {
                    let exact = (zl.powi(d + 1) - (-1f64).powi(d + 1)) / (d as f64 + 1.0);
                    exact_err = exact_err.max((integrated[l] - exact).abs());
                }
                for j in 0..=20 {
                    let t = -0.97 + 1.94 * j as f64 / 20.0;
                    bary_err = bary_err.max((basis.interpolate_real(&samples, t) - t.powi(d)).abs());
                }
            }
        }
    }
    let pass = exact_err <= 1e-12 && row_err <= 1e-13 && bary_err <= 1e-12;
    verdict(
        "7 quadrature suite",
        pass,
        format!("exactness {exact_err:.2e} <= 1e-12; row sums {row_err:.2e} <= 1e-13; barycentric {bary_err:.2e} <= 1e-12"),
    );
}

fn sigma_min_q(lambda: f64, m: usize) -> f64 {
    let q = build_integration_matrix(&GegenbauerBasis::new(lambda, m).unwrap());
    *singular_values(q.entries()).unwrap().last().unwrap()
}

#[test]
fn criterion_8a_fundamental_conditioning() {
    let tp1 = test_problem(1).unwrap();
    let conds: Vec<f64> = (10..=100)
        .step_by(10)
        .map(|m| mode_condition_numbers(&tp1, &SolverConfig::with_all(4, 6, m, -0.4).unwrap()).unwrap()[0])
        .collect();
    let worst = conds.iter().cloned().fold(0.0, f64::max);
    // Informational: the same sweep with the horizon of the TP1 table.
    let short = at_horizon(1, 0.1);
    let short_worst = (10..=100)
        .step_by(10)
        .map(|m| mode_condition_numbers(&short, &SolverConfig::with_all(4, 6, m, -0.4).unwrap()).unwrap()[0])
        .fold(0.0, f64::max);
    verdict(
        "8a cond(A^(1,M)) TP1 T=0.2",
        conds.iter().all(|&c| (1.0..=2.0).contains(&c)),
        format!("max cond {worst:.4} over M=10..100 (bound 2); with T=0.1 max {short_worst:.4}"),
    );
}

#[test]
fn criterion_8b_sigma_min_collapse() {
    let near = sigma_min_q(-0.4999, 40);
    let base = sigma_min_q(-0.4, 40);
    verdict(
        "8b sigma_min(Q) M=40",
        base / near >= 100.0,
        format!("sigma_min {near:.4e} at -0.4999 vs {base:.4e} at -0.4, ratio {:.1} >= 100", base / near),
    );
}

#[test]
fn criterion_8c_peak_at_nyquist() {
    let problem = AdProblem::travelling_wave(1.0, 1.0, 2.0, 0.2, 0.0).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    for m in [4, 40] {
        let conds = mode_condition_numbers(&problem, &SolverConfig::with_all(50, 52, m, -0.4).unwrap()).unwrap();
        let (idx, peak) = conds
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        pass &= idx + 1 == 25;
        details.push(format!("M={m} argmax n={} cond {peak:.4e}", idx + 1));
    }
    verdict("8c peak conditioning N=50", pass, format!("{} (expected n=25)", details.join("; ")));
}

#[test]
fn criterion_9_structural_invariants() {
    let mut symmetric = true;
    let mut zero_mean: f64 = 0.0;
    let mut residue: f64 = 0.0;
    let mut identical = true;
    for (id, n, n0) in [(1, 8, 10), (2, 8, 10), (3, 16, 18)] {
        let problem = test_problem(id).unwrap();
        let config = SolverConfig::with_all(n, n0, 12, -0.4).unwrap();
        let serial = solve_modes_with(&problem, &config, SolveOptions { parallel: false }).unwrap();
        let parallel = solve_modes_with(&problem, &config, SolveOptions { parallel: true }).unwrap();
        let again = solve_modes_with(&problem, &config, SolveOptions { parallel: true }).unwrap();
        let half = (n / 2) as i64;
        for k in -half..=half {
            identical &= serial.nodal(k) == parallel.nodal(k) && parallel.nodal(k) == again.nodal(k);
        }
        for k in 1..=half {
            let conj: Vec<Complex64> = serial.nodal(k).iter().map(|c| c.conj()).collect();
            symmetric &= serial.nodal(-k) == conj.as_slice();
        }
        let grid = serial.grid().unwrap();
        let horizon = problem.horizon;
        let mut columns: Vec<_> = (0..serial.basis().len()).map(|l| serial.nodal_column(l)).collect();
        for t in [0.0, 0.37 * horizon, horizon] {
            columns.push(serial.coefficients_at(t).unwrap());
        }
        for coeffs in &columns {
            zero_mean = zero_mean.max(coeffs.sum().norm());
            residue = residue.max(imaginary_residue(coeffs, &grid).unwrap());
        }
    }
    let pass = symmetric && zero_mean <= 1e-12 && residue <= 1e-12 && identical;
    verdict(
        "9 structural invariants",
        pass,
        format!(
            "conjugate symmetry exact {symmetric}; zero mean {zero_mean:.2e} <= 1e-12; imaginary residue {residue:.2e} <= 1e-12; parallel bit-identical {identical}"
        ),
    );
}
