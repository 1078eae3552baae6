use std::io::Write;

use fgig::problem::{load_config, test_problem};
use fgig::{FgigError, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact(id: i64) -> impl Fn(f64, f64) -> f64 {
    let p = test_problem(id).unwrap();
    let f = p.exact.clone().unwrap();
    move |x, t| f(x, t)
}

/// Fourth-order central difference of `f` at `s` with step `h`.
fn d1(f: impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h)
}

/// `u_t` and `u_x` by differences of `u`, `u_xx` by differences of the
/// closed-form `u_x` (itself checked against `u` below). Differencing `u`
/// twice at `h = 1e-5` would carry rounding noise near 1e-6.
#[test]
fn exact_solutions_satisfy_the_pde() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-5;
    for id in 1..=3 {
        let p = test_problem(id).unwrap();
        let u = exact(id);
        let dx = p.exact_dx.clone().unwrap();
        for _ in 0..100 {
            let x = rng.gen_range(0.05..p.period - 0.05);
            let t = rng.gen_range(0.05..p.horizon * 0.95);
            let ut = d1(|s| u(x, s), t, h);
            let ux = d1(|s| u(s, t), x, h);
            let uxx = d1(|s| dx(s, t), x, h);
            let residual = ut + p.mu * ux - p.nu * uxx;
            assert!(residual.abs() <= 1e-8, "TP{id} at ({x}, {t}): residual {residual:e}");
        }
    }
}

#[test]
fn exact_solutions_are_periodic_and_match_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for id in 1..=3 {
        let p = test_problem(id).unwrap();
        let u = exact(id);
        let ux = p.exact_dx.clone().unwrap();
        for _ in 0..20 {
            let t = rng.gen_range(0.0..p.horizon);
            assert!((u(p.period, t) - u(0.0, t)).abs() <= 1e-12);
            assert!((u(0.0, t) - p.g(t)).abs() <= 1e-10);
            let x = rng.gen_range(0.0..p.period);
            assert!((u(x, 0.0) - p.u0(x)).abs() <= 1e-10);
            let h = 1e-6;
            let fd = (u(x + h, t) - u(x - h, t)) / (2.0 * h);
            assert!((ux(x, t) - fd).abs() <= 1e-7);
        }
    }
}

#[test]
fn exact_values() {
    assert!((exact(1)(0.5, 0.0) - 1.0).abs() < 1e-15);
    assert!((exact(2)(0.5, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
    assert!((exact(2)(0.5, 1.0) - 0.3678794).abs() < 1e-7);
    let g = test_problem(3).unwrap().g(0.1);
    assert!((exact(3)(0.0, 0.1) - g).abs() < 1e-16);
    assert!((g + 0.002846334986047412).abs() < 1e-15);
}

#[test]
fn unknown_problem_rejected() {
    assert!(matches!(test_problem(4), Err(FgigError::UnknownProblem(4))));
    assert!(matches!(test_problem(0), Err(FgigError::UnknownProblem(0))));
}

#[test]
fn config_file_round_trip() {
    let mut file = tempfile_in_target("table1.cfg");
    writeln!(file.1, "# table 1 row\nproblem_id = 1\nN = 4\nN0 = 6\nM = 10\nlambda = -0.4").unwrap();
    let (p, cfg) = load_config(&file.0).unwrap();
    assert_eq!(p.name, "TP1");
    assert_eq!((cfg.n, cfg.n0, cfg.m, cfg.lambda), (4, 6, 10, -0.4));
    std::fs::remove_file(&file.0).ok();
}

#[test]
fn lambda_defaults() {
    let run = RunConfig::parse("problem_id=2\nN=4\nM=7\n").unwrap();
    assert_eq!(run.solver.lambda, -0.4);
    assert_eq!(run.solver.n0, 6);
    assert_eq!(run.t_final, 1.0);
}

#[test]
fn odd_n_rejected_with_key() {
    match RunConfig::parse("problem_id=1\nN=5\nM=4\n") {
        Err(FgigError::Config { key, message }) => {
            assert_eq!(key, "N");
            assert!(message.contains("N must be even"), "{message}");
        }
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn custom_problem_from_named_builtins() {
    let run = RunConfig::parse("mu=0.5\nnu=0.2\nL=3\nT=0.4\nu0=sine\ng=travelling\nN=8\nM=12\n").unwrap();
    assert_eq!(run.problem.mu, 0.5);
    assert!(run.problem.exact.is_some());
    assert!(RunConfig::parse("mu=0.5\nnu=0.2\nL=3\nT=0.4\nN=8\nM=12\n").is_err());
}

#[test]
fn missing_file_names_path() {
    let err = load_config("/nonexistent/dir/run.cfg").unwrap_err();
    assert!(err.to_string().contains("/nonexistent/dir/run.cfg"), "{err}");
}

fn tempfile_in_target(name: &str) -> (std::path::PathBuf, std::fs::File) {
    let dir = std::env::temp_dir().join(format!("fgig-problem-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let file = std::fs::File::create(&path).unwrap();
    (path, file)
}
