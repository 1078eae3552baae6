use fgig::analysis::singular_values;
use fgig::gegenbauer::{build_integration_matrix, shift_integration_matrix, weight_mass};
use fgig::GegenbauerBasis;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDAS: [f64; 5] = [-0.4, 0.0, 0.5, 1.0, 2.0];

fn cheb(k: usize, x: f64) -> f64 {
    (k as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

/// Primitive of `T_k` vanishing at `x = -1`.
fn cheb_primitive(k: usize, x: f64) -> f64 {
    let raw = |x: f64| match k {
        0 => x,
        1 => 0.5 * x * x,
        _ => cheb(k + 1, x) / (2.0 * (k + 1) as f64) - cheb(k - 1, x) / (2.0 * (k - 1) as f64),
    };
    raw(x) - raw(-1.0)
}

/// `int_{-1}^{1} (1 - x^2)^a dx` via `x = 1 - u^p` on each half and composite
/// Simpson, refined until two successive estimates agree.
fn mass_oracle(lambda: f64) -> f64 {
    let a = lambda - 0.5;
    let p = 4.0 / (1.0 + a);
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let up = u.powf(p);
        p * u.powf(p - 1.0) * (up * (2.0 - up)).powf(a)
    };
    let simpson = |n: usize| {
        let h = 1.0 / n as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let mut n = 64;
    let mut prev = simpson(n);
    loop {
        n *= 2;
        let next = simpson(n);
        if (next - prev).abs() < 1e-15 * next.abs() || n > 1 << 22 {
            return 2.0 * next;
        }
        prev = next;
    }
}

#[test]
fn mass_matches_numerical_integration() {
    for lambda in [-0.4, -0.25, 0.0, 0.5, 1.0, 2.0, 3.5] {
        let oracle = mass_oracle(lambda);
        let closed = weight_mass(lambda);
        assert!(((closed - oracle) / oracle).abs() < 1e-10, "lambda {lambda}: {closed} vs {oracle}");
    }
}

#[test]
fn christoffel_sum_for_lambda_minus_point_four() {
    let basis = GegenbauerBasis::new(-0.4, 12).unwrap();
    assert_eq!(basis.len(), 13);
    let sum: f64 = basis.christoffel().iter().sum();
    let oracle = mass_oracle(-0.4);
    assert!(((sum - oracle) / oracle).abs() < 1e-12, "{sum} vs {oracle}");
    assert!((sum - 11.323086975215753).abs() < 1e-11);
}

#[test]
fn christoffel_sums_match_mass_on_the_grid() {
    for lambda in LAMBDAS {
        for m in [1, 4, 12, 40] {
            let basis = GegenbauerBasis::new(lambda, m).unwrap();
            let sum: f64 = basis.christoffel().iter().sum();
            let mass = weight_mass(lambda);
            assert!(((sum - mass) / mass).abs() < 1e-12, "lambda {lambda} M {m}");
            assert!(basis.christoffel().iter().all(|&w| w > 0.0));
        }
    }
}

#[test]
fn linear_primitive_rows() {
    for lambda in LAMBDAS {
        let basis = GegenbauerBasis::new(lambda, 9).unwrap();
        let q = build_integration_matrix(&basis);
        let out = q.apply(basis.nodes());
        for (l, &z) in basis.nodes().iter().enumerate() {
            assert!((out[l] - (z * z - 1.0) / 2.0).abs() < 1e-14);
        }
    }
}

#[test]
fn shifted_row_sums_are_shifted_nodes() {
    let basis = GegenbauerBasis::new(-0.4, 10).unwrap();
    let tq = shift_integration_matrix(&build_integration_matrix(&basis), 0.2).unwrap();
    let grid = basis.time_grid(0.2).unwrap();
    for (l, &t) in grid.nodes().iter().enumerate() {
        assert!((tq.entries().row(l).sum() - t).abs() < 1e-14);
    }
    assert!(grid.nodes()[0] > 0.0 && *grid.nodes().last().unwrap() < 0.2);
}

#[test]
fn sigma_min_decays_toward_the_singular_index() {
    for m in [4, 40, 80] {
        let smin = |lambda: f64| {
            let q = build_integration_matrix(&GegenbauerBasis::new(lambda, m).unwrap());
            *singular_values(q.entries()).unwrap().last().unwrap()
        };
        let (a, b, c) = (smin(-0.4999), smin(-0.49), smin(-0.4));
        assert!(a < b && b < c, "M {m}: {a} {b} {c}");
    }
}

#[test]
fn interpolation_at_fifty_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for lambda in LAMBDAS {
        for m in [4, 12, 40] {
            let basis = GegenbauerBasis::new(lambda, m).unwrap();
            let coeffs: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = |x: f64| coeffs.iter().enumerate().map(|(k, c)| c * cheb(k, x)).sum::<f64>();
            let samples: Vec<Complex64> = basis.nodes().iter().map(|&z| Complex64::new(p(z), -p(z))).collect();
            for _ in 0..50 {
                let t: f64 = rng.gen_range(-1.0..=1.0);
                let got = basis.interpolate(&samples, t);
                let want = p(t);
                let scale = want.abs().max(1.0);
                assert!((got.re - want).abs() < 1e-12 * scale);
                assert!((got.im + want).abs() < 1e-12 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_matrix_exact_for_degree_m(
        lambda in prop::sample::select(LAMBDAS.to_vec()),
        m in 4usize..=40,
        seed in any::<u64>(),
    ) {
        let basis = GegenbauerBasis::new(lambda, m).unwrap();
        let q = build_integration_matrix(&basis);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm: f64 = coeffs.iter().map(|c| c.abs()).sum();
        let samples: Vec<f64> = basis
            .nodes()
            .iter()
            .map(|&z| coeffs.iter().enumerate().map(|(k, c)| c * cheb(k, z)).sum())
            .collect();
        let out = q.apply(&samples);
        for (l, &z) in basis.nodes().iter().enumerate() {
            let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c * cheb_primitive(k, z)).sum();
            prop_assert!((out[l] - exact).abs() <= 1e-12 * (1.0 + norm));
            prop_assert!((q.entries().row(l).sum() - (z + 1.0)).abs() <= 1e-13);
        }
    }

    #[test]
    fn nodes_and_weights_are_symmetric(lambda in -0.45f64..3.0, m in 1usize..=60) {
        let basis = GegenbauerBasis::new(lambda, m).unwrap();
        let (z, w) = (basis.nodes(), basis.christoffel());
        for l in 0..=m {
            prop_assert!((z[m - l] + z[l]).abs() <= 1e-13);
            prop_assert!((w[m - l] - w[l]).abs() <= 1e-13 * w[l].max(1.0));
            prop_assert!(z[l] > -1.0 && z[l] < 1.0);
        }
        prop_assert!(z.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn barycentric_signs_alternate(lambda in -0.45f64..3.0, m in 1usize..=60) {
        let basis = GegenbauerBasis::new(lambda, m).unwrap();
        let xi = basis.bary_weights();
        let s = xi[0].signum();
        for (l, &x) in xi.iter().enumerate() {
            let expected = if l % 2 == 0 { s } else { -s };
            prop_assert_eq!(x.signum(), expected);
        }
    }

    #[test]
    fn interpolation_reproduces_constants(lambda in -0.45f64..3.0, m in 1usize..=40, c in -10.0f64..10.0, t in -1.0f64..=1.0) {
        let basis = GegenbauerBasis::new(lambda, m).unwrap();
        let values = vec![c; m + 1];
        prop_assert!((basis.interpolate_real(&values, t) - c).abs() <= 1e-13 * c.abs().max(1.0));
    }

    #[test]
    fn shift_scales_every_entry(m in 1usize..=20, horizon in 1e-3f64..50.0) {
        let basis = GegenbauerBasis::new(0.3, m).unwrap();
        let q = build_integration_matrix(&basis);
        let tq = shift_integration_matrix(&q, horizon).unwrap();
        for (a, b) in q.entries().iter().zip(tq.entries().iter()) {
            prop_assert_eq!(*b, a * horizon / 2.0);
        }
    }
}
