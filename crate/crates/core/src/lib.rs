//! Fourier-Gegenbauer integral-Galerkin solver for the one-dimensional
//! advection-diffusion equation `u_t + mu u_x = nu u_xx` with periodic
//! boundary conditions.
//!
//! The spatial derivative of the solution is expanded in a truncated Fourier
//! series with time-dependent coefficients. Each coefficient obeys a scalar
//! Volterra integral equation which is collocated at shifted
//! Gegenbauer-Gauss nodes through a barycentric integration matrix, giving
//! `N/2` small independent complex linear systems and no time stepping.
//! A semi-analytic variant evaluates the same coefficients in closed form.
//!
//! ```
//! use fgig::{problem::test_problem, solver::solve_modes, SolverConfig};
//!
//! let tp1 = test_problem(1).unwrap().with_horizon(0.1).unwrap();
//! let config = SolverConfig::with_all(4, 6, 10, -0.4).unwrap();
//! let sol = solve_modes(&tp1, &config).unwrap();
//! let u = sol.evaluate_u(&sol.grid().unwrap(), 0.1).unwrap();
//! let exact = (-0.1 * std::f64::consts::PI.powi(2)).exp();
//! assert!((u[1] - exact).abs() < 1e-14);
//! ```

pub mod analysis;
pub mod error;
pub mod fourier;
pub mod gegenbauer;
pub mod linalg;
pub mod problem;
pub mod semianalytic;
pub mod solver;

pub use error::{FgigError, Result};
pub use fourier::{FourierGrid, InitialSpectrum, ModeCoefficients};
pub use gegenbauer::{GegenbauerBasis, IntegrationMatrix, TimeGrid};
pub use problem::{AdProblem, RunConfig, SolverConfig};
pub use semianalytic::SaField;
pub use solver::{SolveOptions, SpectralSolution};
