//! Problem data for periodic advection-diffusion, the built-in test problems
//! and the flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{FgigError, Result};
use crate::gegenbauer::LAMBDA_GUARD;

pub type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldSampler = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `u_t + mu u_x = nu u_xx` on `[0, L] x [0, T]`, `L`-periodic in `x`, with
/// `u(x, 0) = u0(x)` and `u(0, t) = u(L, t) = g(t)`.
#[derive(Clone)]
pub struct AdProblem {
    pub name: String,
    pub mu: f64,
    pub nu: f64,
    pub period: f64,
    pub horizon: f64,
    pub u0: Sampler,
    pub g: Sampler,
    pub exact: Option<FieldSampler>,
    pub exact_dx: Option<FieldSampler>,
}

impl fmt::Debug for AdProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdProblem")
            .field("name", &self.name)
            .field("mu", &self.mu)
            .field("nu", &self.nu)
            .field("period", &self.period)
            .field("horizon", &self.horizon)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl AdProblem {
    /// Problem without a known solution. Validates the coefficients and the
    /// compatibility `u0(0) = g(0)`.
    pub fn new(
        name: impl Into<String>,
        mu: f64,
        nu: f64,
        period: f64,
        horizon: f64,
        u0: Sampler,
        g: Sampler,
    ) -> Result<Self> {
        let problem = Self {
            name: name.into(),
            mu,
            nu,
            period,
            horizon,
            u0,
            g,
            exact: None,
            exact_dx: None,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_exact(mut self, exact: FieldSampler, exact_dx: Option<FieldSampler>) -> Self {
        self.exact = Some(exact);
        self.exact_dx = exact_dx;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FgigError::InvalidProblem(msg));
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return bad(format!("advection velocity must be >= 0, got {}", self.mu));
        }
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return bad(format!("diffusion coefficient must be >= 0, got {}", self.nu));
        }
        if !(self.period > 0.0) || !self.period.is_finite() {
            return bad(format!("spatial period must be > 0, got {}", self.period));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(FgigError::InvalidHorizon(self.horizon));
        }
        let gap = ((self.u0)(0.0) - (self.g)(0.0)).abs();
        if gap > 1e-12 {
            return bad(format!("u0(0) and g(0) differ by {gap:e}"));
        }
        Ok(())
    }

    pub fn u0(&self, x: f64) -> f64 {
        (self.u0)(x)
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    /// Decaying travelling harmonic `exp(-nu w^2 t) sin(w (x - mu t) + phase)`
    /// with `w = 2 pi / L`, boundary data taken from the exact solution.
    pub fn travelling_wave(mu: f64, nu: f64, period: f64, horizon: f64, phase: f64) -> Result<Self> {
        let w = 2.0 * PI / period;
        let exact = move |x: f64, t: f64| (-nu * w * w * t).exp() * (w * (x - mu * t) + phase).sin();
        let exact_dx =
            move |x: f64, t: f64| w * (-nu * w * w * t).exp() * (w * (x - mu * t) + phase).cos();
        Ok(Self::new(
            "travelling_wave",
            mu,
            nu,
            period,
            horizon,
            Arc::new(move |x| (w * x + phase).sin()),
            Arc::new(move |t| exact(0.0, t)),
        )?
        .with_exact(Arc::new(exact), Some(Arc::new(exact_dx))))
    }
}

/// Built-in test problem `id` (1, 2 or 3) with its default horizon.
pub fn test_problem(id: i64) -> Result<AdProblem> {
    match id {
        1 => Ok(AdProblem::new(
            "TP1",
            0.0,
            1.0,
            2.0,
            0.2,
            Arc::new(|x| (PI * x).sin()),
            Arc::new(|_| 0.0),
        )?
        .with_exact(
            Arc::new(|x, t| (-PI * PI * t).exp() * (PI * x).sin()),
            Some(Arc::new(|x, t| PI * (-PI * PI * t).exp() * (PI * x).cos())),
        )),
        2 => Ok(AdProblem::new(
            "TP2",
            0.0,
            1.0 / (PI * PI),
            2.0,
            1.0,
            Arc::new(|x| (PI * x).sin()),
            Arc::new(|_| 0.0),
        )?
        .with_exact(
            Arc::new(|x, t| (-t).exp() * (PI * x).sin()),
            Some(Arc::new(|x, t| PI * (-t).exp() * (PI * x).cos())),
        )),
        3 => {
            let (mu, nu, l) = (0.01, 0.1, 2.0);
            Ok(AdProblem::new(
                "TP3",
                mu,
                nu,
                l,
                0.1,
                Arc::new(move |x| (2.0 * PI * x / l).sin()),
                Arc::new(move |t| -(-PI * PI * nu * t).exp() * (2.0 * PI * mu * t / l).sin()),
            )?
            .with_exact(
                Arc::new(move |x, t| -(-PI * PI * nu * t).exp() * (PI * (mu * t - 2.0 * x / l)).sin()),
                Some(Arc::new(move |x, t| {
                    (2.0 * PI / l) * (-PI * PI * nu * t).exp() * (PI * (mu * t - 2.0 * x / l)).cos()
                })),
            ))
        }
        other => Err(FgigError::UnknownProblem(other)),
    }
}

/// Discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Spatial mode cutoff; modes `-N/2..=N/2`.
    pub n: usize,
    /// Sample count for the initial-condition interpolant.
    pub n0: usize,
    /// Highest time-node index; `M + 1` Gegenbauer-Gauss nodes.
    pub m: usize,
    pub lambda: f64,
}

impl SolverConfig {
    pub const DEFAULT_LAMBDA: f64 = -0.4;

    /// `N0 = N + 2`, `lambda = -0.4`.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Self::with_all(n, n + 2, m, Self::DEFAULT_LAMBDA)
    }

    pub fn with_all(n: usize, n0: usize, m: usize, lambda: f64) -> Result<Self> {
        let cfg = Self { n, n0, m, lambda };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |key: &str, message: String| {
            Err(FgigError::Config {
                key: key.to_string(),
                message,
            })
        };
        if self.n < 2 || self.n % 2 != 0 {
            return err("N", format!("N must be even and >= 2, got {}", self.n));
        }
        if self.n0 % 2 != 0 {
            return err("N0", format!("N0 must be even, got {}", self.n0));
        }
        if self.n0 <= self.n {
            return err("N0", format!("N0 must exceed N = {}, got {}", self.n, self.n0));
        }
        if self.m < 1 {
            return err("M", format!("M must be >= 1, got {}", self.m));
        }
        if !(self.lambda > -0.5 + LAMBDA_GUARD) || !self.lambda.is_finite() {
            return err(
                "lambda",
                format!("lambda must exceed -1/2 + {LAMBDA_GUARD}, got {}", self.lambda),
            );
        }
        Ok(())
    }
}

/// Optional sweep and benchmark settings carried in the same config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudySettings {
    pub sweep_n: Option<Vec<usize>>,
    pub sweep_m: Option<Vec<usize>>,
    pub lambda_list: Option<Vec<f64>>,
    pub m_list: Option<Vec<usize>>,
    pub repeats: Option<usize>,
}

/// Everything a run config file describes.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: AdProblem,
    pub solver: SolverConfig,
    /// Evaluation time for error reports; defaults to the horizon `T`.
    pub t_final: f64,
    pub study: StudySettings,
}

const KNOWN_KEYS: &[&str] = &[
    "problem_id",
    "mu",
    "nu",
    "L",
    "T",
    "N",
    "N0",
    "M",
    "lambda",
    "t_final",
    "u0",
    "g",
    "sweep_N",
    "sweep_M",
    "lambda_list",
    "M_list",
    "repeats",
];

fn config_err(key: &str, message: impl Into<String>) -> FgigError {
    FgigError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(line, format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(config_err(key, "unknown key"));
            }
            if map.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(config_err(key, "duplicate key"));
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| config_err(key, format!("expected a real number, got '{v}'")))
            })
            .transpose()
    }

    fn int(&self, key: &str) -> Result<Option<i64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<i64>()
                    .map_err(|_| config_err(key, format!("expected an integer, got '{v}'")))
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.int(key)? {
            Some(v) if v < 0 => Err(config_err(key, format!("must be non-negative, got {v}"))),
            Some(v) => Ok(Some(v as usize)),
            None => Ok(None),
        }
    }

    fn required_count(&self, key: &str) -> Result<usize> {
        self.count(key)?.ok_or_else(|| config_err(key, "missing required key"))
    }

    fn required_float(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| config_err(key, "missing required key"))
    }

    /// `a,b,c` or `start:end` or `start:step:end` (inclusive).
    fn int_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| config_err(key, format!("expected a non-negative integer, got '{s}'")))
        };
        let list = if v.contains(':') {
            let parts: Vec<usize> = v.split(':').map(parse).collect::<Result<_>>()?;
            let (start, step, end) = match parts[..] {
                [a, b] => (a, 1, b),
                [a, s, b] => (a, s, b),
                _ => return Err(config_err(key, format!("malformed range '{v}'"))),
            };
            if step == 0 || end < start {
                return Err(config_err(key, format!("empty or invalid range '{v}'")));
            }
            (start..=end).step_by(step).collect()
        } else {
            v.split(',').map(parse).collect::<Result<Vec<_>>>()?
        };
        if list.is_empty() {
            return Err(config_err(key, "list is empty"));
        }
        Ok(Some(list))
    }

    fn float_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let list = v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| config_err(key, format!("expected a real number, got '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(list))
    }
}

fn custom_problem(kv: &KeyValues) -> Result<AdProblem> {
    let mu = kv.required_float("mu")?;
    let nu = kv.required_float("nu")?;
    let period = kv.required_float("L")?;
    let horizon = kv.required_float("T")?;
    let phase = match kv.raw("u0") {
        Some("sine") => 0.0,
        Some("cosine") => PI / 2.0,
        Some(other) => {
            return Err(config_err("u0", format!("unknown initial condition '{other}' (expected sine or cosine)")))
        }
        None => return Err(config_err("u0", "missing required key for a custom problem")),
    };
    match kv.raw("g") {
        Some("travelling") => AdProblem::travelling_wave(mu, nu, period, horizon, phase),
        Some("zero") => {
            let w = 2.0 * PI / period;
            AdProblem::new(
                "custom",
                mu,
                nu,
                period,
                horizon,
                Arc::new(move |x| (w * x + phase).sin()),
                Arc::new(|_| 0.0),
            )
        }
        Some(other) => Err(config_err("g", format!("unknown boundary function '{other}' (expected travelling or zero)"))),
        None => Err(config_err("g", "missing required key for a custom problem")),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;

        let problem = match kv.int("problem_id")? {
            Some(id) => {
                for key in ["mu", "nu", "L", "u0", "g"] {
                    if kv.raw(key).is_some() {
                        return Err(config_err(key, "cannot be combined with problem_id"));
                    }
                }
                let p = test_problem(id).map_err(|e| config_err("problem_id", e.to_string()))?;
                match kv.float("T")? {
                    Some(t) => p.with_horizon(t).map_err(|e| config_err("T", e.to_string()))?,
                    None => p,
                }
            }
            None => custom_problem(&kv)?,
        };

        let n = kv.required_count("N")?;
        let n0 = kv.count("N0")?.unwrap_or(n + 2);
        let m = kv.required_count("M")?;
        let lambda = kv.float("lambda")?.unwrap_or(SolverConfig::DEFAULT_LAMBDA);
        let solver = SolverConfig::with_all(n, n0, m, lambda)?;

        let t_final = kv.float("t_final")?.unwrap_or(problem.horizon);
        if !(0.0..=problem.horizon).contains(&t_final) {
            return Err(config_err(
                "t_final",
                format!("must lie in [0, T = {}], got {t_final}", problem.horizon),
            ));
        }

        let study = StudySettings {
            sweep_n: kv.int_list("sweep_N")?,
            sweep_m: kv.int_list("sweep_M")?,
            lambda_list: kv.float_list("lambda_list")?,
            m_list: kv.int_list("M_list")?,
            repeats: kv.count("repeats")?,
        };

        Ok(Self {
            problem,
            solver,
            t_final,
            study,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FgigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Read a run config file and return the problem and solver settings.
pub fn load_config(path: impl AsRef<Path>) -> Result<(AdProblem, SolverConfig)> {
    let run = RunConfig::load(path)?;
    Ok((run.problem, run.solver))
}
