//! Experiment configuration: a flat `key = value` file plus command-line
//! overrides, merged into one validated [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use ailfem_core::adaptivity::{AdaptiveConfig, Refinement, StepSize, StoppingVariant};
use ailfem_core::problem::{builtin_problem, BUILTIN_PROBLEMS};

/// Environment variable that overrides the output directory of a run.
pub const OUTPUT_DIR_ENV: &str = "AILFEM_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("no problem given (use --problem or `problem = ...`; built-ins: {})", BUILTIN_PROBLEMS.join(", "))]
    MissingProblem,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriverKind {
    Idealized,
    Practical,
    Gailfem,
}

impl DriverKind {
    pub fn name(self) -> &'static str {
        match self {
            DriverKind::Idealized => "idealized",
            DriverKind::Practical => "practical",
            DriverKind::Gailfem => "gailfem",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "idealized" => Some(DriverKind::Idealized),
            "practical" => Some(DriverKind::Practical),
            "gailfem" => Some(DriverKind::Gailfem),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Option<String>,
    pub degree: usize,
    pub theta: f64,
    pub lambda: f64,
    pub c_mark: f64,
    pub stopping: StoppingVariant,
    pub refinement: Refinement,
    pub driver: DriverKind,
    /// Fixed step size, idealized driver only.
    pub delta: Option<f64>,
    pub l0: f64,
    pub beta: f64,
    pub budget: u64,
    pub eta_tol: f64,
    pub max_levels: usize,
    pub initial_refinements: usize,
    pub m_bound: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub csv: Option<String>,
    pub summary: Option<String>,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let core = AdaptiveConfig::default();
        ExperimentConfig {
            problem: None,
            degree: core.degree,
            theta: core.theta,
            lambda: core.lambda,
            c_mark: core.c_mark,
            stopping: core.stopping,
            refinement: core.refinement,
            driver: DriverKind::Practical,
            delta: None,
            l0: 1.0,
            beta: std::f64::consts::SQRT_2,
            budget: core.max_work,
            eta_tol: core.eta_tol,
            max_levels: core.max_levels,
            initial_refinements: core.initial_refinements,
            m_bound: None,
            out_dir: None,
            csv: None,
            summary: None,
            seed: 0,
            threads: None,
        }
    }
}

/// Keys accepted in config files and as `--key value` flags.
pub const KEYS: &[&str] = &[
    "problem",
    "m",
    "theta",
    "lambda",
    "c_mark",
    "stopping",
    "refinement",
    "driver",
    "delta",
    "l0",
    "beta",
    "budget",
    "eta_tol",
    "max_levels",
    "initial_refinements",
    "m_bound",
    "out_dir",
    "csv",
    "summary",
    "seed",
    "threads",
];

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn float(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|_| bad(key, value, "not a number"))?;
    if !v.is_finite() {
        return Err(bad(key, value, "must be finite"));
    }
    Ok(v)
}

fn count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| bad(key, value, "not a non-negative integer"))
}

/// Accepts `2000000` as well as `2e6`.
fn budget(key: &str, value: &str) -> Result<u64, ConfigError> {
    if let Ok(v) = value.parse::<u64>() {
        return Ok(v);
    }
    let v = float(key, value)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(bad(key, value, "not a non-negative integer"));
    }
    Ok(v as u64)
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "problem" => self.problem = Some(value.to_string()),
            "m" | "degree" => self.degree = count(key, value)?,
            "theta" => self.theta = float(key, value)?,
            "lambda" => self.lambda = float(key, value)?,
            "c_mark" => self.c_mark = float(key, value)?,
            "stopping" => {
                self.stopping = StoppingVariant::from_name(value)
                    .ok_or_else(|| bad(key, value, "expected ib, ib_prime or ib_double_prime"))?
            }
            "refinement" => {
                self.refinement =
                    Refinement::from_name(value).ok_or_else(|| bad(key, value, "expected nvb or bisec3"))?
            }
            "driver" => {
                self.driver =
                    DriverKind::parse(value).ok_or_else(|| bad(key, value, "expected idealized, practical or gailfem"))?
            }
            "delta" => self.delta = Some(float(key, value)?),
            "l0" => self.l0 = float(key, value)?,
            "beta" => self.beta = float(key, value)?,
            "budget" => self.budget = budget(key, value)?,
            "eta_tol" => self.eta_tol = float(key, value)?,
            "max_levels" => self.max_levels = count(key, value)?,
            "initial_refinements" => self.initial_refinements = count(key, value)?,
            "m_bound" => self.m_bound = Some(float(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(value.to_string()),
            "summary" => self.summary = Some(value.to_string()),
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value, "not a non-negative integer"))?,
            "threads" => {
                let n = count(key, value)?;
                if n == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
                self.threads = Some(n)
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text, path)
    }

    pub fn problem_name(&self) -> Result<&str, ConfigError> {
        self.problem.as_deref().ok_or(ConfigError::MissingProblem)
    }

    /// The core driver configuration; checks every cross-field rule.
    pub fn adaptive(&self) -> Result<AdaptiveConfig, ConfigError> {
        let name = self.problem_name()?;
        builtin_problem(name).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.driver == DriverKind::Gailfem && name != "goal" {
            return Err(ConfigError::Invalid(format!(
                "the gailfem driver runs the `goal` problem only, got `{name}`"
            )));
        }
        let step = match (self.driver, self.delta) {
            (DriverKind::Idealized, Some(d)) => StepSize::Fixed(d),
            (DriverKind::Idealized, None) => {
                return Err(ConfigError::Invalid("the idealized driver needs `delta`".into()))
            }
            (_, Some(_)) => {
                return Err(ConfigError::Invalid(
                    "`delta` applies to the idealized driver only; the step size of the others adapts from `l0`".into(),
                ))
            }
            (_, None) => StepSize::Adaptive {
                l0: self.l0,
                beta: self.beta,
            },
        };
        let cfg = AdaptiveConfig {
            theta: self.theta,
            lambda: self.lambda,
            c_mark: self.c_mark,
            step,
            stopping: self.stopping,
            refinement: self.refinement,
            degree: self.degree,
            max_work: self.budget,
            eta_tol: self.eta_tol,
            max_levels: self.max_levels,
            m_override: self.m_bound,
            initial_refinements: self.initial_refinements,
            ..AdaptiveConfig::default()
        };
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }

    /// Flag or config value, then the environment variable, then `results`.
    pub fn output_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("results"))
    }

    fn stem(&self) -> String {
        format!(
            "{}_{}_m{}",
            self.problem.as_deref().unwrap_or("run"),
            self.driver.name(),
            self.degree
        )
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output_dir()
            .join(self.csv.clone().unwrap_or_else(|| format!("{}.csv", self.stem())))
    }

    pub fn summary_path(&self) -> PathBuf {
        self.output_dir()
            .join(self.summary.clone().unwrap_or_else(|| format!("{}.json", self.stem())))
    }

    pub fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
