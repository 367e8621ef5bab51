//! Verification harness over `qsh-core`: named suites of checks, run
//! deterministically from a seed and collected into a versioned report.

pub mod ingest;
pub mod report;
pub mod suites;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use num_traits::Zero;
use qsh_core::Rational;
use rayon::prelude::*;
use serde::Serialize;

pub use ingest::{ingest_user_f, solution_to_json};
pub use report::{Check, Report, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] qsh_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for anything that prevents a report.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Model,
    Liealg,
    Curvature,
    Fiber,
    Flat,
    Symspace,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 6] = [
        Suite::Model,
        Suite::Liealg,
        Suite::Curvature,
        Suite::Fiber,
        Suite::Flat,
        Suite::Symspace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Model => "model",
            Suite::Liealg => "liealg",
            Suite::Curvature => "curvature",
            Suite::Fiber => "fiber",
            Suite::Flat => "flat",
            Suite::Symspace => "symspace",
            Suite::All => "all",
        }
    }

    /// Whether the suite is repeated for every `n`.
    pub fn depends_on_n(self) -> bool {
        !matches!(self, Suite::Fiber | Suite::Flat)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ns: Vec<usize>,
    pub kappa: Rational,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub suites: BTreeSet<Suite>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ns: vec![2, 3],
            kappa: qsh_core::rat(1, 1),
            seed: 0,
            trials: 100,
            tolerance: 1e-10,
            suites: BTreeSet::from([Suite::All]),
            input: None,
            output: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.ns.is_empty() {
            return usage("at least one --n is required".into());
        }
        if let Some(n) = self.ns.iter().find(|&&n| n < 2) {
            return usage(format!("n must be at least 2, got {n}"));
        }
        if self.kappa.is_zero() {
            return usage("kappa must be non-zero".into());
        }
        if self.trials == 0 {
            return usage("trials must be at least 1".into());
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return usage(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        if self.suites.is_empty() {
            return usage("no suites selected".into());
        }
        Ok(())
    }

    /// Selected suites with `all` expanded, in canonical order.
    pub fn expanded_suites(&self) -> Vec<Suite> {
        if self.suites.contains(&Suite::All) {
            Suite::CONCRETE.to_vec()
        } else {
            self.suites.iter().copied().collect()
        }
    }

    /// Tolerance for checks on transcendental closed forms, never below `1e-8`.
    pub fn closed_form_tolerance(&self) -> f64 {
        self.tolerance.max(1e-8)
    }
}

/// One unit of work: a suite at one `n`, or once for `n`-independent suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Job {
    pub suite: Suite,
    pub n: Option<usize>,
}

pub fn jobs(config: &RunConfig) -> Vec<Job> {
    let mut ns = config.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    config
        .expanded_suites()
        .into_iter()
        .flat_map(|suite| {
            if suite.depends_on_n() {
                ns.iter().map(|&n| Job { suite, n: Some(n) }).collect()
            } else {
                vec![Job { suite, n: None }]
            }
        })
        .collect()
}

/// Thread cap from `QSH_LAB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("QSH_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&k: &usize| k > 0)
}

/// Run every selected suite and assemble the report.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let user = config.input.as_deref().map(ingest_user_f).transpose()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap() {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let jobs = jobs(config);
    let results: Vec<Vec<Check>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| suites::run_job(*job, config, user.as_ref()))
            .collect()
    });
    Ok(Report::new(
        config,
        results.into_iter().flatten().collect(),
        start.elapsed(),
    ))
}
