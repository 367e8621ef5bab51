use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Duration;

use qsh_core::scalar::format_rational;
use serde::Serialize;
use serde_json::Value;

use crate::{CliError, Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub n: Option<usize>,
    pub name: &'static str,
    /// Mathematical statement the check verifies.
    pub anchor: &'static str,
    pub status: Status,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub wall_ms: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub n: Vec<usize>,
    pub kappa: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub suites: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: ConfigEcho,
    pub status: Status,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
    pub wall_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl Report {
    pub fn new(config: &RunConfig, checks: Vec<Check>, elapsed: Duration) -> Self {
        let failed = checks.iter().filter(|c| !c.passed()).count();
        Self {
            schema: SCHEMA_VERSION,
            config: ConfigEcho {
                n: config.ns.clone(),
                kappa: format_rational(&config.kappa),
                seed: config.seed,
                trials: config.trials,
                tolerance: config.tolerance,
                suites: config.expanded_suites().iter().map(|s| s.name()).collect(),
                input: config.input.as_ref().map(|p| p.display().to_string()),
            },
            status: if failed == 0 {
                Status::Pass
            } else {
                Status::Fail
            },
            passed: checks.len() - failed,
            failed,
            checks,
            wall_ms: ms(elapsed),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The JSON report with every `wall_ms` field removed.
    pub fn to_json_without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        strip_timing(&mut v);
        v
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let status = |s: Status| match s {
            Status::Pass => "pass",
            Status::Fail => "**FAIL**",
        };
        let _ = writeln!(out, "# qsh-lab report\n");
        let _ = writeln!(
            out,
            "seed {} | n {:?} | kappa {} | trials {} | tolerance {:e}\n",
            self.config.seed,
            self.config.n,
            self.config.kappa,
            self.config.trials,
            self.config.tolerance
        );
        let _ = writeln!(
            out,
            "{}: {} passed, {} failed in {:.1} s\n",
            status(self.status),
            self.passed,
            self.failed,
            self.wall_ms / 1e3
        );
        let _ = writeln!(
            out,
            "| suite | n | check | status | residual | ms | statement |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for c in &self.checks {
            let n = c.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {:.3e} | {:.0} | {} |",
                c.suite,
                n,
                c.name,
                status(c.status),
                c.residual,
                c.wall_ms,
                c.anchor.replace('|', "\\|")
            );
        }
        let failures: Vec<&Check> = self.checks.iter().filter(|c| !c.passed()).collect();
        if !failures.is_empty() {
            let _ = writeln!(out, "\n## Witnesses\n");
            for c in failures {
                let w = c.witness.as_ref().map(Value::to_string).unwrap_or_default();
                let _ = writeln!(out, "- `{}/{}`: {}", c.suite, c.name, w);
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
