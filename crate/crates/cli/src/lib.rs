//! Command-line front end: JSON family documents in, JSON reports out.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use hpd_core::cech::Settings;
use hpd_core::family::FamilySpec;

pub use commands::execute;

pub const REPORT_SCHEMA: &str = "hpd-report/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path} at line {line}, column {column}: {message}")]
    Json { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hpd_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hpd_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Json { .. } | CliError::Usage(_) => 2,
            CliError::Core(
                E::Parse { .. }
                | E::InvalidParams(_)
                | E::UnsupportedAtlas(_)
                | E::InhomogeneousBase
                | E::DegreeMismatch { .. }
                | E::MissingInverse { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Usage(_) => "usage",
            CliError::Core(hpd_core::Error::Parse { .. }) => "parse",
            CliError::Core(_) => "core",
        }
    }

    /// Structured form written to stderr under `--json`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } });
        match self {
            CliError::Json { path, line, column, .. } => {
                v["error"]["location"] = serde_json::json!({ "path": path, "line": line, "column": column });
            }
            CliError::Core(hpd_core::Error::Parse { offset, .. }) => {
                v["error"]["location"] = serde_json::json!({ "offset": offset });
            }
            _ => {}
        }
        v
    }
}

#[derive(Debug, Parser)]
#[command(name = "hpd", version, about = "Exact deformation theory of holomorphic Poisson structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Family document (JSON).
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Truncation order V.
    #[arg(long)]
    pub order: Option<u32>,
    /// Total weight window LO:HI for cohomology slices.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub weight_window: Option<[i64; 2]>,
    /// Half-width E of the exponent box.
    #[arg(long = "box")]
    pub box_size: Option<i64>,
    /// Print the JSON report instead of a summary.
    #[arg(long)]
    pub json: bool,
    /// Cap on worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn settings(&self) -> Settings {
        let d = Settings::default();
        Settings { window: self.weight_window.unwrap_or(d.window), box_size: self.box_size.unwrap_or(d.box_size) }
    }
}

fn parse_window(s: &str) -> Result<[i64; 2], String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok([lo, hi])
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check atlas, Poisson and invariance identities.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Hypercohomology of the central fiber.
    Cohomology {
        #[command(flatten)]
        common: Common,
        /// Base bivector on the first chart (defaults to the family's central fiber).
        #[arg(long)]
        lambda0: Option<String>,
        /// Degree.
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
    },
    /// Poisson Kodaira-Spencer matrix at t = 0.
    Ks {
        #[command(flatten)]
        common: Common,
    },
    /// First-order cocycle along a parameter direction.
    Infinitesimal {
        #[command(flatten)]
        common: Common,
        /// Comma-separated direction, e.g. 1,0,0 (rationals allowed).
        #[arg(long)]
        direction: String,
    },
    /// Order-by-order Maurer-Cartan solve from an H^1 basis.
    McExist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda0: Option<String>,
    },
    /// Recover a test family as a pullback of the target family.
    McComplete {
        #[command(flatten)]
        common: Common,
        /// Test family document.
        #[arg(long)]
        test: PathBuf,
    },
    /// Print one of the bundled family documents.
    Example {
        #[command(flatten)]
        common: Common,
        /// p2, p2-full, hopf, hopf-free, hirzebruch, torus
        name: String,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Cohomology { common, .. }
            | Command::Ks { common }
            | Command::Infinitesimal { common, .. }
            | Command::McExist { common, .. }
            | Command::McComplete { common, .. }
            | Command::Example { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Cohomology { .. } => "cohomology",
            Command::Ks { .. } => "ks",
            Command::Infinitesimal { .. } => "infinitesimal",
            Command::McExist { .. } => "mc-exist",
            Command::McComplete { .. } => "mc-complete",
            Command::Example { .. } => "example",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub settings: serde_json::Value,
    pub passed: bool,
    pub results: serde_json::Value,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// What the binary should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn read_family(path: &std::path::Path) -> Result<FamilySpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Runs a parsed invocation and renders its output; never panics on bad input.
pub fn run(cli: &Cli) -> Outcome {
    let common = cli.command.common();
    let result = match common.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(CliError::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => execute(&cli.command),
    };
    match result {
        Ok(report) => {
            let json = if matches!(cli.command, Command::Example { .. }) {
                format!("{}\n", serde_json::to_string_pretty(&report.results).expect("serializes"))
            } else {
                report.to_json()
            };
            if let Some(out) = &common.out {
                if let Err(source) = std::fs::write(out, &json) {
                    return failure(&CliError::Io { path: out.clone(), source }, common.json);
                }
            }
            let stdout = if common.json || matches!(cli.command, Command::Example { .. }) {
                json
            } else {
                let mut s = report.summary.join("\n");
                s.push('\n');
                s
            };
            Outcome { code: if report.passed { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(e) => failure(&e, common.json),
    }
}

fn failure(e: &CliError, json: bool) -> Outcome {
    let stderr = if json { format!("{}\n", e.to_json()) } else { format!("error: {e}\n") };
    Outcome { code: e.exit_code(), stdout: String::new(), stderr }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("-4:4"), Ok([-4, 4]));
        assert_eq!(parse_window(" 0 : 2 "), Ok([0, 2]));
        assert!(parse_window("3:1").is_err());
        assert!(parse_window("3").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(hpd_core::Error::Parse { offset: 3, message: "x".into() }).exit_code(), 2);
        assert_eq!(CliError::Core(hpd_core::Error::NotSurjective { rank: 1, dim: 5 }).exit_code(), 1);
        let j = CliError::Core(hpd_core::Error::Parse { offset: 3, message: "x".into() }).to_json();
        assert_eq!(j["error"]["location"]["offset"], 3);
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(run_args(["hpd", "cohomology", "--weight-window", "5"]).code, 2);
        assert_eq!(run_args(["hpd", "nonsense"]).code, 2);
        assert_eq!(run_args(["hpd", "--help"]).code, 0);
    }
}
