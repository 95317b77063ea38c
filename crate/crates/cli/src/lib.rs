//! Command-line front end: argument parsing, polynomial I/O, result records and run manifests.
//!
//! [`run`] is the whole program; `main` only forwards the process arguments and exit code.

pub mod args;
mod commands;
pub mod manifest;
pub mod output;
pub mod records;

use std::ffi::OsString;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use nag_core::error::ErrorKind;
use nag_core::NagError;

use args::{Cli, Command};
use manifest::{Manifest, RunConfig, MANIFEST_SCHEMA};
use output::{emit_json, Real, SCHEMA_VERSION};

pub use commands::load_poly;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] NagError),

    #[error("{path}: {source}")]
    Invalid { path: String, source: NagError },

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },

    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        CliError::Csv { path: path.display().to_string(), source }
    }

    /// 2 input, 3 resource guard, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Resource => 3,
                ErrorKind::Numerical => 4,
            },
            _ => 2,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let raw: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let Some(argv) = raw.iter().map(|a| a.to_str().map(String::from)).collect::<Option<Vec<_>>>() else {
        eprintln!("nag: error: arguments must be valid UTF-8");
        return 2;
    };
    match execute(&argv) {
        Ok(()) => 0,
        Err(Exit::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(Exit::Failed(e)) => {
            let hint = match &e {
                CliError::Core(NagError::SizeLimit { guard: "grid points", .. }) => " (raise with --max-grid or NAG_MAX_GRID)",
                _ => "",
            };
            eprintln!("nag: error: {e}{hint}");
            e.exit_code()
        }
    }
}

enum Exit {
    Clap(clap::Error),
    Failed(CliError),
}

impl From<CliError> for Exit {
    fn from(e: CliError) -> Self {
        Exit::Failed(e)
    }
}

/// What a command hands back for emission.
pub(crate) struct Outcome {
    pub json: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub max_depth: Option<u32>,
    pub max_steps: Option<usize>,
    pub bounds: std::collections::BTreeMap<String, Real>,
}

fn execute(argv: &[String]) -> Result<(), Exit> {
    let cli = Cli::try_parse_from(argv).map_err(Exit::Clap)?;
    match &cli.command {
        Command::Schema => {
            print!("{MANIFEST_SCHEMA}");
            return Ok(());
        }
        Command::Rerun(r) => {
            let text = std::fs::read_to_string(&r.manifest).map_err(|e| CliError::io(&r.manifest, e))?;
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Json { path: r.manifest.display().to_string(), source: e })?;
            if m.argv.get(1).is_some_and(|a| a == "rerun") {
                return Err(CliError::Usage("manifest records a rerun; refusing to recurse".into()).into());
            }
            return execute(&m.argv);
        }
        _ => {}
    }
    if let Some(limit) = cli.max_grid {
        std::env::set_var(nag_core::grid::GRID_ENV, limit.to_string());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let outcome = pool.install(|| commands::dispatch(&cli.command))?;
    let wall = start.elapsed().as_secs_f64();

    let text = &outcome.json;
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e))?,
        None => {
            use std::io::Write;
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    let manifest_path = cli.manifest.clone().or_else(|| cli.out.as_ref().map(|p| {
        let mut s = p.clone().into_os_string();
        s.push(".manifest.json");
        PathBuf::from(s)
    }));
    if let Some(path) = manifest_path {
        let mut outputs: Vec<String> = cli.out.iter().map(|p| p.display().to_string()).collect();
        outputs.extend(outcome.outputs.iter().cloned());
        let config = RunConfig {
            command: cli.command.name().into(),
            inputs: outcome.inputs.clone(),
            seed: outcome.seed,
            threads: cli.threads,
            caps: manifest::Caps {
                max_grid_points: u64::try_from(nag_core::grid::max_grid_points()).unwrap_or(u64::MAX),
                max_cloud_size: nag_core::homology::MAX_NERVE_POINTS,
                max_depth: outcome.max_depth,
                max_steps: outcome.max_steps,
            },
            outputs,
            args: cli.command.clone(),
        };
        let m = Manifest {
            schema_version: SCHEMA_VERSION,
            command: cli.command.name().into(),
            argv: argv.to_vec(),
            config,
            seed: outcome.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_s: Real(wall),
            bounds: outcome.bounds,
        };
        emit_json(&m, Some(&path))?;
    }
    Ok(())
}
