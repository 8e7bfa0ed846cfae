//! Experiment harness for the `ffkr` library: configuration, dispatch,
//! reports, a content-addressed result cache and the surface summary table.

pub mod cache;
pub mod config;
pub mod figure;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use thiserror::Error;

pub use cache::{Cache, CacheError};
pub use config::{Cli, Command, ExperimentConfig, Format};
pub use report::{Check, ExperimentReport};
pub use run::run;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of the environment variable overriding the results directory.
pub const RESULTS_DIR_ENV: &str = "FFKR_RESULTS_DIR";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] ffkr::Error),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 2 for unusable input, 1 for everything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        use ffkr::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Library(e) => match e {
                E::NotPrime(_)
                | E::EvenCharacteristic
                | E::DegreeTooLarge { .. }
                | E::ZeroDegree
                | E::NotQuadraticExtension(_)
                | E::CharacteristicTooSmall { .. }
                | E::UnsupportedDimension(_)
                | E::WrongSurfaceKind
                | E::NoClosedForm { .. }
                | E::UnknownWitness(_)
                | E::MinusOneIsSquare
                | E::ImproperSlope(_)
                | E::DegenerateHeights
                | E::InvalidExponent(_)
                | E::InvalidInput(_) => 2,
                _ => 1,
            },
            HarnessError::Cache(_) | HarnessError::Io(_) => 1,
        }
    }
}

/// Parses arguments, runs the experiment, writes the report and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = report::render(&report, cli.format);
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 1;
            }
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<ExperimentReport, HarnessError> {
    let config = ExperimentConfig::from_cli(cli);
    if let Command::Cache(config::CacheCmd::Gc) = config.command {
        return run::cache_gc(&config, &Cache::from_env());
    }
    if !cli.cache {
        return run(&config);
    }
    let cache = Cache::from_env();
    match cache.load(&config) {
        Ok(report) => Ok(report),
        Err(CacheError::Miss(_)) => {
            let report = run(&config)?;
            cache.store(&report)?;
            Ok(report)
        }
        Err(e) => Err(e.into()),
    }
}
