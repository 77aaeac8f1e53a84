use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::Settings;
use crate::{CliError, Outcome, WORKERS_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "poisson-sums",
    version,
    about = "Uniform Fourier-sum errors on generalized Poisson classes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact scaled errors and main terms, one row per n.
    Compute(RunArgs),
    /// Pass/fail table over the verification suites.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// all, kernel, decomposition, lemmas or asymptotics.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Print the thresholds n0, n1 and n2.
    Thresholds(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Exponent in [1, ∞]; `inf` for ∞.
    #[arg(long)]
    pub p: Option<String>,
    /// `N1,N2,...` or `start:stop:factor`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key=value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self, suite: Option<String>) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            alpha: self.alpha.clone(),
            r: self.r.clone(),
            beta: self.beta.clone(),
            p: self.p.clone(),
            n: self.n.clone(),
            eps: self.eps.clone(),
            tol: self.tol.clone(),
            format: self.format.clone(),
            out: self.out.as_ref().map(|p| p.display().to_string()),
            suite,
        };
        Ok(base.layered(flags))
    }
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got {raw:?}"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

/// Runs a parsed command; output goes to `--out` when given and is also returned.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (args, suite) = match &cli.command {
        Command::Compute(a) | Command::Thresholds(a) => (a, None),
        Command::Verify { run, suite } => (run, suite.clone()),
    };
    let cfg = args.settings(suite)?.resolve()?;
    let pool = worker_pool()?;
    let mut outcome = pool.install(|| match cli.command {
        Command::Compute(_) => commands::compute(&cfg),
        Command::Verify { .. } => commands::verify(&cfg),
        Command::Thresholds(_) => commands::thresholds(&cfg),
    })?;
    if let Some(path) = &cfg.out {
        fs::write(path, &outcome.output)?;
        outcome.written_to = Some(path.clone());
    }
    Ok(outcome)
}
