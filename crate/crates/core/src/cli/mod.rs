//! Command-line harness: one subcommand per experiment, CSV or JSON output
//! with a parameter echo, and an optional result cache.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use commands::{
    ConstantsArgs, CriterionArgs, DiagnosticsArgs, FitArgs, GramArgs, Inputs, Lemma23Args, ResiduesArgs,
};
use config::{CommonArgs, Format, Settings};
use output::{render, run_key, sha256_hex, Cache, Params, RunRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "nbbd", version, about = "Numerical experiments around the Nyman-Beurling-Baez-Duarte criterion")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Euler's constant, log 4pi, 2 + gamma - log 4pi and the zero sums
    Constants(ConstantsArgs),
    /// Criterion integral for the mollifier V_N or for the counterfactual model
    Criterion(CriterionArgs),
    /// Exact distances d_N^2 from the Gram system of the dilation family
    Gram(GramArgs),
    /// Reconstruction of V_N(s) from its residue decomposition
    Lemma23(Lemma23Args),
    /// Individual residues and residue sums at one point
    Residues(ResiduesArgs),
    /// Main off-line term on an N grid and the fitted oscillation constants
    Fit(FitArgs),
    /// Load a zero table and list zeta' at each zero
    ZerosIngest,
    /// Growth diagnostics of zero data and of |zeta| on the line
    Diagnostics(DiagnosticsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Criterion(_) => "criterion",
            Command::Gram(_) => "gram",
            Command::Lemma23(_) => "lemma23",
            Command::Residues(_) => "residues",
            Command::Fit(_) => "fit",
            Command::ZerosIngest => "zeros-ingest",
            Command::Diagnostics(_) => "diagnostics",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Fit(_) | Command::Diagnostics(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Runs one parsed invocation and returns the rendered payload.
pub fn execute(cli: &Cli) -> Result<String> {
    let settings = Settings::resolve(&cli.common)?;
    if let Some(threads) = settings.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let format = settings.format.unwrap_or_else(|| cli.command.default_format());
    let inputs = Inputs::new(&settings)?;
    let mut params = Params::new();
    params.insert("command".into(), cli.command.name().into());
    params.insert("version".into(), VERSION.into());

    let start = Instant::now();
    let job = match &cli.command {
        Command::Constants(a) => commands::constants(&inputs, a, params),
        Command::Criterion(a) => commands::criterion(&settings, &inputs, a, params),
        Command::Gram(a) => commands::gram(&settings, a, params),
        Command::Lemma23(a) => commands::lemma23(&inputs, a, params),
        Command::Residues(a) => commands::residues(&settings, &inputs, a, params),
        Command::Fit(a) => commands::fit(&settings, &inputs, a, params),
        Command::ZerosIngest => commands::zeros_ingest(&inputs, params),
        Command::Diagnostics(a) => commands::diagnostics(&inputs, a, params),
    }?;
    let params = job.params;
    let key = run_key(&params, format);
    let cache = settings.cache_dir.as_deref().map(Cache::new).transpose()?;
    if let Some(hit) = cache.as_ref().and_then(|c| c.lookup(&key, format)) {
        eprintln!("nbbd: {} served from cache {key}", cli.command.name());
        return Ok(hit);
    }
    let report = (job.run)()?;
    let payload = render(&params, &report, format)?;
    if let Some(cache) = &cache {
        let record = RunRecord {
            subcommand: cli.command.name(),
            params: &params,
            version: VERSION,
            key: &key,
            output_sha256: sha256_hex(payload.as_bytes()),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        };
        cache.store(&key, format, &payload, &record)?;
    }
    eprintln!(
        "nbbd: {} finished in {:.2} s",
        cli.command.name(),
        start.elapsed().as_secs_f64()
    );
    Ok(payload)
}

fn emit(settings_out: Option<&std::path::Path>, payload: &str) -> Result<()> {
    match settings_out {
        Some(path) => std::fs::write(path, payload).map_err(|e| Error::io(path.display().to_string(), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Entry point of the `nbbd` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|payload| {
        let out = Settings::resolve(&cli.common)?.out;
        emit(out.as_deref(), &payload)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nbbd: error: {e}");
            ExitCode::FAILURE
        }
    }
}
