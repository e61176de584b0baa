//! `latic`: rate curves, alignment checks and Monte Carlo runs for layered
//! lattice coding on 3-user Gaussian interference channels.

mod jobs;
mod manifest;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jobs::{AlignCheck, DofCurve, DofNonsym, Format, Job, MatrixFile, Simulate, SymRateCompare};
use latic::rates::DEFAULT_HK_GRID;
use latic::sim::SimConfig;
use manifest::{manifest_path, RunManifest};

/// Failure with its exit code: 2 for bad input, 3 for runtime trouble.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError {
            code: 3,
            message: e.to_string(),
        }
    }
}

impl From<latic::Error> for CliError {
    fn from(e: latic::Error) -> Self {
        CliError {
            code: if e.is_validation() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "latic", version, about, allow_negative_numbers = true)]
struct Cli {
    /// Master seed; overrides `master_seed` in simulation configs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file. A manifest is written next to it as
    /// `<out>.manifest.json`. Without it, output goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symmetric degrees of freedom against a².
    DofCurve {
        #[arg(long, value_parser = real)]
        a2_min: f64,
        #[arg(long, value_parser = real)]
        a2_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Space the samples logarithmically.
        #[arg(long)]
        log: bool,
    },
    /// Layered lattice rate against the Han-Kobayashi rate over a power sweep.
    SymRateCompare {
        /// Cross gain (not squared).
        #[arg(long, value_parser = real)]
        a: f64,
        #[arg(long, value_parser = real)]
        p_min: f64,
        #[arg(long, value_parser = real)]
        p_max: f64,
        #[arg(long, default_value_t = 61)]
        steps: usize,
        /// Power-split grid size for the HK search.
        #[arg(long, default_value_t = DEFAULT_HK_GRID)]
        hk_grid: usize,
    },
    /// Class membership, gain conditions and alignment scale factors for a
    /// channel matrix file.
    AlignCheck { matrix: PathBuf },
    /// Monte Carlo runs from a JSON config (one object or an array).
    Simulate { config: PathBuf },
    /// Layered rates and numeric DoF for gains (a1, a2, a3).
    DofNonsym {
        #[arg(long, value_parser = real)]
        a1: f64,
        #[arg(long, value_parser = real)]
        a2: f64,
        #[arg(long, value_parser = real)]
        a3: f64,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Re-run a manifest. Writes to the recorded output unless `--out` is given.
    Replay { manifest: PathBuf },
}

/// A decimal or a fraction such as `1/3`.
fn real(s: &str) -> Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once('/') {
        Some((num, den)) => Ok(parse(num)? / parse(den)?),
        None => parse(s),
    }
}

fn read_input(path: &Path, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {what} {}: {e}", path.display())))
}

fn load_configs(path: &Path, seed: Option<u64>) -> Result<Vec<SimConfig>, CliError> {
    let text = read_input(path, "config")?;
    let bad = |e: serde_json::Error| CliError::validation(format!("malformed config {}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    let mut configs: Vec<SimConfig> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value).map_err(bad)?,
        other => vec![serde_json::from_value(other).map_err(bad)?],
    };
    for cfg in &mut configs {
        if let Some(s) = seed {
            cfg.master_seed = s;
        }
        cfg.validate()?;
    }
    Ok(configs)
}

fn resolve(command: Command, seed: Option<u64>) -> Result<(Job, Option<u64>), CliError> {
    let job = match command {
        Command::DofCurve {
            a2_min,
            a2_max,
            steps,
            log,
        } => Job::DofCurve(DofCurve {
            a2_min,
            a2_max,
            steps,
            log_axis: log,
        }),
        Command::SymRateCompare {
            a,
            p_min,
            p_max,
            steps,
            hk_grid,
        } => Job::SymRateCompare(SymRateCompare {
            a,
            p_min,
            p_max,
            steps,
            hk_grid,
        }),
        Command::AlignCheck { matrix } => {
            let text = read_input(&matrix, "matrix file")?;
            let m: MatrixFile = serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("malformed matrix file {}: {e}", matrix.display())))?;
            Job::AlignCheck(AlignCheck { matrix: m })
        }
        Command::Simulate { config } => {
            let configs = load_configs(&config, seed)?;
            let seed = seed.or(configs.first().map(|c| c.master_seed));
            return Ok((Job::Simulate(Simulate { configs }), seed));
        }
        Command::DofNonsym { a1, a2, a3, n_max } => Job::DofNonsym(DofNonsym {
            gains: [a1, a2, a3],
            n_max,
        }),
        Command::Replay { .. } => unreachable!("replay is handled before resolution"),
    };
    Ok((job, seed))
}

fn execute(job: Job, seed: Option<u64>, format: Option<Format>, out: Option<&Path>) -> Result<(), CliError> {
    let format = format.unwrap_or_else(|| job.default_format());
    let output = job.run(format)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    match out {
        Some(path) => {
            let write = |p: &Path, text: &str| {
                std::fs::write(p, text).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", p.display())))
            };
            write(path, &output.text)?;
            let manifest = RunManifest::new(job, seed, format, path);
            write(&manifest_path(path), &manifest.to_json())?;
        }
        None => print!("{}", output.text),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Replay { manifest } = &cli.command {
        let m = RunManifest::load(manifest)?;
        if cli.seed.is_some() || cli.format.is_some() {
            eprintln!("warning: --seed and --format are taken from the manifest on replay");
        }
        let out = match &cli.out {
            Some(p) => Some(p.clone()),
            None => m.outputs.first().map(PathBuf::from),
        };
        return execute(m.job, m.master_seed, Some(m.format), out.as_deref());
    }
    let (job, seed) = resolve(cli.command, cli.seed)?;
    execute(job, seed, cli.format, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
