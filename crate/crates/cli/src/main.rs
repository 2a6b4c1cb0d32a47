//! `bundlemin`: build skew products over minimal bases, sample their minimal
//! sets and classify the fibres.

mod commands;
mod config;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use bundlemin_core::analysis::Verdict;
use bundlemin_core::bundle::SkewSystem;
use clap::{Parser, Subcommand};

use commands::{default_path, BuildArgs, SAMPLE_CSV, SYSTEM_FILE};
use config::{RunConfig, Settings};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Cap { requested: usize, cap: usize },
    Other(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Cap { .. } => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Cap { requested, cap } => {
                write!(f, "{requested} orbit steps requested, cap is {cap} (set BUNDLEMIN_CAP to raise it)")
            }
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "bundlemin", version, about = "Minimal sets of skew products on graph bundles")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sampling resolution.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Orbit steps kept after the transient.
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named construction and write system.json.
    Build {
        /// One of the names printed by `bundlemin list`.
        name: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        theta0: Option<f64>,
        /// Further parameters as a JSON object.
        #[arg(long)]
        params: Option<String>,
    },
    /// Sample the minimal set containing a start point.
    MinimalSet {
        #[arg(long)]
        system: Option<PathBuf>,
        /// Start point as `base|edge|t`.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        transient: Option<usize>,
    },
    /// Dichotomy, trichotomy and circle reports for a sample.
    Classify {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        sample: Option<PathBuf>,
        /// Base probes for the fibre reports.
        #[arg(long)]
        probes: Option<usize>,
    },
    /// Draw a sample as SVG.
    Plot {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        sample: Option<PathBuf>,
    },
    /// Print the construction names.
    List,
}

fn overrides(
    alpha: Option<f64>,
    beta: Option<f64>,
    precision: Option<u32>,
    m: Option<usize>,
    theta0: Option<f64>,
    params: Option<String>,
) -> Result<serde_json::Map<String, serde_json::Value>, CliError> {
    let mut map = match params {
        Some(text) => match serde_json::from_str(&text) {
            Ok(serde_json::Value::Object(m)) => m,
            Ok(_) => return Err(CliError::Config("--params must be a JSON object".into())),
            Err(e) => return Err(CliError::Config(format!("--params: {e}"))),
        },
        None => Default::default(),
    };
    let mut put = |k: &str, v: Option<serde_json::Value>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    put("alpha", alpha.map(Into::into));
    put("beta", beta.map(Into::into));
    put("precision", precision.map(Into::into));
    put("m", m.map(Into::into));
    put("theta0", theta0.map(Into::into));
    Ok(map)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT));
    match cli.command {
        Command::List => {
            for n in bundlemin_core::constructions::CONSTRUCTION_NAMES {
                println!("{n}");
            }
        }
        Command::Build { name, alpha, beta, precision, m, theta0, params } => {
            let args = BuildArgs { name, overrides: overrides(alpha, beta, precision, m, theta0, params)? };
            print!("{}", commands::build(&cfg, args, &out)?);
        }
        Command::MinimalSet { system, start, transient } => {
            if transient.is_some() {
                cfg.transient = transient;
            }
            let set = Settings::resolve(&cfg, cli.delta, cli.steps, cli.seed, Some(out.clone()))?;
            let system = default_path(&out, system, SYSTEM_FILE);
            print!("{}", commands::minimal_set(&cfg, &set, &system, start)?);
        }
        Command::Classify { system, sample, probes } => {
            if probes.is_some() {
                cfg.probes = probes;
            }
            let set = Settings::resolve(&cfg, cli.delta, cli.steps, cli.seed, Some(out.clone()))?;
            let system = default_path(&out, system, SYSTEM_FILE);
            let sample = default_path(&out, sample, SAMPLE_CSV);
            let r = commands::classify(&set, &system, &sample)?;
            print!("{}", r.text);
            if r.verdict == Verdict::Inconclusive {
                return Ok(3);
            }
        }
        Command::Plot { system, sample } => {
            let system = default_path(&out, system, SYSTEM_FILE);
            let sample = default_path(&out, sample, SAMPLE_CSV);
            let file = commands::load_system(&system)?;
            let s: &SkewSystem = &file.system;
            let sample = commands::load_sample(s, &sample)?;
            let reports = [
                out.join(commands::TRICHOTOMY_FILE),
                out.join(commands::CIRCLES_FILE),
            ];
            let bands = plot::read_bands(&[reports[0].as_path(), reports[1].as_path()])?;
            let svg = plot::render(s, &sample, &bands);
            let path = out.join("plot.svg");
            output::write_atomic(&path, svg.as_bytes())?;
            if sample.is_empty() {
                eprintln!("warning: sample is empty");
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("bundlemin: {e}");
            ExitCode::from(e.code())
        }
    }
}
