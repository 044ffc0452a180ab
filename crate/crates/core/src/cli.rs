//! The `hurstqv` command line.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on any other error, which
//! is reported on stderr as a single line `error: <code>: <message>`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{HurstError, Result};
use crate::estimate::{estimate_known_g, estimate_localized, EstimatorId};
use crate::experiment::{run_experiment, write_report, ExperimentConfig};
use crate::fbm::fbm_path;
use crate::pathio::{read_path_csv, write_path_csv};
use crate::quadvar::GridDesign;
use crate::sde::{simulate, ProcessSpec};
use crate::variance::{variance_constants, DEFAULT_TRUNCATION};

#[derive(Debug, Parser)]
#[command(name = "hurstqv", version, about = "Hurst index estimation for fBm-driven SDEs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample fractional Brownian motion on a uniform grid and write `j,t,x` CSV
    GenFbm(GenFbmArgs),
    /// Simulate an SDE driven by fBm and write `j,t,x,b` CSV
    Simulate(SimulateArgs),
    /// Estimate H from a `j,t,x` CSV path and print the estimate as JSON
    Estimate(EstimateArgs),
    /// Print the asymptotic variance constants at H as JSON
    Variance(VarianceArgs),
    /// Run a Monte-Carlo experiment described by a JSON config
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenFbmArgs {
    /// Number of steps; the path has m + 1 points
    #[arg(long)]
    pub m: usize,
    /// Horizon T of the grid [0, T]
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    /// Hurst index in (0, 1)
    #[arg(long = "H")]
    pub hurst: f64,
    /// RNG seed
    #[arg(long)]
    pub seed: u64,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProcessName {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
    /// f(x) = a + b x, g(x) = c + d x
    #[value(name = "affine")]
    Affine,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Registered process or an affine SDE
    #[arg(long, value_enum)]
    pub process: ProcessName,
    /// Number of steps; the path has m + 1 points
    #[arg(long)]
    pub m: usize,
    /// Horizon T of the grid [0, T]
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    /// Hurst index in (1/2, 1)
    #[arg(long = "H")]
    pub hurst: f64,
    /// RNG seed
    #[arg(long)]
    pub seed: u64,
    /// Affine drift coefficients a,b
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.0])]
    pub drift: Vec<f64>,
    /// Affine diffusion coefficients c,d
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1.0, 0.0])]
    pub diffusion: Vec<f64>,
    /// Affine initial value
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    #[value(name = "known_g")]
    KnownG,
    H1,
    H2,
    H3,
    H4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DiffusionName {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
    /// g = 1, for pure fBm input
    #[value(name = "one")]
    One,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input CSV with header j,t,x
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Estimator
    #[arg(long, value_enum)]
    pub method: MethodName,
    /// Known diffusion coefficient, required by known_g
    #[arg(long, value_enum)]
    pub g: Option<DiffusionName>,
    /// Number of windows for h1..h4 (default: sqrt of the number of steps)
    #[arg(long)]
    pub n: Option<usize>,
    /// Confidence level of the reported interval
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    /// Hurst index in (1/2, 1)
    #[arg(long = "H")]
    pub hurst: f64,
    /// Initial series truncation (doubled until the tail bound is met)
    #[arg(long = "L", default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub threads: Option<usize>,
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Execute a parsed command.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenFbm(a) => {
            let path = fbm_path(a.m, a.horizon, a.hurst, a.seed)?;
            write_path_csv(&path, None, output(&a.out)?)
        }
        Command::Simulate(a) => {
            let spec = match a.process {
                ProcessName::I => ProcessSpec::process_i(),
                ProcessName::Ii => ProcessSpec::process_ii(),
                ProcessName::Affine => {
                    if a.drift.len() != 2 || a.diffusion.len() != 2 {
                        return Err(HurstError::Input(
                            "--drift and --diffusion take two comma-separated coefficients".into(),
                        ));
                    }
                    ProcessSpec::affine((a.drift[0], a.drift[1]), (a.diffusion[0], a.diffusion[1]), a.x0)
                }
            };
            let sim = simulate(&spec, a.m, a.horizon, a.hurst, a.seed)?;
            write_path_csv(&sim.path, Some(&sim.driver), output(&a.out)?)
        }
        Command::Estimate(a) => {
            let path = read_path_csv(File::open(&a.input)?)?;
            let est = match a.method {
                MethodName::KnownG => {
                    let g: crate::sde::ScalarFn = match a.g {
                        Some(DiffusionName::I) => ProcessSpec::process_i().diffusion,
                        Some(DiffusionName::Ii) => ProcessSpec::process_ii().diffusion,
                        Some(DiffusionName::One) => std::sync::Arc::new(|_| 1.0),
                        None => return Err(HurstError::Input("known_g needs --g".into())),
                    };
                    estimate_known_g(&path, &*g, Some(a.level))?
                }
                m => {
                    let id: EstimatorId = match m {
                        MethodName::H1 => EstimatorId::Hn1,
                        MethodName::H2 => EstimatorId::Hn2,
                        MethodName::H3 => EstimatorId::Hn3,
                        _ => EstimatorId::Hn4,
                    };
                    let n = match a.n {
                        Some(n) => n,
                        None => exact_sqrt(path.m()).ok_or_else(|| {
                            HurstError::Input(format!(
                                "{} steps is not a perfect square; pass --n",
                                path.m()
                            ))
                        })?,
                    };
                    let design = GridDesign::square(n)?;
                    let selector = id.selector().expect("localized estimator");
                    estimate_localized(&path, &design, selector, Some(a.level))?
                }
            };
            print_json(&est)
        }
        Command::Variance(a) => print_json(&variance_constants(a.hurst, a.truncation)?),
        Command::Experiment(a) => {
            let config = ExperimentConfig::from_json_file(&a.config)?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(t) = a.threads {
                if t == 0 {
                    return Err(HurstError::Input("--threads must be at least 1".into()));
                }
                pool = pool.num_threads(t);
            }
            let pool = pool
                .build()
                .map_err(|e| HurstError::Io(io::Error::other(e)))?;
            let report = pool.install(|| run_experiment(&config))?;
            write_report(&report, &config.output_dir)?;
            log::info!("wrote results to {}", config.output_dir.display());
            Ok(())
        }
    }
}

fn exact_sqrt(m: usize) -> Option<usize> {
    let r = (m as f64).sqrt().round() as usize;
    (r * r == m).then_some(r)
}

/// Parse `args`, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), e.to_string().replace('\n', " "));
            1
        }
    }
}
