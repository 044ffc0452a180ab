//! Replicated Monte-Carlo runs over `(n, H)` tuples.
//!
//! Every replication draws one fBm driver, simulates the configured process
//! on `m_n = n·k_n` steps, and feeds the same path to every requested
//! estimator. Seeds are derived from `(base_seed, n-index, H-index, rep)`, so
//! replications can run in any order and on any number of threads.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};
use crate::estimate::{estimate_hn, known_g_point, EstimatorId};
use crate::quadvar::{select_index, window_stats, GridDesign, GridParams};
use crate::rng::derive_seed;
use crate::sde::{simulate, ProcessSpec};

fn default_n_list() -> Vec<usize> {
    vec![50, 150, 500]
}

fn default_horizon() -> f64 {
    1.0
}

fn default_estimators() -> Vec<EstimatorId> {
    EstimatorId::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Registry name, `"I"` or `"II"`.
    pub process: String,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    pub h_list: Vec<f64>,
    pub reps: usize,
    pub base_seed: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorId>,
    #[serde(default)]
    pub grid: GridParams,
    pub output_dir: PathBuf,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config: Self = serde_json::from_str(&text)?;
        // Relative output directories are resolved against the config file.
        if config.output_dir.is_relative() {
            if let Some(parent) = path.parent() {
                config.output_dir = parent.join(&config.output_dir);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ProcessSpec::registry(&self.process)?;
        if self.reps == 0 {
            return Err(HurstError::Input("reps must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.h_list.is_empty() || self.estimators.is_empty() {
            return Err(HurstError::Input(
                "n_list, h_list and estimators must be non-empty".into(),
            ));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 10) {
            return Err(HurstError::Input(format!("n = {n} is below 10")));
        }
        if let Some(h) = self.h_list.iter().find(|&&h| !(h > 0.5 && h < 1.0)) {
            return Err(HurstError::Input(format!("H = {h} outside (1/2, 1)")));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(HurstError::Input(format!("horizon {} must be positive", self.horizon)));
        }
        for &n in &self.n_list {
            GridDesign::new(n, self.grid)?;
        }
        Ok(())
    }
}

/// Moments of `Ĥ − H` over the successful replications.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mse: f64,
    pub mad: f64,
    pub bias: f64,
    pub sd: f64,
}

/// `mse = mean (e−H)²`, `mad = mean |e−H|`, `bias = mean e − H`, `sd` with divisor `reps − 1`.
pub fn summarize(estimates: &[f64], h_true: f64) -> Result<Summary> {
    if estimates.is_empty() {
        return Err(HurstError::domain("cannot summarize an empty sample"));
    }
    let len = estimates.len() as f64;
    let errors: Vec<f64> = estimates.iter().map(|e| e - h_true).collect();
    let bias = errors.iter().sum::<f64>() / len;
    let mse = errors.iter().map(|d| d * d).sum::<f64>() / len;
    let mad = errors.iter().map(|d| d.abs()).sum::<f64>() / len;
    let sd = if errors.len() > 1 {
        (errors.iter().map(|d| (d - bias).powi(2)).sum::<f64>() / (len - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        mse,
        mad,
        bias,
        sd,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: usize,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub estimator: EstimatorId,
    /// Absent when every replication failed.
    pub summary: Option<Summary>,
    pub successes: usize,
    pub failures: usize,
    /// Set for `known_g` when the diffusion is not bounded away from zero.
    pub out_of_hypothesis: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEstimate {
    pub n: usize,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub estimator: EstimatorId,
    pub rep: usize,
    pub estimate: Option<f64>,
    /// `"ok"` or the error code of the failure.
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub process: String,
    pub reps: usize,
    pub base_seed: u64,
    pub cells: Vec<CellReport>,
    pub raw: Vec<RawEstimate>,
}

impl ExperimentReport {
    pub fn cell(&self, n: usize, hurst: f64, estimator: EstimatorId) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.n == n && c.hurst == hurst && c.estimator == estimator)
    }
}

/// Outcome of one estimator on one replication: the estimate or an error code.
type Outcome = std::result::Result<f64, &'static str>;

/// Run one replication and return one outcome per requested estimator.
fn replicate(
    config: &ExperimentConfig,
    spec: &ProcessSpec,
    design: &GridDesign,
    hurst: f64,
    seed: u64,
) -> Vec<Outcome> {
    let path = match simulate(spec, design.m_n(), config.horizon, hurst, seed) {
        Ok(sim) => sim.path,
        Err(e) => return vec![Err(e.code()); config.estimators.len()],
    };
    let needs_windows = config.estimators.iter().any(|e| e.selector().is_some());
    let stats = needs_windows.then(|| window_stats(&path, design));
    config
        .estimators
        .iter()
        .map(|id| {
            let result = match (id.selector(), &stats) {
                (Some(selector), Some(Ok(stats))) => {
                    select_index(stats, selector).and_then(|k| estimate_hn(stats, k))
                }
                (Some(_), Some(Err(e))) => return Err(e.code()),
                _ => known_g_point(&path, &*spec.diffusion),
            };
            result.map_err(|e| e.code())
        })
        .collect()
}

/// Run every `(n, H, rep)` unit on the current rayon pool and summarize.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let spec = ProcessSpec::registry(&config.process)?;
    let out_of_hypothesis = spec.diffusion_bounded_away_from_zero() == Some(false);
    if out_of_hypothesis && config.estimators.contains(&EstimatorId::KnownG) {
        log::warn!(
            "known_g on process {}: the diffusion vanishes somewhere, results are outside the estimator's hypotheses",
            config.process
        );
    }

    let designs: Vec<GridDesign> = config
        .n_list
        .iter()
        .map(|&n| GridDesign::new(n, config.grid))
        .collect::<Result<_>>()?;

    let units: Vec<(usize, usize, usize)> = (0..config.n_list.len())
        .flat_map(|ni| {
            (0..config.h_list.len()).flat_map(move |hi| (0..config.reps).map(move |r| (ni, hi, r)))
        })
        .collect();

    let outcomes: Vec<Vec<Outcome>> = units
        .par_iter()
        .map(|&(ni, hi, rep)| {
            let seed = derive_seed(config.base_seed, &[ni as u64, hi as u64, rep as u64]);
            replicate(config, &spec, &designs[ni], config.h_list[hi], seed)
        })
        .collect();

    let mut raw = Vec::with_capacity(units.len() * config.estimators.len());
    for (&(ni, hi, rep), results) in units.iter().zip(&outcomes) {
        for (id, result) in config.estimators.iter().zip(results) {
            let (estimate, status) = match result {
                Ok(v) => (Some(*v), "ok".to_string()),
                Err(code) => (None, code.to_string()),
            };
            raw.push(RawEstimate {
                n: config.n_list[ni],
                hurst: config.h_list[hi],
                estimator: *id,
                rep,
                estimate,
                status,
            });
        }
    }

    let mut cells = Vec::new();
    for (ni, &n) in config.n_list.iter().enumerate() {
        for (hi, &hurst) in config.h_list.iter().enumerate() {
            for (ei, &id) in config.estimators.iter().enumerate() {
                let ok: Vec<f64> = (0..config.reps)
                    .filter_map(|rep| {
                        let unit = (ni * config.h_list.len() + hi) * config.reps + rep;
                        outcomes[unit][ei].ok()
                    })
                    .collect();
                let failures = config.reps - ok.len();
                if failures > 0 {
                    log::info!("n = {n}, H = {hurst}, {id}: {failures} failed replications");
                }
                cells.push(CellReport {
                    n,
                    hurst,
                    estimator: id,
                    summary: if ok.is_empty() {
                        None
                    } else {
                        Some(summarize(&ok, hurst)?)
                    },
                    successes: ok.len(),
                    failures,
                    out_of_hypothesis: out_of_hypothesis && id == EstimatorId::KnownG,
                });
            }
        }
    }

    Ok(ExperimentReport {
        process: config.process.clone(),
        reps: config.reps,
        base_seed: config.base_seed,
        cells,
        raw,
    })
}

pub const SUMMARY_CSV_HEADER: &str = "n,H,estimator,mse_scaled,mad_scaled,bias,sd,failures";
pub const RAW_CSV_HEADER: &str = "n,H,estimator,rep,estimate,status";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Summary rows with display scaling: MSE ×10³ (`h1..h4`) or ×10⁵ (`known_g`), MAD ×10.
pub fn write_summary_csv(report: &ExperimentReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_CSV_HEADER.split(','))
        .map_err(csv_error)?;
    for c in &report.cells {
        let s = c.summary;
        w.write_record([
            c.n.to_string(),
            c.hurst.to_string(),
            c.estimator.label().to_string(),
            opt(s.map(|s| s.mse * c.estimator.mse_scale())),
            opt(s.map(|s| s.mad * 10.0)),
            opt(s.map(|s| s.bias)),
            opt(s.map(|s| s.sd)),
            c.failures.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_raw_csv(report: &ExperimentReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RAW_CSV_HEADER.split(',')).map_err(csv_error)?;
    for r in &report.raw {
        w.write_record([
            r.n.to_string(),
            r.hurst.to_string(),
            r.estimator.label().to_string(),
            r.rep.to_string(),
            opt(r.estimate),
            r.status.clone(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Rounded `MSE/MAD` grid, one row per `(n, H)`, for reading by eye.
pub fn write_table(report: &ExperimentReport, mut out: impl Write) -> Result<()> {
    let mut ids: Vec<EstimatorId> = Vec::new();
    for c in &report.cells {
        if !ids.contains(&c.estimator) {
            ids.push(c.estimator);
        }
    }
    write!(out, "{:>5} {:>5}", "n", "H")?;
    for id in &ids {
        write!(out, " {:>19}", format!("{id} mse/mad"))?;
    }
    writeln!(out)?;
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for c in &report.cells {
        if !keys.contains(&(c.n, c.hurst)) {
            keys.push((c.n, c.hurst));
        }
    }
    for (n, h) in keys {
        write!(out, "{n:>5} {h:>5}")?;
        for &id in &ids {
            let cell = report.cell(n, h, id).and_then(|c| c.summary);
            let text = match cell {
                Some(s) => format!("{}/{}", sig(s.mse * id.mse_scale(), 4), sig(s.mad * 10.0, 4)),
                None => "-".into(),
            };
            write!(out, " {text:>19}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "\nmse x1e3 for h1..h4, x1e5 for known_g; mad x10")?;
    Ok(())
}

/// `x` rounded to `digits` significant digits.
fn sig(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let decimals = (digits - 1 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_error(e: csv::Error) -> HurstError {
    HurstError::Io(std::io::Error::other(e))
}

/// Write `summary.csv`, `summary.json`, `raw.csv` and `table.txt` into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_summary_csv(report, fs::File::create(dir.join("summary.csv"))?)?;
    write_raw_csv(report, fs::File::create(dir.join("raw.csv"))?)?;
    write_table(report, fs::File::create(dir.join("table.txt"))?)?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    Ok(())
}
