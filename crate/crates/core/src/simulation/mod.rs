//! Seeded simulation experiments comparing summary-based SD estimators with
//! the full-sample SD.
//!
//! For each sample size the harness draws `T` samples, reduces each to its
//! five-number summary, and accumulates
//!
//! ```text
//! RMSE(S_est) = Σ (S_est,i − σ)² / Σ (S_i − σ)²
//! ```
//!
//! where `S_i` is the full-sample SD and `σ` the true SD. Replications run in
//! fixed-size blocks (see [`crate::replication`]), so reports do not depend on
//! the number of threads.

mod distributions;
mod summary;

pub use distributions::{draw_sample, DistributionSpec};
pub use summary::{five_number_summary, SummaryConvention};

use std::fmt::Write as _;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{normalization_constants, sd_from_summary, FiveNumberSummary, Method};
use crate::render::sig9;
use crate::replication::{block_rng, blocks, jackknife_se, run_blocks, total, DEFAULT_BLOCK_SIZE};
use summary::five_number_summary_unsorted;

pub const MIN_REPS: u64 = 1_000;
pub const DEFAULT_REPS_NORMAL: u64 = 200_000;
pub const DEFAULT_REPS_SKEWED: u64 = 100_000;
/// Runs are split into at least this many blocks so the jackknife is defined.
pub const MIN_BLOCKS: u64 = 10;

/// `n = 4Q + 1` for Q in {1, 2, 3, 5, 7, 10, 15, 21, 30, 40, 50}.
pub const DEFAULT_GRID: [u64; 11] = [5, 9, 13, 21, 29, 41, 61, 85, 121, 161, 201];

/// Divisor of the full-sample SD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdDivisor {
    #[default]
    NMinus1,
    N,
}

impl FromStr for SdDivisor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_minus_1" | "n-1" => Ok(SdDivisor::NMinus1),
            "n" => Ok(SdDivisor::N),
            _ => Err(Error::InvalidInput(format!("unknown SD divisor {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dist: DistributionSpec,
    pub n_grid: Vec<u64>,
    pub reps: u64,
    pub master_seed: u64,
    /// `(existing, new)` estimators.
    pub estimator_pair: (Method, Method),
    pub sd_divisor: SdDivisor,
    /// `None` picks [`SummaryConvention::natural`] for each `n`.
    pub convention: Option<SummaryConvention>,
    pub block_size: u64,
}

impl SimulationConfig {
    /// Default grid, pair (wan_sd_s3, shi_sd), divisor n − 1 and a
    /// repetition count that depends on whether `dist` is normal.
    pub fn new(dist: DistributionSpec, master_seed: u64) -> Self {
        let reps = match dist {
            DistributionSpec::Normal { .. } => DEFAULT_REPS_NORMAL,
            _ => DEFAULT_REPS_SKEWED,
        };
        SimulationConfig {
            dist,
            n_grid: DEFAULT_GRID.to_vec(),
            reps,
            master_seed,
            estimator_pair: (Method::WanSdS3, Method::ShiSd),
            sd_divisor: SdDivisor::NMinus1,
            convention: None,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.dist.validated()?;
        if self.reps < MIN_REPS {
            return Err(Error::InvalidInput(format!(
                "at least {MIN_REPS} repetitions are required, got {}",
                self.reps
            )));
        }
        if self.n_grid.is_empty() {
            return Err(Error::InvalidInput("the sample-size grid is empty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 5) {
            return Err(Error::InvalidInput(format!(
                "grid sample sizes must be >= 5, got {n}"
            )));
        }
        if self.block_size == 0 {
            return Err(Error::InvalidInput("block size must be positive".into()));
        }
        let probe = FiveNumberSummary::new(0.0, 1.0, 2.0, 3.0, 4.0, 5)?;
        for m in [self.estimator_pair.0, self.estimator_pair.1] {
            sd_from_summary(m, &probe)?;
        }
        for &n in &self.n_grid {
            if self.convention == Some(SummaryConvention::Ranks4Q1)
                && SummaryConvention::natural(n) != SummaryConvention::Ranks4Q1
            {
                return Err(Error::InvalidInput(format!(
                    "the ranks_4q1 convention needs n = 4Q+1, got {n}"
                )));
            }
        }
        Ok(())
    }

    /// `block_size`, shrunk when needed to give [`MIN_BLOCKS`] blocks.
    pub fn effective_block_size(&self) -> u64 {
        self.block_size.min(self.reps.div_ceil(MIN_BLOCKS)).max(1)
    }

    fn convention_for(&self, n: u64) -> SummaryConvention {
        self.convention
            .unwrap_or_else(|| SummaryConvention::natural(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmseRecord {
    pub n: u64,
    pub rmse_existing: f64,
    pub rmse_new: f64,
    /// Jackknife-over-blocks standard error of `rmse_new − rmse_existing`.
    pub mc_standard_error: f64,
    pub se_existing: f64,
    pub se_new: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    pub config: SimulationConfig,
    pub records: Vec<RmseRecord>,
}

impl RmseReport {
    pub fn record(&self, n: u64) -> Option<&RmseRecord> {
        self.records.iter().find(|r| r.n == n)
    }
}

// Per-block sums.
const SQ_EXISTING: usize = 0;
const SQ_NEW: usize = 1;
const SQ_FULL: usize = 2;

fn sample_sd(x: &[f64], divisor: SdDivisor) -> f64 {
    let k = x.len() as f64;
    let mean = x.iter().sum::<f64>() / k;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let d = match divisor {
        SdDivisor::NMinus1 => k - 1.0,
        SdDivisor::N => k,
    };
    (ss / d).sqrt()
}

fn non_finite(what: &str, n: u64, block: u64, rep: u64, summary: &FiveNumberSummary) -> Error {
    Error::NumericFailure(format!(
        "non-finite {what} at n = {n}, block {block}, replication {rep}: summary ({}, {}, {}, {}, {})",
        summary.a, summary.q1, summary.m, summary.q3, summary.b
    ))
}

pub fn run_rmse(config: &SimulationConfig) -> Result<RmseReport> {
    config.validate()?;
    let sigma = config.dist.true_sigma();
    let (existing, new) = config.estimator_pair;
    let mut records = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let convention = config.convention_for(n);
        let sampler = config.dist.sampler()?;
        let parts = run_blocks::<3, Error, _>(
            config.reps,
            config.effective_block_size(),
            |block, count| {
                let mut rng = block_rng(config.master_seed, n, block);
                let mut buf = vec![0.0; n as usize];
                let mut sums = [0.0; 3];
                for rep in 0..count {
                    sampler.fill(&mut rng, &mut buf);
                    let full = sample_sd(&buf, config.sd_divisor);
                    let summary = five_number_summary_unsorted(&mut buf, convention)?;
                    let a = sd_from_summary(existing, &summary)?.value;
                    let b = sd_from_summary(new, &summary)?.value;
                    for (v, what) in [
                        (full, "full-sample SD"),
                        (a, existing.label()),
                        (b, new.label()),
                    ] {
                        if !v.is_finite() {
                            return Err(non_finite(what, n, block, rep, &summary));
                        }
                    }
                    sums[SQ_EXISTING] += (a - sigma) * (a - sigma);
                    sums[SQ_NEW] += (b - sigma) * (b - sigma);
                    sums[SQ_FULL] += (full - sigma) * (full - sigma);
                }
                Ok(sums)
            },
        )?;
        let all = total(&parts);
        if !(all[SQ_FULL] > 0.0) {
            return Err(Error::NumericFailure(format!(
                "full-sample SD never differs from sigma at n = {n}"
            )));
        }
        let ratio = |s: &[f64; 3], k: usize| s[k] / s[SQ_FULL];
        let se = |f: &dyn Fn(&[f64; 3]) -> f64| jackknife_se(&parts, f).unwrap_or(f64::NAN);
        records.push(RmseRecord {
            n,
            rmse_existing: ratio(&all, SQ_EXISTING),
            rmse_new: ratio(&all, SQ_NEW),
            mc_standard_error: se(&|s| ratio(s, SQ_NEW) - ratio(s, SQ_EXISTING)),
            se_existing: se(&|s| ratio(s, SQ_EXISTING)),
            se_new: se(&|s| ratio(s, SQ_NEW)),
        });
    }
    Ok(RmseReport {
        config: config.clone(),
        records,
    })
}

pub const RMSE_CSV_HEADER: &str = "dist,n,T,rmse_existing,rmse_new,mc_se";

/// CSV with header `dist,n,T,rmse_existing,rmse_new,mc_se`. The dist column
/// holds the command-line form of the distribution and is quoted.
pub fn render_rmse_csv(report: &RmseReport) -> String {
    let mut out = String::from(RMSE_CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{},{}",
            report.config.dist,
            r.n,
            report.config.reps,
            sig9(r.rmse_existing),
            sig9(r.rmse_new),
            sig9(r.mc_standard_error)
        );
    }
    out
}

/// Raw per-replication estimates from standard-normal samples (σ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramScenario {
    pub n: u64,
    /// `(b − a) / ξ(n)`.
    pub range_based: Vec<f64>,
    /// `(q3 − q1) / η(n)`.
    pub iqr_based: Vec<f64>,
}

impl HistogramScenario {
    /// Unbiased sample variances of the two estimate lists.
    pub fn variances(&self) -> (f64, f64) {
        let var = |x: &[f64]| {
            let k = x.len() as f64;
            let mean = x.iter().sum::<f64>() / k;
            x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
        };
        (var(&self.range_based), var(&self.iqr_based))
    }
}

pub fn histogram_scenario(n: u64, reps: u64, seed: u64) -> Result<HistogramScenario> {
    if reps < MIN_REPS {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_REPS} repetitions are required, got {reps}"
        )));
    }
    if n < 5 {
        return Err(Error::InvalidInput(format!(
            "sample size must be >= 5, got {n}"
        )));
    }
    let c = normalization_constants(n)?;
    let convention = SummaryConvention::natural(n);
    let chunks: Vec<Vec<(f64, f64)>> = blocks(reps, DEFAULT_BLOCK_SIZE)
        .into_par_iter()
        .map(|(block, count)| {
            let mut rng = block_rng(seed, n, block);
            let mut buf = vec![0.0; n as usize];
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                for z in buf.iter_mut() {
                    *z = StandardNormal.sample(&mut rng);
                }
                let s = five_number_summary_unsorted(&mut buf, convention)?;
                out.push(((s.b - s.a) / c.xi, (s.q3 - s.q1) / c.eta));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let (range_based, iqr_based) = chunks.into_iter().flatten().unzip();
    Ok(HistogramScenario {
        n,
        range_based,
        iqr_based,
    })
}

pub const HISTOGRAM_CSV_HEADER: &str = "range_based,iqr_based";

pub fn render_histogram_csv(h: &HistogramScenario) -> String {
    let mut out = String::from(HISTOGRAM_CSV_HEADER);
    out.push('\n');
    for (a, b) in h.range_based.iter().zip(&h.iqr_based) {
        let _ = writeln!(out, "{},{}", sig9(*a), sig9(*b));
    }
    out
}
