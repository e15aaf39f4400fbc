//! Seeded Monte-Carlo batches.

use std::fmt;

use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::runner::{run_with_gains, ScenarioResult};
use crate::control::synthesize_gains;
use crate::error::SimError;

#[derive(Debug, Clone)]
pub struct BatchRun {
    pub seed: u64,
    /// Per-seed errors are kept as text and do not abort the batch.
    pub result: Result<ScenarioResult, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub runs: usize,
    pub successes: usize,
    pub errors: usize,
    pub success_rate: f64,
    pub miss_mean: f64,
    pub miss_median: f64,
    pub miss_max: f64,
    /// Sorted `(seed, success, miss)` triples for completed runs.
    pub per_seed: Vec<(u64, bool, f64)>,
}

impl fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "runs: {}", self.runs)?;
        writeln!(f, "successes: {}", self.successes)?;
        writeln!(f, "errors: {}", self.errors)?;
        writeln!(f, "success_rate: {:.6}", self.success_rate)?;
        writeln!(f, "miss_mean_m: {:.6}", self.miss_mean)?;
        writeln!(f, "miss_median_m: {:.6}", self.miss_median)?;
        writeln!(f, "miss_max_m: {:.6}", self.miss_max)?;
        for (seed, ok, miss) in &self.per_seed {
            writeln!(
                f,
                "seed {seed}: {} miss {miss:.6}",
                if *ok { "docked" } else { "failed" }
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    /// In the order the seeds were given.
    pub runs: Vec<BatchRun>,
    pub summary: BatchSummary,
}

/// Runs every seed in parallel. Gains are synthesized once; config and
/// synthesis errors fail the whole batch before any run starts.
pub fn run_batch(config: &ScenarioConfig, seeds: &[u64]) -> Result<BatchResult, SimError> {
    if seeds.is_empty() {
        return Err(SimError::Config(crate::ConfigError::Field {
            field: "seeds".into(),
            message: "seed list is empty".into(),
        }));
    }
    config.validate()?;
    let synthesis = synthesize_gains(&config.plant, &config.weights)?;
    let runs: Vec<BatchRun> = seeds
        .par_iter()
        .map(|&seed| {
            let mut cfg = config.clone();
            cfg.set_seed(seed);
            BatchRun {
                seed,
                result: run_with_gains(&cfg, &synthesis).map_err(|e| e.to_string()),
            }
        })
        .collect();
    let summary = summarize(&runs);
    Ok(BatchResult { runs, summary })
}

/// Order-independent aggregate: every statistic is computed from the
/// seed-sorted run list.
pub fn summarize(runs: &[BatchRun]) -> BatchSummary {
    let mut per_seed: Vec<(u64, bool, f64)> = runs
        .iter()
        .filter_map(|r| {
            r.result
                .as_ref()
                .ok()
                .map(|s| (r.seed, s.outcome.success, s.outcome.miss_distance))
        })
        .collect();
    per_seed.sort_by(|a, b| a.0.cmp(&b.0).then(a.2.total_cmp(&b.2)));
    let successes = per_seed.iter().filter(|p| p.1).count();
    let mut misses: Vec<f64> = per_seed.iter().map(|p| p.2).collect();
    misses.sort_by(f64::total_cmp);
    let n = misses.len();
    let (mean, median, max) = if n == 0 {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let median = if n % 2 == 1 {
            misses[n / 2]
        } else {
            0.5 * (misses[n / 2 - 1] + misses[n / 2])
        };
        (misses.iter().sum::<f64>() / n as f64, median, misses[n - 1])
    };
    BatchSummary {
        runs: runs.len(),
        successes,
        errors: runs.len() - n,
        success_rate: successes as f64 / runs.len().max(1) as f64,
        miss_mean: mean,
        miss_median: median,
        miss_max: max,
        per_seed,
    }
}
