use std::path::Path;

use super::runner::{ExperimentResult, RunRecord};
use crate::control::{Algorithm, UpdateMode};
use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::fmt::format_g17;

/// Name of the per-run metric reported by sweeps.
pub const REWARD_METRIC: &str = "final_quartile_mean_cum_reward";

/// Mean and standard error (sample standard deviation over `√n`), two-pass.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt())
}

/// `√(se₁² + se₂²)`.
pub fn pooled_stderr(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Mean per-episode cumulative reward over the final 25% of episodes (at least one).
pub fn final_quartile_reward(run: &RunRecord) -> f64 {
    let n = run.cumulative_rewards.len();
    let k = n.div_ceil(4).max(1);
    run.cumulative_rewards[n - k..].iter().sum::<f64>() / k as f64
}

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub env: EnvKind,
    pub algorithm: Algorithm,
    pub mode: UpdateMode,
    pub beta0: f64,
    pub exponent: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n_runs: usize,
    pub diverged_runs: usize,
}

pub fn summarize(result: &ExperimentResult) -> SweepRow {
    let metric: Vec<f64> = result.runs.iter().map(final_quartile_reward).collect();
    let (mean, stderr) = mean_stderr(&metric);
    SweepRow {
        env: result.env,
        algorithm: result.algorithm,
        mode: result.mode,
        beta0: result.beta0,
        exponent: result.exponent,
        mean,
        stderr,
        n_runs: result.runs.len(),
        diverged_runs: result.runs.iter().filter(|r| r.diverged()).count(),
    }
}

pub fn sweep_table(results: &[ExperimentResult]) -> Vec<SweepRow> {
    results.iter().map(summarize).collect()
}

fn ln_length(len: usize) -> f64 {
    (len.max(1) as f64).ln()
}

/// Per-episode mean and standard error of `ln(length)` across runs.
pub fn log_length_curve(result: &ExperimentResult) -> Vec<(f64, f64)> {
    let n = result.runs.first().map_or(0, |r| r.lengths.len());
    (0..n)
        .map(|e| {
            let xs: Vec<f64> = result.runs.iter().map(|r| ln_length(r.lengths[e])).collect();
            mean_stderr(&xs)
        })
        .collect()
}

/// Mean and standard error across runs of the mean `ln(length)` over the last
/// `window` episodes.
pub fn final_log_length(result: &ExperimentResult, window: usize) -> (f64, f64) {
    let xs: Vec<f64> = result
        .runs
        .iter()
        .map(|r| {
            let n = r.lengths.len();
            let k = window.clamp(1, n.max(1));
            r.lengths[n - k..].iter().map(|l| ln_length(*l)).sum::<f64>() / k as f64
        })
        .collect();
    mean_stderr(&xs)
}

/// Writes a sweep table as CSV.
pub fn write_sweep_table(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut out = String::from("env,algorithm,mode,beta0,s,metric,mean,stderr,n_runs,diverged_runs\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{REWARD_METRIC},{},{},{},{}\n",
            r.env,
            r.algorithm.as_str(),
            r.mode.as_str(),
            format_g17(r.beta0),
            format_g17(r.exponent),
            format_g17(r.mean),
            format_g17(r.stderr),
            r.n_runs,
            r.diverged_runs
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
