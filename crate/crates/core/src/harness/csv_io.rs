use std::path::Path;

use super::runner::{ExperimentResult, RunRecord};
use crate::control::{Algorithm, UpdateMode};
use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::fmt::format_g17;

pub const CSV_HEADER: &str = "env,algorithm,mode,beta0,s,run,episode,cum_reward,length,diverged";

/// Renders results as CSV text, one row per (run, episode), run-major.
pub fn render_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for res in results {
        let prefix = format!(
            "{},{},{},{},{}",
            res.env,
            res.algorithm.as_str(),
            res.mode.as_str(),
            format_g17(res.beta0),
            format_g17(res.exponent)
        );
        for run in &res.runs {
            for (e, (r, l)) in run.cumulative_rewards.iter().zip(&run.lengths).enumerate() {
                out.push_str(&format!(
                    "{prefix},{},{e},{},{l},{}\n",
                    run.run,
                    format_g17(*r),
                    u8::from(run.diverged_in(e))
                ));
            }
        }
    }
    out
}

pub fn emit_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(results)).map_err(|e| Error::io(path, e))
}

fn parse_algorithm(s: &str) -> Result<Algorithm> {
    match s {
        "q_learning" => Ok(Algorithm::QLearning),
        "sarsa" => Ok(Algorithm::Sarsa),
        _ => Err(Error::config(format!("unknown algorithm {s:?}"))),
    }
}

fn parse_mode(s: &str) -> Result<UpdateMode> {
    match s {
        "standard" => Ok(UpdateMode::Standard),
        "implicit" => Ok(UpdateMode::Implicit),
        _ => Err(Error::config(format!("unknown mode {s:?}"))),
    }
}

/// Reads a file written by [`emit_csv`]. Consecutive rows sharing
/// `(env, algorithm, mode, beta0, s)` form one result. Checkpoint rewards are
/// not stored and come back as `None`.
pub fn parse_csv(path: &Path) -> Result<Vec<ExperimentResult>> {
    let csv_err = |e| Error::Csv {
        path: path.into(),
        source: e,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::config(format!("{} does not have the results header", path.display())));
    }
    let bad = |what: &str, v: &str| Error::config(format!("bad {what} {v:?} in {}", path.display()));
    let mut out: Vec<ExperimentResult> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let env: EnvKind = rec[0].parse()?;
        let algorithm = parse_algorithm(&rec[1])?;
        let mode = parse_mode(&rec[2])?;
        let beta0: f64 = rec[3].parse().map_err(|_| bad("beta0", &rec[3]))?;
        let exponent: f64 = rec[4].parse().map_err(|_| bad("s", &rec[4]))?;
        let run: usize = rec[5].parse().map_err(|_| bad("run", &rec[5]))?;
        let episode: usize = rec[6].parse().map_err(|_| bad("episode", &rec[6]))?;
        let reward: f64 = rec[7].parse().map_err(|_| bad("cum_reward", &rec[7]))?;
        let length: usize = rec[8].parse().map_err(|_| bad("length", &rec[8]))?;
        let diverged = match &rec[9] {
            "0" => false,
            "1" => true,
            v => return Err(bad("diverged", v)),
        };
        let same = out.last().is_some_and(|r| {
            r.env == env && r.algorithm == algorithm && r.mode == mode
                && r.beta0.to_bits() == beta0.to_bits()
                && r.exponent.to_bits() == exponent.to_bits()
        });
        if !same {
            out.push(ExperimentResult {
                env,
                algorithm,
                mode,
                beta0,
                exponent,
                runs: Vec::new(),
            });
        }
        let res = out.last_mut().expect("just pushed");
        if res.runs.last().is_none_or(|r| r.run != run) {
            res.runs.push(RunRecord {
                run,
                cumulative_rewards: Vec::new(),
                lengths: Vec::new(),
                diverged_at: None,
                checkpoint_reward: None,
            });
        }
        let r = res.runs.last_mut().expect("just pushed");
        if episode != r.lengths.len() {
            return Err(bad("episode index", &rec[6]));
        }
        if diverged && r.diverged_at.is_none() {
            r.diverged_at = Some(episode);
        }
        r.cumulative_rewards.push(reward);
        r.lengths.push(length);
    }
    Ok(out)
}
