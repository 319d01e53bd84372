use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::control::{run_episode, Algorithm, StepInfo, UpdateMode};
use crate::envs::EnvKind;
use crate::error::{Error, Result};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for run `run` of stream `stream` under `master_seed`.
pub fn run_seed(master_seed: u64, stream: &str, run: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(fnv1a(stream) ^ splitmix64(run as u64)))
}

/// Stream key of the learner's random numbers: one stream per (algorithm, mode).
pub fn agent_stream(algorithm: Algorithm, mode: UpdateMode) -> String {
    format!("agent/{}/{}", algorithm.as_str(), mode.as_str())
}

/// Stream key for per-run random features, shared by every algorithm.
pub const FEATURE_STREAM: &str = "features";

/// Everything measured in one run. Series always have `n_episodes` entries;
/// after a divergence they repeat the last recorded value.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub cumulative_rewards: Vec<f64>,
    pub lengths: Vec<usize>,
    /// First episode in which the weights became non-finite.
    pub diverged_at: Option<usize>,
    /// Sum of rewards over the first `checkpoint` steps, spanning episodes;
    /// `None` when not requested or not reached.
    pub checkpoint_reward: Option<f64>,
}

impl RunRecord {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn diverged_in(&self, episode: usize) -> bool {
        self.diverged_at.is_some_and(|d| episode >= d)
    }
}

/// Runs of one configuration, tagged with what identifies it in output files.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub env: EnvKind,
    pub algorithm: Algorithm,
    pub mode: UpdateMode,
    pub beta0: f64,
    pub exponent: f64,
    pub runs: Vec<RunRecord>,
}

/// Executes run `run` of `config`.
pub fn run_single(config: &ExperimentConfig, run: usize) -> Result<RunRecord> {
    let agent = &config.agent;
    let features = config.feature_map(run_seed(config.master_seed, FEATURE_STREAM, run))?;
    let mut env = config.env.make();
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed(
        config.master_seed,
        &agent_stream(agent.algorithm, agent.mode),
        run,
    ));
    let mut theta = agent.initial_parameters(features.dimension());
    let max_steps = config.max_steps();
    let n = config.n_episodes;
    let mut rec = RunRecord {
        run,
        cumulative_rewards: Vec::with_capacity(n),
        lengths: Vec::with_capacity(n),
        diverged_at: None,
        checkpoint_reward: None,
    };
    let checkpoint = config.checkpoint;
    let mut running_reward = 0.0;
    let mut global = 0u64;
    for episode in 0..n {
        let mut obs = |info: &StepInfo<'_>| {
            if let Some(c) = checkpoint {
                if info.global_step < c {
                    running_reward += info.reward;
                }
            }
        };
        let before = global;
        let ep = run_episode(
            agent,
            &mut theta,
            env.as_mut(),
            &features,
            &mut rng,
            &mut global,
            episode as u64,
            max_steps,
            &mut obs,
        )?;
        if let Some(c) = checkpoint {
            if before < c && global >= c && !ep.diverged {
                rec.checkpoint_reward = Some(running_reward);
            }
        }
        rec.cumulative_rewards.push(ep.cumulative_reward);
        rec.lengths.push(ep.length);
        if ep.diverged {
            rec.diverged_at = Some(episode);
            rec.cumulative_rewards.resize(n, ep.cumulative_reward);
            rec.lengths.resize(n, ep.length);
            break;
        }
    }
    Ok(rec)
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::config("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("cannot start {n} workers: {e}")))
            .map(|pool| pool.install(f)),
    }
}

/// Runs every configuration, parallel over all (configuration, run) pairs.
/// Output order and content do not depend on `jobs`.
pub fn run_many(configs: &[ExperimentConfig], jobs: Option<usize>) -> Result<Vec<ExperimentResult>> {
    for c in configs {
        c.validate()?;
    }
    let tasks: Vec<(usize, usize)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.n_runs).map(move |r| (i, r)))
        .collect();
    let records: Vec<(usize, RunRecord)> = with_pool(jobs, || {
        tasks
            .par_iter()
            .map(|&(i, r)| run_single(&configs[i], r).map(|rec| (i, rec)))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut out: Vec<ExperimentResult> = configs
        .iter()
        .map(|c| ExperimentResult {
            env: c.env,
            algorithm: c.agent.algorithm,
            mode: c.agent.mode,
            beta0: c.agent.schedule.beta0(),
            exponent: c.agent.schedule.exponent(),
            runs: Vec::with_capacity(c.n_runs),
        })
        .collect();
    for (i, rec) in records {
        out[i].runs.push(rec);
    }
    for r in &mut out {
        r.runs.sort_by_key(|rec| rec.run);
    }
    Ok(out)
}

/// Runs `config.n_runs` independent runs; run `i` is seeded from
/// `(master_seed, algorithm, mode, i)`.
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentResult> {
    Ok(run_many(std::slice::from_ref(config), jobs)?.remove(0))
}

/// A step-size grid crossed with learners.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub betas: Vec<f64>,
    pub learners: Vec<(Algorithm, UpdateMode)>,
}

impl SweepSpec {
    pub fn new(betas: Vec<f64>, learners: Vec<(Algorithm, UpdateMode)>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::config("the step-size grid is empty"));
        }
        if betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::config("step sizes must be positive"));
        }
        if betas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("the step-size grid must be strictly ascending"));
        }
        if learners.is_empty() {
            return Err(Error::config("a sweep needs at least one learner"));
        }
        Ok(SweepSpec { betas, learners })
    }

    /// Standard and implicit variants of `algorithm`.
    pub fn both_modes(betas: Vec<f64>, algorithm: Algorithm) -> Result<Self> {
        Self::new(
            betas,
            vec![(algorithm, UpdateMode::Standard), (algorithm, UpdateMode::Implicit)],
        )
    }

    /// One configuration per (learner, β), learner-major.
    pub fn expand(&self, base: &ExperimentConfig) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for &(algorithm, mode) in &self.learners {
            for &beta in &self.betas {
                let mut c = base.clone();
                c.agent.algorithm = algorithm;
                c.agent.mode = mode;
                c.agent.schedule = c.agent.schedule.with_beta0(beta);
                out.push(c);
            }
        }
        out
    }
}

/// Runs every grid point of `spec` on top of `base`.
pub fn sweep(base: &ExperimentConfig, spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<ExperimentResult>> {
    run_many(&spec.expand(base), jobs)
}
