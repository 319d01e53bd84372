//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use implicit_control::analysis::tabular_convergence;
use implicit_control::analysis::verify::{
    closed_form_equivalence, effective_step_law, projection_suite, theory_constant_suite,
};
use implicit_control::control::ScheduleClock;
use implicit_control::envs::build_random_mdp;
use implicit_control::envs::trajectory::{replay, Trajectory};
use implicit_control::harness::{
    final_log_length, pooled_stderr, summarize, sweep, ExperimentConfig, ExperimentResult, SweepRow, SweepSpec,
};
use implicit_control::{AgentConfig, Algorithm, EnvKind, PolicyConfig, StepSizeSchedule, UpdateMode};

struct Line {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&root().join("configs").join(name)).expect("shipped config")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn c1() -> Line {
    let (check, dt) = timed(|| closed_form_equivalence(1000, 1));
    let fast = dt < Duration::from_secs(1);
    Line {
        id: 1,
        name: "closed-form equivalence",
        passed: check.passed && fast,
        detail: format!("{}; {:.3} s (< 1 s)", check.detail, dt.as_secs_f64()),
    }
}

fn c2() -> Line {
    let check = effective_step_law(10_000, 2);
    Line {
        id: 2,
        name: "effective step-size law",
        passed: check.passed,
        detail: check.detail,
    }
}

fn c3() -> Line {
    let check = projection_suite(10_000, 3);
    Line {
        id: 3,
        name: "projection suite",
        passed: check.passed,
        detail: check.detail,
    }
}

fn c4() -> Line {
    const SEEDS: u64 = 5;
    let (result, dt) = timed(|| -> implicit_control::Result<(f64, f64)> {
        let mdp = build_random_mdp(5, 2, 1.0, 2024)?;
        let agent = AgentConfig {
            algorithm: Algorithm::QLearning,
            mode: UpdateMode::Implicit,
            schedule: StepSizeSchedule::polynomial(0.5, 2.0 / 3.0)?,
            gamma: 0.9,
            radius: f64::INFINITY,
            policy: PolicyConfig::epsilon_greedy(0.2),
            clock: ScheduleClock::Global,
            initial_weight: 0.0,
        };
        let mut errors = Vec::new();
        let mut range = 0.0;
        for seed in 0..SEEDS {
            let out = tabular_convergence(&mdp, &agent, 200_000, seed, 200_000)?;
            range = out.q_star.range();
            errors.push(out.max_abs_error);
        }
        Ok((errors.iter().sum::<f64>() / SEEDS as f64, range))
    });
    match result {
        Ok((err, range)) => {
            let rel = err / range;
            let fast = dt < Duration::from_secs(30);
            Line {
                id: 4,
                name: "tabular oracle convergence",
                passed: rel < 0.05 && fast,
                detail: format!(
                    "mean max|Q-Q*| {err:.4} over {SEEDS} seeds, Q* range {range:.4}, ratio {rel:.4} (< 0.05); {:.2} s (< 30 s)",
                    dt.as_secs_f64()
                ),
            }
        }
        Err(e) => Line {
            id: 4,
            name: "tabular oracle convergence",
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn row(rows: &[SweepRow], mode: UpdateMode, beta: f64) -> &SweepRow {
    rows.iter()
        .find(|r| r.mode == mode && r.beta0 == beta)
        .expect("grid point present")
}

/// Implicit beats standard at `big` by more than 3 pooled standard errors and
/// stays within 20% below its own value at `small`.
fn robustness(file: &str, small: f64, big: f64) -> (bool, String) {
    let mut cfg = config(file);
    cfg.n_runs = 20;
    let spec = SweepSpec::both_modes(vec![small, big], cfg.agent.algorithm).expect("grid");
    let results = match sweep(&cfg, &spec, None) {
        Ok(r) => r,
        Err(e) => return (false, format!("{file}: error {e}")),
    };
    let rows: Vec<SweepRow> = results.iter().map(summarize).collect();
    let std_big = row(&rows, UpdateMode::Standard, big);
    let imp_big = row(&rows, UpdateMode::Implicit, big);
    let imp_small = row(&rows, UpdateMode::Implicit, small);
    let se = pooled_stderr(std_big.stderr, imp_big.stderr);
    let margin = imp_big.mean - std_big.mean;
    let floor = imp_small.mean - 0.2 * imp_small.mean.abs();
    let ok = margin > 3.0 * se && imp_big.mean >= floor;
    (
        ok,
        format!(
            "{} {}: β={big} implicit {:.2}±{:.2} vs standard {:.2}±{:.2}, margin {:.2} (> 3·SE = {:.2}); implicit β={small} {:.2}, floor {:.2}",
            cfg.env,
            cfg.agent.algorithm.as_str(),
            imp_big.mean,
            imp_big.stderr,
            std_big.mean,
            std_big.stderr,
            margin,
            3.0 * se,
            imp_small.mean,
            floor
        ),
    )
}

fn c5() -> Line {
    let cliff = robustness("cliff_walking_q_learning.toml", 0.5, 2.0);
    let taxi = robustness("taxi_sarsa.toml", 0.5, 1.5);
    Line {
        id: 5,
        name: "step-size robustness",
        passed: cliff.0 && taxi.0,
        detail: format!("{}; {}", cliff.1, taxi.1),
    }
}

fn final_ll(results: &[ExperimentResult], alg: Algorithm, mode: UpdateMode, beta: f64) -> f64 {
    let r = results
        .iter()
        .find(|r| r.algorithm == alg && r.mode == mode && r.beta0 == beta)
        .expect("grid point present");
    final_log_length(r, 1).0
}

fn continuous(file: &str, betas: &[f64]) -> implicit_control::Result<Vec<ExperimentResult>> {
    let mut cfg = config(file);
    cfg.n_runs = 10;
    cfg.n_episodes = 30;
    sweep(&cfg, &SweepSpec::both_modes(betas.to_vec(), cfg.agent.algorithm)?, None)
}

fn c6() -> Line {
    let (out, dt) = timed(|| -> implicit_control::Result<(bool, Vec<String>)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for (file, alg) in [("acrobot_q_learning.toml", Algorithm::QLearning), ("acrobot_sarsa.toml", Algorithm::Sarsa)] {
            let res = continuous(file, &[1.0, 10.0])?;
            let s1 = final_ll(&res, alg, UpdateMode::Standard, 1.0);
            let i1 = final_ll(&res, alg, UpdateMode::Implicit, 1.0);
            let s10 = final_ll(&res, alg, UpdateMode::Standard, 10.0);
            let i10 = final_ll(&res, alg, UpdateMode::Implicit, 10.0);
            let pass = (s1 - i1).abs() < 0.3 && i10 <= 5.7 && s10 >= 5.9;
            ok &= pass;
            parts.push(format!(
                "acrobot {}: β₀=1 |{s1:.3}-{i1:.3}| < 0.3, β₀=10 implicit {i10:.3} (≤ 5.7) standard {s10:.3} (≥ 5.9) [{}]",
                alg.as_str(),
                if pass { "ok" } else { "miss" }
            ));
        }
        for (file, alg) in [
            ("mountain_car_q_learning.toml", Algorithm::QLearning),
            ("mountain_car_sarsa.toml", Algorithm::Sarsa),
        ] {
            let res = continuous(file, &[5.0])?;
            let s5 = final_ll(&res, alg, UpdateMode::Standard, 5.0);
            let i5 = final_ll(&res, alg, UpdateMode::Implicit, 5.0);
            let pass = i5 <= 5.1 && s5 >= 5.15;
            ok &= pass;
            parts.push(format!(
                "mountain_car {}: β₀=5 implicit {i5:.3} (≤ 5.1) standard {s5:.3} (≥ 5.15) [{}]",
                alg.as_str(),
                if pass { "ok" } else { "miss" }
            ));
        }
        Ok((ok, parts))
    });
    match out {
        Ok((ok, parts)) => {
            let fast = dt < Duration::from_secs(30 * 60);
            Line {
                id: 6,
                name: "continuous-env stability",
                passed: ok && fast,
                detail: format!("{}; {:.1} s (< 1800 s)", parts.join("; "), dt.as_secs_f64()),
            }
        }
        Err(e) => Line {
            id: 6,
            name: "continuous-env stability",
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn c7() -> Line {
    let check = theory_constant_suite(1000, 7);
    Line {
        id: 7,
        name: "theory-constant calculators",
        passed: check.passed,
        detail: check.detail,
    }
}

fn c8() -> Line {
    let data = root().join("crates/core/tests/data");
    let cases = [
        (EnvKind::CliffWalking, "cliff_walking.csv", 0.0),
        (EnvKind::Taxi, "taxi.csv", 0.0),
        (EnvKind::MountainCar, "mountain_car.csv", 1e-10),
        (EnvKind::Acrobot, "acrobot.csv", 1e-10),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, file, tol) in cases {
        match Trajectory::read(&data.join(file)).and_then(|t| replay(kind, &t)) {
            Ok(r) => {
                ok &= r.steps == 100 && r.within(tol);
                parts.push(format!(
                    "{kind} {} steps, max state error {:.1e} (≤ {tol:.0e}), {} reward / {} terminal mismatches",
                    r.steps, r.max_state_error, r.reward_mismatches, r.terminal_mismatches
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{kind}: error {e}"));
            }
        }
    }
    Line {
        id: 8,
        name: "environment fidelity",
        passed: ok,
        detail: parts.join("; "),
    }
}

fn cli_sweep(cfg: &Path, out: &Path, jobs: usize) -> Option<Vec<u8>> {
    let output = Command::new(env!("CARGO_BIN_EXE_implicit-control"))
        .arg("--out-dir")
        .arg(out)
        .args(["--jobs", &jobs.to_string(), "sweep"])
        .arg(cfg)
        .args(["--betas", "0.5,2.0"])
        .output()
        .ok()?;
    if !output.status.success() {
        return None;
    }
    std::fs::read(out.join("determinism_sweep.csv")).ok()
}

fn c9() -> Line {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut cfg = config("cliff_walking_q_learning.toml");
    cfg.name = Some("determinism".into());
    cfg.n_runs = 8;
    cfg.n_episodes = 50;
    let cfg_path = dir.path().join("determinism.toml");
    std::fs::write(&cfg_path, cfg.to_toml_string()).expect("write config");
    let outputs: Vec<Option<Vec<u8>>> = [(1, "a"), (1, "b"), (8, "c"), (8, "d")]
        .iter()
        .map(|(jobs, sub)| cli_sweep(&cfg_path, &dir.path().join(sub), *jobs))
        .collect();
    let all_ran = outputs.iter().all(Option::is_some);
    let same = all_ran && outputs.windows(2).all(|w| w[0] == w[1]);
    let bytes = outputs[0].as_ref().map_or(0, Vec::len);
    let verdict = if !all_ran {
        "an invocation failed"
    } else if same {
        "byte-identical"
    } else {
        "outputs differ"
    };
    Line {
        id: 9,
        name: "determinism",
        passed: same && bytes > 0,
        detail: format!("4 sweep invocations (--jobs 1 twice, --jobs 8 twice): {verdict} ({bytes} bytes)"),
    }
}

fn main() {
    let criteria: [fn() -> Line; 9] = [c1, c2, c3, c4, c5, c6, c7, c8, c9];
    let mut failed = 0;
    for c in criteria {
        let line = c();
        println!(
            "{} criterion {} ({}): {}",
            if line.passed { "PASS" } else { "FAIL" },
            line.id,
            line.name,
            line.detail
        );
        failed += usize::from(!line.passed);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
