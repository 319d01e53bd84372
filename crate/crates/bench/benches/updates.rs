use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use implicit_control::control::{apply_update, run_episode, ScheduleClock};
use implicit_control::envs::{CliffWalking, MountainCar};
use implicit_control::features::build_rbf_map;
use implicit_control::{
    AgentConfig, Algorithm, Environment, FeatureMap, FeatureVector, ParameterVector, PolicyConfig, RbfSpec, State,
    StepSizeSchedule, UpdateMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mountain_car_features() -> FeatureMap {
    build_rbf_map(RbfSpec {
        length_scales: vec![5.0, 2.0, 1.0, 0.5],
        components_per_scale: 100,
        state_dimension: 2,
        state_bounds: vec![(-1.2, 0.6), (-0.07, 0.07)],
        n_actions: 3,
        seed: 0,
    })
    .unwrap()
}

fn updates(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let dim = 1200;
    let theta = ParameterVector::from_vec((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect());
    let block: Vec<f64> = (0..400).map(|_| rng.random_range(-0.05..0.05)).collect();
    let phi = FeatureVector::block(dim, 400, block).unwrap();
    for mode in [UpdateMode::Standard, UpdateMode::Implicit] {
        c.bench_function(&format!("apply_update/{}/1200", mode.as_str()), |b| {
            b.iter(|| apply_update(black_box(&theta), black_box(&phi), 0.3, 10.0, mode, 1000.0).unwrap())
        });
    }
}

fn features(c: &mut Criterion) {
    let fm = mountain_car_features();
    let state = State::Continuous(vec![-0.5, 0.01]);
    c.bench_function("rbf/features_all_actions/400x3", |b| {
        b.iter(|| fm.features_all_actions(black_box(&state)).unwrap())
    });
}

fn agent(algorithm: Algorithm, schedule: StepSizeSchedule) -> AgentConfig {
    AgentConfig {
        algorithm,
        mode: UpdateMode::Implicit,
        schedule,
        gamma: 0.99,
        radius: 1000.0,
        policy: PolicyConfig::epsilon_greedy(0.1),
        clock: ScheduleClock::default(),
        initial_weight: 0.0,
    }
}

fn episodes(c: &mut Criterion) {
    let cliff = agent(Algorithm::QLearning, StepSizeSchedule::constant(0.5).unwrap());
    let one_hot = FeatureMap::one_hot(48, 4);
    c.bench_function("episode/cliff_walking/q_learning", |b| {
        b.iter_batched(
            || (cliff.initial_parameters(192), ChaCha8Rng::seed_from_u64(1)),
            |(mut theta, mut rng)| {
                let mut env = CliffWalking::new();
                let mut global = 0;
                run_episode(&cliff, &mut theta, &mut env, &one_hot, &mut rng, &mut global, 0, 10_000, &mut ()).unwrap()
            },
            BatchSize::SmallInput,
        )
    });

    let mc = agent(Algorithm::Sarsa, StepSizeSchedule::polynomial(5.0, 2.0 / 3.0).unwrap());
    let rbf = mountain_car_features();
    c.bench_function("episode/mountain_car/sarsa_200_steps", |b| {
        b.iter_batched(
            || (mc.initial_parameters(rbf.dimension()), ChaCha8Rng::seed_from_u64(2)),
            |(mut theta, mut rng)| {
                let mut env = MountainCar::new();
                let env: &mut dyn Environment = &mut env;
                let mut global = 0;
                run_episode(&mc, &mut theta, env, &rbf, &mut rng, &mut global, 0, 200, &mut ()).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, updates, features, episodes);
criterion_main!(benches);
