"""Regenerate the golden environment trajectories under crates/core/tests/data.

Requires gymnasium (tested with 1.4.0). Each file holds 100 steps of a fixed
pseudo-random action script from a seeded reset, with no resets in between;
a trajectory stops early if the episode terminates.
"""

import csv
import pathlib

import gymnasium as gym
import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "data"
STEPS = 100

ENVS = {
    "cliff_walking": ("CliffWalking-v1", ["s"]),
    "taxi": ("Taxi-v4", ["s"]),
    "mountain_car": ("MountainCar-v0", ["position", "velocity"]),
    "acrobot": ("Acrobot-v1", ["theta1", "theta2", "dtheta1", "dtheta2"]),
}


def g17(x):
    return "%.17g" % x


def internal_state(name, env, obs):
    if name in ("cliff_walking", "taxi"):
        return [int(obs)]
    return [float(v) for v in env.unwrapped.state]


def shortest_plan(env, start):
    """Breadth-first action sequence from `start` to a terminal transition."""
    table = env.unwrapped.P
    parent = {start: None}
    queue = [start]
    while queue:
        s = queue.pop(0)
        for a, outcomes in table[s].items():
            _, s2, _, done = outcomes[0]
            if done:
                plan = [a]
                while parent[s] is not None:
                    s, prev_a = parent[s]
                    plan.append(prev_a)
                return plan[::-1]
            if s2 not in parent:
                parent[s2] = (s, a)
                queue.append(s2)
    raise RuntimeError("no terminal state reachable")


def generate(name, env_id, columns, seed, to_terminal=False, suffix=""):
    env = gym.make(env_id)
    obs, _ = env.reset(seed=seed)
    actions = np.random.default_rng(seed).integers(env.action_space.n, size=STEPS)
    if to_terminal:
        # A short random prefix, then the shortest route to termination.
        prefix = [int(a) for a in actions[:10]]
        probe = gym.make(env_id)
        probe.reset(seed=seed)
        for a in prefix:
            s = probe.step(a)[0]
        actions = prefix + shortest_plan(probe, int(s))
    rows = [[0, *internal_state(name, env, obs), -1, 0.0, 0]]
    for t, a in enumerate(actions, start=1):
        obs, reward, terminated, _, _ = env.step(int(a))
        rows.append([t, *internal_state(name, env, obs), int(a), float(reward), int(terminated)])
        if terminated:
            break
    path = OUT / f"{name}{suffix}.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["t", *columns, "action", "reward", "terminal"])
        for r in rows:
            w.writerow([g17(v) if isinstance(v, float) else v for v in r])
    print(f"{path}: {len(rows) - 1} steps")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for i, (name, (env_id, cols)) in enumerate(ENVS.items()):
        generate(name, env_id, cols, seed=100 + i)
    generate("cliff_walking", *ENVS["cliff_walking"], seed=200, to_terminal=True, suffix="_goal")
    generate("taxi", *ENVS["taxi"], seed=201, to_terminal=True, suffix="_delivery")
