"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from arcadelab.agents import LinearQ, RlConfig, run_rl_trial
from arcadelab.env import ChainWorld, EpisodeConfig, chain_mdp, make_env, random_mdp
from arcadelab.features import BASIC_DIM, BASS_DIM, RAM_DIM, LshModel, RamEncoder, lsh_features, ram_features
from arcadelab.harness import ExperimentConfig, run_experiment
from arcadelab.harness.cli import main as cli
from arcadelab.metrics import (
    ScoreDistribution, baseline_range, inter_algorithm_scores, normalize, paired_matrix, random_range, welch_test,
)
from arcadelab.planners import (
    PlannerConfig, UCTPlanner, bfs_plan, enumerate_plan, optimal_actions, policy_evaluation, uct_plan,
    value_iteration,
)
from helpers import criterion, random_score_table, welch_p_oracle

GAMES = ("crossing", "dodger", "gatherer", "chainworld")


def test_criterion_1_feature_dimensions():
    with criterion(1, "feature dimensionality", 1.0):
        assert BASIC_DIM == 28_672
        assert RAM_DIM == 524_800
        assert BASS_DIM == 1_606_528
        model = LshModel.generate(0)
        assert model.dimension == 100_000
        for game in ("crossing", "dodger", "gatherer"):
            env = make_env(game)
            for _ in range(3):
                f = lsh_features(env.screen(), model)
                assert f.dimension == 100_000 and len(f) == 2000
                env.emulate(3)


def _steps(env, actions):
    out = []
    for a in actions:
        if env.terminal:
            break
        r, t = env.emulate(int(a))
        out.append((r, t, env.save_state().payload))
    return out


def test_criterion_2_snapshot_soundness():
    with criterion(2, "snapshot save/diverge/restore/replay", 30.0) as c:
        cycles = 0
        for gi, game in enumerate(GAMES):
            rng = np.random.default_rng(gi)
            env = make_env(game, EpisodeConfig(seed=gi))
            for _ in range(1000):
                if env.terminal:
                    env.reset(env.config.with_seed(int(rng.integers(2 ** 31))))
                snap = env.save_state()
                actions = rng.integers(18, size=int(rng.integers(1, 30)))
                first = _steps(env, actions)
                screen, ram = env.screen(), env.ram()
                env.restore_state(snap)
                _steps(env, rng.integers(18, size=int(rng.integers(1, 30))))
                env.restore_state(snap)
                assert _steps(env, actions) == first
                assert np.array_equal(env.screen(), screen) and np.array_equal(env.ram(), ram)
                cycles += 1
        c.detail = f"{cycles} cycles"


def test_criterion_3_sarsa_matches_value_iteration():
    with criterion(3, "SARSA greedy policy vs value iteration", 60.0) as c:
        mdp, gamma = chain_mdp(10), 0.999
        V, Q = value_iteration(mdp, gamma)
        good, worst = 0, 0.0
        live = [s for s in range(mdp.n_states) if not mdp.terminal[s]]
        for seed in range(30):
            env = ChainWorld(EpisodeConfig(seed=seed), mdp=mdp)
            q = LinearQ(RamEncoder.dimension)
            run_rl_trial(env, RamEncoder(), RlConfig.for_features("ram", gamma=gamma), seed=seed,
                         training_episodes=2000, evaluation_episodes=0, q=q)
            policy = np.zeros(mdp.n_states, dtype=np.int64)
            for s in live:
                env._state[5] = s  # place the agent in state s to read its RAM encoding
                vals = q.values(ram_features(env.ram()))
                policy[s] = int(np.flatnonzero(vals == vals.max())[0])
            good += all(int(policy[s]) in optimal_actions(mdp, Q, s) for s in live)
            worst = max(worst, float(np.max(np.abs(policy_evaluation(mdp, policy, gamma) - V))))
        c.detail = f"{good}/30 optimal, max |V_greedy - V*| = {worst:.2e}"
        assert good >= 28
        assert worst <= 0.05


def test_criterion_4_planner_oracles():
    with criterion(4, "BFS exact and UCT >= 95/100 vs enumeration", 300.0) as c:
        depth, gamma = 3, 0.999
        bfs_ok = uct_ok = 0
        for s in range(100):
            env = ChainWorld(EpisodeConfig(seed=s), mdp=random_mdp(s, max_reward=1))
            state = env.save_state()
            oracle = enumerate_plan(env.clone(), state, depth, gamma)
            b = bfs_plan(env, PlannerConfig(gamma=gamma, bfs_frame_budget=10 ** 7, bfs_max_depth=depth))
            bfs_ok += b == oracle.action
            u = uct_plan(env, PlannerConfig(simulations=500, max_depth_frames=depth * 5, exploration=0.1,
                                            gamma=gamma, reuse=False), seed=s)
            uct_ok += u in oracle.optimal_set()
        c.detail = f"BFS {bfs_ok}/100, UCT {uct_ok}/100"
        assert bfs_ok == 100
        assert uct_ok >= 95


def test_criterion_5_duplicate_merge_on_dodger():
    with criterion(5, "duplicate children merged on Dodger", 30.0) as c:
        env = make_env("dodger", EpisodeConfig(seed=3))
        rng = np.random.default_rng(0)
        checked = 0
        counts = []
        while checked < 40:
            if env.terminal:
                env.reset(env.config.with_seed(checked))
            state = env.save_state()
            probe = env.clone()
            distinct = set()
            for a in range(18):
                probe.restore_state(state)
                probe.emulate(a)
                distinct.add(probe.save_state().payload)
            planner = UCTPlanner(env, PlannerConfig(simulations=30, max_depth_frames=25), seed=checked)
            planner.sim.restore_state(state)
            planner.tree.reset(state)
            while planner.tree.root.untried:
                planner.sample()
            assert planner.tree.root.branching == len(distinct)
            counts.append(len(distinct))
            checked += 1
            env.emulate(int(rng.integers(18)))
        assert max(counts) < 18
        c.detail = f"{checked} states, branching {min(counts)}..{max(counts)} of 18"


def test_criterion_6_metric_identities():
    with criterion(6, "metric identities on random tables; Welch p vs oracle", 30.0) as c:
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            table = random_score_table(rng, int(rng.integers(1, 5)), int(rng.integers(2, 5)), int(rng.integers(2, 6)))
            inter = {a: [] for a in table.algorithms}
            for g in table.games:
                means = [table.mean(g, a) for a in table.algorithms]
                for rr in (random_range(means[0] if means[0] != 0 else 1.0), baseline_range(means)):
                    assert normalize(rr.r_min, rr) == 0.0 and normalize(rr.r_max, rr) == 1.0
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    z = inter_algorithm_scores(means)
                assert np.all((z >= 0) & (z <= 1))
                if min(means) != max(means):
                    assert z.min() == 0.0 and z.max() == 1.0
                for a, v in zip(table.algorithms, z):
                    inter[a].append(float(v))
            for zs in inter.values():
                f = ScoreDistribution(zs)
                assert f(0.0) == 1.0
                grid = [f(x) for x in np.linspace(-0.5, 1.5, 41)]
                assert all(x >= y for x, y in zip(grid, grid[1:]))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                m = paired_matrix(table)
            for (a, b), (w, l) in m.items():
                assert m[(b, a)] == (l, w)
        worst = 0.0
        for _ in range(50):
            x = rng.normal(rng.normal(0, 2), rng.uniform(0.3, 3), size=int(rng.integers(2, 40)))
            y = rng.normal(rng.normal(0, 2), rng.uniform(0.3, 3), size=int(rng.integers(2, 40)))
            worst = max(worst, abs(welch_test(x, y).p - welch_p_oracle(x, y)))
        c.detail = f"1000 tables, max Welch p error {worst:.1e}"
        assert worst <= 1e-6


def test_criterion_7_reference_spot_checks():
    with criterion(7, "random-normalized 862.3/288.1 and inter-algorithm 1.0", 1.0):
        z = normalize(862.3, random_range(288.1))
        assert z == 862.3 / 288.1 and round(z, 3) == 2.993
        venture = [0.0, 66.0, 0.0, 0.0, 0.0]  # Basic, BASS, DISCO, LSH, RAM
        assert inter_algorithm_scores(venture)[1] == 1.0


@pytest.mark.slow
def test_criterion_8_search_beats_learning_beats_random(tmp_path):
    with criterion(8, "Crossing: UCT > best SARSA > Random", 900.0) as c:
        common = (("max_frames", 1000),)
        uct = run_experiment(ExperimentConfig("crossing", "uct", None, 1, 0, overrides=common + (("episodes", 30),)))
        rnd = run_experiment(ExperimentConfig("crossing", "random", None, 1, 0, overrides=common + (("episodes", 30),)))
        learn = (("training_episodes", 100), ("evaluation_episodes", 30),
                 ("background_samples", 2000), ("class_samples", 2000))
        sarsa = {}
        for kind in ("basic", "bass", "disco", "lsh", "ram"):
            rec = run_experiment(ExperimentConfig("crossing", "sarsa", kind, 1, 0, overrides=common + learn), tmp_path)
            sarsa[kind] = rec.summaries[0]
        u, r = float(np.mean(uct.scores[0])), float(np.mean(rnd.scores[0]))
        best = max(sarsa, key=sarsa.get)
        c.detail = f"UCT {u:.2f}, SARSA-{best} {sarsa[best]:.2f}, Random {r:.2f}"
        assert u > sarsa[best] > r


def _snapshot_tree(root):
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            rel = str(p.relative_to(root))
            data = p.read_bytes()
            if rel.startswith("runs/"):
                rec = json.loads(data)
                rec.pop("wall_clock")
                data = json.dumps(rec, sort_keys=True).encode()
            out[rel] = data
    return out


def _pipeline(out, workers):
    base = ["--out-dir", str(out), "--seed", "11"]
    fast = ["--set", "max_frames=300", "--set", "background_samples=500", "--set", "class_samples=500"]
    assert cli(["preprocess", "--game", "crossing", *base, *fast]) == 0
    for feats in ("bass", "disco"):
        assert cli(["run", "--game", "crossing", "--agent", "sarsa", "--features", feats, "--trials", "2",
                    "--workers", str(workers), "--no-auto-preprocess", *base, *fast,
                    "--set", "training_episodes=10", "--set", "evaluation_episodes=3"]) == 0
    assert cli(["run", "--game", "crossing", "--agent", "uct", "--trials", "2", "--workers", str(workers), *base,
                "--set", "max_frames=300", "--set", "simulations=40", "--set", "max_depth_frames=60"]) == 0
    assert cli(["run", "--game", "crossing", "--agent", "random", "--trials", "2", "--workers", str(workers), *base,
                "--set", "max_frames=300", "--set", "episodes=3"]) == 0
    assert cli(["report", *base]) == 0


def test_criterion_9_end_to_end_determinism(tmp_path):
    with criterion(9, "preprocess -> run -> report is byte-identical across repeats and worker counts", 600.0) as c:
        _pipeline(tmp_path / "a", 1)
        _pipeline(tmp_path / "b", 2)
        a, b = _snapshot_tree(tmp_path / "a"), _snapshot_tree(tmp_path / "b")
        assert sorted(a) == sorted(b)
        assert any(k.startswith("report/") for k in a) and any(k.startswith("models/") for k in a)
        diff = [k for k in a if a[k] != b[k]]
        c.detail = f"{len(a)} files compared"
        assert not diff, f"differing files: {diff}"
