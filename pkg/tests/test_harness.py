from __future__ import annotations

import json
import math

import numpy as np
import pytest

from arcadelab.env import make_env
from arcadelab.env.games import CROSSING_AVATAR, CROSSING_CAR, chain_mdp
from arcadelab.harness import (
    ExperimentConfig, PreprocessingMissing, RunRecord, SplitMixError, baseline_configs, build_preprocessing,
    load_config, make_report, parse_config_text, run_experiment,
)
from arcadelab.harness.cli import main
from arcadelab.harness.preprocess import build_background, build_classes, model_path
from arcadelab.harness.svg import bars, step_curves
from arcadelab.planners import random_policy_moments

FAST = (("max_frames", 200), ("training_episodes", 3), ("evaluation_episodes", 2))


def _record(game, agent, scores, split="training", features=None, **ov):
    cfg = ExperimentConfig(game, agent, features, len(scores), 0, split, tuple(ov.items()))
    return RunRecord(cfg.to_dict(), cfg.config_hash(), list(range(len(scores))), [[s] for s in scores],
                     [float(s) for s in scores], 0.0, "test")


# ---------------------------------------------------------------- configs
def test_config_defaults_and_validation():
    assert ExperimentConfig("crossing", "uct").n_trials == 10
    assert ExperimentConfig("crossing", "sarsa", "ram").n_trials == 30
    with pytest.raises(ValueError):
        ExperimentConfig("crossing", "uct", "ram")
    with pytest.raises(ValueError):
        ExperimentConfig("crossing", "sarsa")
    with pytest.raises(ValueError):
        ExperimentConfig("crossing", "random", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("crossing", "random", overrides=(("bogus", 1),))
    with pytest.raises(ValueError):
        ExperimentConfig("crossing", "random", split="validation")


def test_config_text_roundtrip(tmp_path):
    text = """
    # a comment
    game = crossing
    agent = sarsa
    features = bass
    trials = 2
    seed = 7
    max_frames = 1000   # trailing comment
    alpha = 0.25
    reuse = false
    """
    cfg = parse_config_text(text)
    assert cfg.seed == 7 and cfg.param("max_frames") == 1000 and cfg.param("alpha") == 0.25
    assert cfg.param("reuse") is False
    assert cfg.rl_config().alpha == 0.25 and cfg.rl_config().lam == 0.9
    p = tmp_path / "c.cfg"
    p.write_text(cfg.to_text())
    assert load_config(p) == cfg
    assert load_config(p).config_hash() == cfg.config_hash()


def test_config_hash_binds_parameters():
    a = ExperimentConfig("crossing", "uct", overrides=(("simulations", 50),))
    b = ExperimentConfig("crossing", "uct", overrides=(("simulations", 51),))
    c = ExperimentConfig("crossing", "uct", overrides=(("simulations", 50),))
    assert a.config_hash() != b.config_hash() and a.config_hash() == c.config_hash()
    with pytest.raises(ValueError):
        parse_config_text("game = crossing\n")
    with pytest.raises(ValueError):
        parse_config_text("game = crossing\nagent = uct\njunk line\n")


def test_baseline_configs():
    cfgs = baseline_configs("crossing", 2, 0)
    assert len(cfgs) == 37
    assert len({c.label for c in cfgs}) == 37


# ---------------------------------------------------------------- running
def test_run_is_deterministic_and_parallel_invariant(tmp_path):
    cfg = ExperimentConfig("crossing", "sarsa", "bass", 2, 5, overrides=FAST + (("background_samples", 300),))
    a = run_experiment(cfg, tmp_path, workers=1)
    b = run_experiment(cfg, tmp_path, workers=2)
    assert a.to_json(include_wall_clock=False) == b.to_json(include_wall_clock=False)
    assert a.seeds == [5, 6]
    assert all(len(s) == 5 for s in a.scores)
    assert a.summaries == [float(np.mean(s[3:])) for s in a.scores]


def test_record_roundtrip(tmp_path):
    rec = run_experiment(ExperimentConfig("chainworld", "random", None, 2, overrides=(("episodes", 3),)), tmp_path)
    files = list((tmp_path / "runs").glob("*.json"))
    assert len(files) == 1
    back = RunRecord.load(files[0])
    assert back == rec
    assert back.config_hash == ExperimentConfig.from_dict(back.config).config_hash()


def test_random_agent_on_chainworld_matches_exact_return():
    episodes = 100
    cfg = ExperimentConfig("chainworld", "random", None, 1, 3,
                           overrides=(("episodes", episodes), ("max_frames", 200), ("n_states", 4)))
    rec = run_experiment(cfg)
    mean, var = random_policy_moments(chain_mdp(4), 200 // 5)
    assert abs(np.mean(rec.scores[0]) - mean) <= 3 * math.sqrt(var / episodes)


def test_planner_trial(tmp_path):
    cfg = ExperimentConfig("chainworld", "uct", None, 1, overrides=(("simulations", 30), ("max_frames", 100),
                                                                     ("max_depth_frames", 50), ("n_states", 4)))
    rec = run_experiment(cfg, tmp_path)
    assert rec.scores[0] == [1.0]  # reaches the end of the chain
    bfs = run_experiment(ExperimentConfig("chainworld", "bfs", None, 1, overrides=(
        ("bfs_frame_budget", 2000), ("max_frames", 100))), tmp_path)
    assert len(bfs.scores[0]) == 1


def test_missing_preprocessing(tmp_path):
    cfg = ExperimentConfig("crossing", "sarsa", "basic", 1, overrides=FAST)
    with pytest.raises(PreprocessingMissing):
        run_experiment(cfg, tmp_path, auto_preprocess=False)
    with pytest.raises(PreprocessingMissing):
        run_experiment(cfg, None)


# ---------------------------------------------------------------- preprocessing
def test_background_and_classes_on_crossing():
    env = make_env("crossing")
    bg = build_background("crossing", 2000, 0)
    assert np.array_equal(bg.modal, env.background())
    model = build_classes("crossing", 1000, 0, bg)
    assert 1 <= len(model) <= 10
    masks = [c.mask for c in model.classes]
    assert any(m.shape == CROSSING_AVATAR.shape and np.array_equal(m, CROSSING_AVATAR) for m in masks)
    assert any(m.shape == CROSSING_CAR.shape and np.array_equal(m, CROSSING_CAR) for m in masks)


def test_preprocessing_is_reproducible(tmp_path):
    kw = dict(seed=2, background_samples=200, class_samples=200)
    a = build_preprocessing("dodger", "disco", tmp_path / "a", **kw)
    b = build_preprocessing("dodger", "disco", tmp_path / "b", **kw)
    for k in a:
        assert a[k].read_bytes() == b[k].read_bytes()
    assert a["background"] == model_path(tmp_path / "a", "dodger", "background", 2, 200)
    with pytest.raises(ValueError):
        build_preprocessing("dodger", "basic", tmp_path / "c", background_samples=0)


# ---------------------------------------------------------------- reports
def test_report_times_best_and_distribution(tmp_path):
    recs = []
    for g, (x, y) in zip(["g1", "g2", "g3"], [(1.0, 2.0), (5.0, 3.0), (4.0, 4.0)]):
        recs.append(_record(g, "uct", [x, x + 0.5]))
        recs.append(_record(g, "bfs", [y, y + 0.5]))
        recs.append(_record(g, "random", [0.0, 1.0]))
        recs.append(_record(g, "const", [2.0, 2.0], action=1))
    summary = make_report(recs, tmp_path)
    assert summary["times_best"] == {"bfs": 2, "uct": 2}
    last = (tmp_path / "report" / "means.tsv").read_text().splitlines()[-1]
    assert last.split("\t") == ["Times Best", "2", "2"]
    for curve in summary["distributions"]["inter"].values():
        assert curve[0][1] == 1.0
    for name in ["scores.tsv", "baselines.tsv", "normalized-random.tsv", "normalized-baseline.tsv",
                 "normalized-inter.tsv", "distributions.tsv", "paired.txt", "aggregates.svg", "summary.json"]:
        assert (tmp_path / "report" / name).exists()
    assert set(json.loads((tmp_path / "report" / "summary.json").read_text())["records"]) == {r.config_hash for r in recs}


def test_report_refuses_mixed_splits(tmp_path):
    recs = [_record("g1", "uct", [1.0, 2.0]), _record("g2", "uct", [1.0, 2.0], split="testing")]
    with pytest.raises(SplitMixError):
        make_report(recs, tmp_path)
    make_report(recs, tmp_path, allow_mixed_split=True)


def test_report_needs_algorithms(tmp_path):
    with pytest.raises(ValueError):
        make_report([], tmp_path)
    with pytest.raises(ValueError):
        make_report([_record("g", "random", [1.0, 2.0])], tmp_path)


def test_svg_output():
    doc = step_curves({"a": [(0.2, 1.0), (0.8, 0.5)]}, "t")
    assert doc.startswith("<svg") and doc.rstrip().endswith("</svg>") and "<path" in doc
    assert "<rect" in bars({"avg": {"a": 0.3, "b": -0.1}}, "t", "y")


# ---------------------------------------------------------------- CLI
def test_cli_pipeline(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ARCADELAB_OUT_DIR", str(tmp_path))
    assert main(["run", "--game", "chainworld", "--agent", "uct", "--trials", "2", "--set", "simulations=20",
                 "--set", "max_frames=60", "--set", "max_depth_frames=30"]) == 0
    assert main(["baselines", "--game", "chainworld", "--trials", "2", "--set", "max_frames=60"]) == 0
    assert main(["report"]) == 0
    assert (tmp_path / "report" / "summary.json").exists()
    assert len(list((tmp_path / "runs").glob("*.json"))) == 38
    capsys.readouterr()
    assert main(["oracle", "--kind", "value-iteration", "--gamma", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["V"][8] == 1.0
    assert main(["oracle", "--kind", "random-return", "--steps", "3"]) == 0


def test_cli_config_file_and_errors(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("game = chainworld\nagent = random\ntrials = 1\nepisodes = 2\n")
    assert main(["run", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    assert main(["run", "--game", "nowhere", "--agent", "random", "--out-dir", str(tmp_path)]) == 2
    assert main(["report", "--out-dir", str(tmp_path / "empty")]) == 2
    assert main(["run", "--game", "crossing", "--agent", "sarsa", "--features", "basic", "--no-auto-preprocess",
                 "--out-dir", str(tmp_path)]) == 2
