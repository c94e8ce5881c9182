"""Seeded, optionally parallel execution of experiment trials."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..agents.baselines import BaselinePolicy, run_policy
from ..agents.sarsa import run_rl_trial
from ..env.games import make_env
from ..features import make_encoder
from ..planners.bfs import bfs_plan
from ..planners.uct import UCTPlanner
from .config import PLANNERS, ExperimentConfig
from .preprocess import REQUIRED_MODELS, PreprocessingMissing, build_preprocessing, load_models, model_path


@dataclass
class RunRecord:
    config: dict
    config_hash: str
    seeds: list[int]
    scores: list[list[float]]  # per trial, per episode
    summaries: list[float]  # per trial: mean of evaluation episodes (RL) or of all episodes
    wall_clock: float
    version: str

    @property
    def label(self) -> str:
        return ExperimentConfig.from_dict(self.config).label

    def to_json(self, include_wall_clock: bool = True) -> str:
        d = asdict(self)
        if not include_wall_clock:
            d.pop("wall_clock")
        return json.dumps(d, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        d = json.loads(text)
        d.setdefault("wall_clock", 0.0)
        return cls(**d)

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    @classmethod
    def load(cls, path) -> "RunRecord":
        return cls.from_json(Path(path).read_text())


def trial_seeds(config: ExperimentConfig) -> list[int]:
    return [config.seed + i for i in range(config.n_trials)]


def _episode_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.default_rng([seed, 0]).integers(0, 2 ** 62, size=n)]


def _make_env(config: ExperimentConfig, seed: int):
    return make_env(config.game, config.episode_config(seed), **config.env_kwargs())


def run_planner_episode(env, config: ExperimentConfig, seed: int) -> float:
    pcfg = config.planner_config()
    planner = UCTPlanner(env, pcfg, seed=seed) if config.agent == "uct" else None
    total = 0.0
    while not env.terminal:
        if planner is not None:
            a = planner.plan(env.save_state())
        else:
            a = bfs_plan(env, pcfg)
        r, _ = env.emulate(a)
        total += r
    return total


def run_trial(config: ExperimentConfig, seed: int, model_paths: dict | None = None) -> tuple[list[float], float]:
    """One trial; returns (episode scores, trial summary)."""
    env = _make_env(config, seed)
    if config.agent == "sarsa":
        models = load_models(model_paths or {})
        enc = make_encoder(config.features, frames_per_action=config.param("frames_per_action"),
                           lsh_literal=config.param("lsh_literal"), **models)
        res = run_rl_trial(env, enc, config.rl_config(), seed=seed,
                           training_episodes=config.param("training_episodes"),
                           evaluation_episodes=config.param("evaluation_episodes"))
        return res.scores, res.performance
    episodes = config.param("episodes")
    if config.agent in PLANNERS:
        scores = []
        for i, s in enumerate(_episode_seeds(seed, episodes)):
            env.reset(config.episode_config(s))
            scores.append(run_planner_episode(env, config, seed * 1_000_003 + i))
        return scores, float(np.mean(scores))
    policy = BaselinePolicy(config.agent, config.param("action"), config.param("p") if config.agent == "perturb" else 1.0)
    scores = run_policy(env, policy, episodes, seed)
    return scores, float(np.mean(scores))


def _run_trial_job(args):
    config_dict, seed, paths = args
    return run_trial(ExperimentConfig.from_dict(config_dict), seed, paths)


def ensure_preprocessing(config: ExperimentConfig, out_dir, auto_build: bool = True) -> dict:
    if config.agent != "sarsa" or not REQUIRED_MODELS[config.features]:
        return {}
    kw = dict(seed=config.seed, background_samples=config.param("background_samples"),
              class_samples=config.param("class_samples"))
    if not auto_build:
        paths = {}
        for kind in REQUIRED_MODELS[config.features]:
            samples = {"background": kw["background_samples"], "classes": kw["class_samples"]}.get(kind)
            p = model_path(out_dir, config.game, kind, config.seed, samples)
            if not p.exists():
                raise PreprocessingMissing(f"missing preprocessing model {p}; run 'preprocess' first")
            paths[kind] = p
        return paths
    return build_preprocessing(config.game, config.features, out_dir, episode=config.episode_config(),
                               env_kwargs=config.env_kwargs(), **kw)


def run_experiment(config: ExperimentConfig, out_dir=None, workers: int = 1, auto_preprocess: bool = True,
                   save: bool = True) -> RunRecord:
    """Run every trial (seed + trial index) and optionally write the record under ``out_dir/runs``."""
    start = time.perf_counter()
    paths = ensure_preprocessing(config, out_dir, auto_preprocess) if out_dir is not None else {}
    if config.agent == "sarsa" and REQUIRED_MODELS[config.features] and not paths:
        raise PreprocessingMissing("feature models need an output directory to live in")
    seeds = trial_seeds(config)
    jobs = [(config.to_dict(), s, {k: str(v) for k, v in paths.items()}) for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial_job, jobs))
    else:
        results = [_run_trial_job(j) for j in jobs]
    record = RunRecord(
        config=config.to_dict(), config_hash=config.config_hash(), seeds=seeds,
        scores=[list(map(float, r[0])) for r in results], summaries=[float(r[1]) for r in results],
        wall_clock=time.perf_counter() - start, version=__version__,
    )
    if save and out_dir is not None:
        record.save(record_path(out_dir, record))
    return record


def record_path(out_dir, record: RunRecord) -> Path:
    c = record.config
    return Path(out_dir) / "runs" / f"{c['game']}-{record.label}-{record.config_hash[:12]}.json"


def baseline_configs(game: str, trials: int | None, seed: int, split: str = "training", **overrides) -> list[ExperimentConfig]:
    """The 37 baseline policies as experiment configs."""
    out = [ExperimentConfig(game, "random", None, trials, seed, split, tuple(overrides.items()))]
    for kind in ("const", "perturb"):
        for a in range(18):
            ov = dict(overrides, action=a)
            out.append(ExperimentConfig(game, kind, None, trials, seed, split, tuple(ov.items())))
    return out


def load_records(out_dir) -> list[RunRecord]:
    return [RunRecord.load(p) for p in sorted((Path(out_dir) / "runs").glob("*.json"))]
