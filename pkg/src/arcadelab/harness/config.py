"""Experiment configuration and its key-value text format.

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
The keys ``game``, ``agent``, ``features``, ``trials``, ``seed`` and ``split``
fill the main fields; every other key becomes a parameter override::

    game = crossing
    agent = sarsa
    features = ram
    trials = 2
    seed = 7
    split = training
    max_frames = 1000
    training_episodes = 50

Values are read as int, then float, then ``true``/``false``, else left as
strings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .. import __version__
from ..agents.sarsa import FEATURE_DEFAULTS, RlConfig
from ..env.core import EpisodeConfig
from ..features import FEATURE_KINDS
from ..planners.tree import PlannerConfig

AGENTS = ("sarsa", "random", "const", "perturb", "bfs", "uct")
PLANNERS = ("bfs", "uct")
BASELINES = ("random", "const", "perturb")
SPLITS = ("training", "testing")

# every override key the harness understands, with its default
OVERRIDE_DEFAULTS = {
    # episodes
    "frames_per_action": 5,
    "max_frames": 18_000,
    # learning
    "training_episodes": 5000,
    "evaluation_episodes": 500,
    "alpha": None,
    "lam": None,
    "epsilon": 0.05,
    "gamma": 0.999,
    "normalize": True,
    "trace_threshold": 1e-3,
    # planners and baselines: episodes per trial
    "episodes": 1,
    "simulations": 500,
    "max_depth_frames": 300,
    "exploration": 0.1,
    "bfs_frame_budget": 133_000,
    "bfs_max_depth": None,
    "ucb": "standard",
    "reuse": True,
    # baselines
    "action": 0,
    "p": 0.95,
    # preprocessing
    "background_samples": 18_000,
    "class_samples": 36_000,
    "lsh_literal": False,
    # ChainWorld layout
    "layout": "chain",
    "layout_seed": 0,
    "n_states": 10,
}


def parse_value(text: str):
    t = text.strip()
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    low = t.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null", ""):
        return None
    return t


@dataclass(frozen=True)
class ExperimentConfig:
    game: str
    agent: str
    features: str | None = None
    trials: int | None = None
    seed: int = 0
    split: str = "training"
    overrides: tuple[tuple[str, object], ...] = field(default=())

    def __post_init__(self):
        if self.agent not in AGENTS:
            raise ValueError(f"unknown agent {self.agent!r}; expected one of {AGENTS}")
        if self.agent == "sarsa":
            if self.features not in FEATURE_KINDS:
                raise ValueError(f"sarsa needs a feature kind from {FEATURE_KINDS}")
        elif self.features is not None:
            raise ValueError(f"{self.agent} agents take no feature kind")
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = [k for k, _ in self.overrides if k not in OVERRIDE_DEFAULTS]
        if unknown:
            raise ValueError(f"unknown parameter overrides: {unknown}")
        object.__setattr__(self, "overrides", tuple(sorted(self.overrides)))

    @property
    def n_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        return 10 if self.agent in PLANNERS else 30

    def param(self, key: str):
        return dict(self.overrides).get(key, OVERRIDE_DEFAULTS[key])

    def with_overrides(self, **kw) -> "ExperimentConfig":
        merged = dict(self.overrides)
        merged.update(kw)
        return replace(self, overrides=tuple(merged.items()))

    @property
    def label(self) -> str:
        """Algorithm name used as a column in score tables."""
        if self.agent == "sarsa":
            return f"sarsa-{self.features}"
        if self.agent in ("const", "perturb"):
            return f"{self.agent}_{self.param('action')}"
        return self.agent

    def episode_config(self, seed: int = 0) -> EpisodeConfig:
        return EpisodeConfig(self.param("frames_per_action"), self.param("max_frames"), seed)

    def env_kwargs(self) -> dict:
        if self.game == "chainworld":
            return {"layout": self.param("layout"), "layout_seed": self.param("layout_seed"),
                    "n_states": self.param("n_states")}
        return {}

    def rl_config(self) -> RlConfig:
        base = FEATURE_DEFAULTS[self.features]
        return RlConfig(
            alpha=self.param("alpha") if self.param("alpha") is not None else base["alpha"],
            lam=self.param("lam") if self.param("lam") is not None else base["lam"],
            epsilon=self.param("epsilon"), gamma=self.param("gamma"),
            normalize=self.param("normalize"), trace_threshold=self.param("trace_threshold"),
        )

    def planner_config(self) -> PlannerConfig:
        return PlannerConfig(
            simulations=self.param("simulations"), max_depth_frames=self.param("max_depth_frames"),
            exploration=self.param("exploration"), gamma=self.param("gamma"),
            bfs_frame_budget=self.param("bfs_frame_budget"), bfs_max_depth=self.param("bfs_max_depth"),
            ucb=self.param("ucb"), reuse=self.param("reuse"),
        )

    def to_dict(self) -> dict:
        return {"game": self.game, "agent": self.agent, "features": self.features, "trials": self.n_trials,
                "seed": self.seed, "split": self.split, "overrides": dict(self.overrides)}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(d["game"], d["agent"], d.get("features"), d.get("trials"), d.get("seed", 0),
                   d.get("split", "training"), tuple((d.get("overrides") or {}).items()))

    def config_hash(self) -> str:
        blob = json.dumps({"config": self.to_dict(), "version": __version__}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"{k} = {d[k]}" for k in ("game", "agent", "features", "trials", "seed", "split") if d[k] is not None]
        lines += [f"{k} = {v}" for k, v in sorted(d["overrides"].items())]
        return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> ExperimentConfig:
    main: dict = {}
    overrides = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in ("game", "agent", "features", "split"):
            main[key] = value or None
        elif key in ("trials", "seed"):
            main[key] = int(value)
        else:
            overrides[key] = parse_value(value)
    for k in ("game", "agent"):
        if k not in main:
            raise ValueError(f"config is missing {k!r}")
    return ExperimentConfig(main["game"], main["agent"], main.get("features"), main.get("trials"),
                            main.get("seed", 0), main.get("split") or "training", tuple(overrides.items()))


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())
