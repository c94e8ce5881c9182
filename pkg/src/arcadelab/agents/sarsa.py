"""SARSA(lambda) with linear function approximation over sparse binary features."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from ..env.core import N_ACTIONS, EpisodeConfig, Environment
from ..features import modelio
from ..features.sparse import SparseBinaryFeatures

KIND = b"SRSA"


class DivergenceError(ArithmeticError):
    """Raised when a TD error stops being finite; carries diagnostics."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class RlConfig:
    alpha: float = 0.5
    lam: float = 0.9
    epsilon: float = 0.05
    gamma: float = 0.999
    normalize: bool = True  # divide alpha by the number of active features
    trace_threshold: float = 1e-3  # traces below this are dropped

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        for name in ("lam", "epsilon", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.trace_threshold < 0:
            raise ValueError("trace_threshold must be non-negative")

    @classmethod
    def for_features(cls, kind: str, **overrides) -> "RlConfig":
        return replace(cls(**FEATURE_DEFAULTS[kind]), **overrides)


FEATURE_DEFAULTS = {
    "basic": {"alpha": 0.5, "lam": 0.9},
    "bass": {"alpha": 0.5, "lam": 0.9},
    "disco": {"alpha": 0.1, "lam": 0.9},
    "ram": {"alpha": 0.2, "lam": 0.5},
    "lsh": {"alpha": 0.5, "lam": 0.5},
}


class LinearQ:
    """Per-action weight vectors plus sparse replacing traces.

    Weights are one dense ``(n_actions, dimension)`` array; zero pages of a
    large array are never touched, so only features that were actually seen
    cost memory. Traces live as parallel arrays of flat keys
    (``action * dimension + index``) and values.
    """

    def __init__(self, dimension: int, n_actions: int = N_ACTIONS):
        self.dimension = int(dimension)
        self.n_actions = n_actions
        self.weights = np.zeros((n_actions, self.dimension), dtype=np.float64)
        self._flat = self.weights.reshape(-1)
        self.clear_traces()

    def clear_traces(self) -> None:
        self.trace_keys = np.empty(0, dtype=np.int64)
        self.trace_values = np.empty(0, dtype=np.float64)

    def traces(self) -> np.ndarray:
        """Dense copy of the traces (tests and debugging only)."""
        out = np.zeros(self.weights.size)
        out[self.trace_keys] = self.trace_values
        return out.reshape(self.weights.shape)

    def _check(self, phi: SparseBinaryFeatures) -> None:
        if phi.dimension != self.dimension:
            raise ValueError(f"feature dimension {phi.dimension} != weight dimension {self.dimension}")

    def values(self, phi: SparseBinaryFeatures) -> np.ndarray:
        self._check(phi)
        return self.weights[:, phi.active].sum(axis=1)

    def digest(self) -> str:
        return hashlib.sha256(memoryview(self.weights).cast("B")).hexdigest()

    def save(self, path, config: RlConfig | None = None):
        meta = {"dimension": self.dimension, "n_actions": self.n_actions,
                "config": asdict(config) if config else None}
        return modelio.save(path, KIND, meta, {"weights": self.weights})

    @classmethod
    def load(cls, path) -> "LinearQ":
        meta, arrays = modelio.load(path, KIND)
        q = cls(meta["dimension"], meta["n_actions"])
        q.weights[...] = arrays["weights"]
        return q


def q_value(q: LinearQ, phi: SparseBinaryFeatures, a: int) -> float:
    q._check(phi)
    return float(q.weights[a, phi.active].sum())


def greedy_actions(values: np.ndarray) -> np.ndarray:
    return np.flatnonzero(values == values.max())


def select_action(q: LinearQ, phi: SparseBinaryFeatures, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; greedy ties are broken uniformly at random."""
    if epsilon > 0 and rng.random() < epsilon:
        return int(rng.integers(q.n_actions))
    best = greedy_actions(q.values(phi))
    return int(best[0]) if best.size == 1 else int(rng.choice(best))


def sarsa_step(q: LinearQ, phi: SparseBinaryFeatures, a: int, r: float, phi_next: SparseBinaryFeatures,
               a_next: int, terminal: bool, config: RlConfig) -> float:
    """One replacing-trace SARSA(lambda) update in place; returns the TD error."""
    target = r if terminal else r + config.gamma * q_value(q, phi_next, a_next)
    delta = target - q_value(q, phi, a)
    if not np.isfinite(delta):
        raise DivergenceError(
            "non-finite TD error", delta=float(delta), reward=float(r), action=int(a),
            max_abs_weight=float(np.nanmax(np.abs(q.weights))) if q.weights.size else 0.0,
        )

    decay = config.gamma * config.lam
    keys, vals = q.trace_keys, q.trace_values * decay
    fresh = a * q.dimension + phi.active
    keep = vals >= config.trace_threshold
    if fresh.size and keys.size:
        # fresh is sorted; drop old entries it is about to replace
        pos = np.minimum(np.searchsorted(fresh, keys), fresh.size - 1)
        keep &= fresh[pos] != keys
    keys = np.concatenate([keys[keep], fresh])
    vals = np.concatenate([vals[keep], np.ones(fresh.size)])
    q.trace_keys, q.trace_values = keys, vals

    step = config.alpha / max(1, len(phi)) if config.normalize else config.alpha
    if delta != 0.0:
        q._flat[keys] += (step * delta) * vals
    return float(delta)


@dataclass
class TrialResult:
    scores: list[float]
    training_episodes: int
    evaluation_episodes: int
    weights_digest: str = ""
    evaluation_digests: list[str] = field(default_factory=list)

    @property
    def evaluation_scores(self) -> list[float]:
        return self.scores[self.training_episodes:]

    @property
    def performance(self) -> float:
        ev = self.evaluation_scores
        return float(np.mean(ev)) if ev else float("nan")


def run_episode(env: Environment, encoder, q: LinearQ, config: RlConfig, rng: np.random.Generator,
                episode_config: EpisodeConfig, learn: bool = True) -> float:
    q.clear_traces()
    encoder.reset()
    obs = env.reset(episode_config)
    phi = encoder(obs)
    a = select_action(q, phi, config.epsilon, rng)
    score = 0.0
    while True:
        obs = env.act(a)
        score += obs.reward
        phi_next = encoder(obs)
        if obs.terminal:
            if learn:
                sarsa_step(q, phi, a, obs.reward, phi_next, 0, True, config)
            return score
        a_next = select_action(q, phi_next, config.epsilon, rng)
        if learn:
            sarsa_step(q, phi, a, obs.reward, phi_next, a_next, False, config)
        phi, a = phi_next, a_next


def run_rl_trial(env: Environment, encoder, config: RlConfig, *, seed: int = 0, training_episodes: int = 5000,
                 evaluation_episodes: int = 500, learn: bool = True, track_weights: bool = False,
                 on_episode: Callable[[int, float], None] | None = None, q: LinearQ | None = None) -> TrialResult:
    """Train for ``training_episodes`` then evaluate with frozen weights.

    Episode ``i`` resets the environment with a seed drawn from the trial's
    seed stream, so the same trial seed always replays the same episodes.
    """
    q = q if q is not None else LinearQ(encoder.dimension)
    seeds = np.random.default_rng([seed, 0]).integers(0, 2 ** 62, size=training_episodes + evaluation_episodes)
    rng = np.random.default_rng([seed, 1])
    base = env.config
    scores: list[float] = []
    digests: list[str] = []
    for i in range(training_episodes + evaluation_episodes):
        training = i < training_episodes
        try:
            s = run_episode(env, encoder, q, config, rng, base.with_seed(int(seeds[i])), learn=learn and training)
        except DivergenceError as e:
            e.diagnostics.update(episode=i, seed=seed)
            raise
        scores.append(s)
        if track_weights and not training:
            digests.append(q.digest())
        if on_episode is not None:
            on_episode(i, s)
    q.clear_traces()
    return TrialResult(scores, training_episodes, evaluation_episodes, q.digest(), digests)
