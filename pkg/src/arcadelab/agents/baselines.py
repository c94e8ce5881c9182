"""Reference policies: Random, Const (one per action) and Perturb (noisy Const)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env.core import N_ACTIONS, Environment

PERTURB_P = 0.95


@dataclass(frozen=True)
class BaselinePolicy:
    kind: str  # random | const | perturb
    action: int = 0
    p: float = 1.0

    @property
    def name(self) -> str:
        if self.kind == "random":
            return "random"
        return f"{self.kind}_{self.action}"

    def act(self, rng: np.random.Generator) -> int:
        if self.kind == "random":
            return int(rng.integers(N_ACTIONS))
        if self.kind == "const" or self.p >= 1.0:
            return self.action
        return self.action if rng.random() < self.p else int(rng.integers(N_ACTIONS))


def baseline_policies(p: float = PERTURB_P) -> list[BaselinePolicy]:
    """1 Random + 18 Const + 18 Perturb = 37 policies."""
    out = [BaselinePolicy("random")]
    out += [BaselinePolicy("const", a) for a in range(N_ACTIONS)]
    out += [BaselinePolicy("perturb", a, p) for a in range(N_ACTIONS)]
    return out


def run_policy(env: Environment, policy: BaselinePolicy, episodes: int, seed: int = 0) -> list[float]:
    seeds = np.random.default_rng([seed, 0]).integers(0, 2 ** 62, size=episodes)
    rng = np.random.default_rng([seed, 1])
    base = env.config
    scores = []
    for i in range(episodes):
        env.reset(base.with_seed(int(seeds[i])))
        total, done = 0.0, False
        while not done:
            r, done = env.emulate(policy.act(rng))
            total += r
        scores.append(total)
    return scores


@dataclass
class BaselineResult:
    scores: dict[str, list[float]]  # per policy name

    def mean(self, name: str) -> float:
        return float(np.mean(self.scores[name]))

    def _best(self, kind: str) -> tuple[str, float]:
        # highest mean, ties to the lowest action id
        names = [f"{kind}_{a}" for a in range(N_ACTIONS)]
        means = [self.mean(n) for n in names]
        i = int(np.argmax(means))
        return names[i], means[i]

    @property
    def random(self) -> float:
        return self.mean("random")

    @property
    def const_best(self) -> float:
        return self._best("const")[1]

    @property
    def const_best_action(self) -> int:
        return int(self._best("const")[0].split("_")[1])

    @property
    def perturb_best(self) -> float:
        return self._best("perturb")[1]

    def reference_scores(self) -> list[float]:
        """Mean score of each of the 37 policies, in policy order."""
        return [self.mean(p.name) for p in baseline_policies()]


def baseline_agents(env: Environment, episodes: int, seed: int = 0, p: float = PERTURB_P) -> BaselineResult:
    return BaselineResult({pol.name: run_policy(env, pol, episodes, seed) for pol in baseline_policies(p)})
