"""Score normalization, aggregation across games, and score distributions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DegenerateRangeError(ValueError):
    def __init__(self, message: str, game: str | None = None):
        super().__init__(f"{message} (game {game})" if game else message)
        self.game = game


@dataclass(frozen=True)
class ScoreRange:
    r_min: float
    r_max: float

    def __post_init__(self):
        if not self.r_max >= self.r_min:
            raise ValueError(f"invalid range [{self.r_min}, {self.r_max}]")


def normalize(s, rng: ScoreRange, game: str | None = None):
    """(s - r_min) / (r_max - r_min); works elementwise on arrays."""
    span = rng.r_max - rng.r_min
    if span == 0:
        raise DegenerateRangeError("degenerate score range", game)
    if np.ndim(s):
        return (np.asarray(s, dtype=np.float64) - rng.r_min) / span
    return (s - rng.r_min) / span


def random_range(random_avg: float, game: str | None = None) -> ScoreRange:
    if random_avg == 0:
        raise DegenerateRangeError("random agent average is 0", game)
    return ScoreRange(0.0, abs(random_avg))


def baseline_range(references: Sequence[float], game: str | None = None) -> ScoreRange:
    refs = [float(r) for r in references]
    if len(refs) < 2:
        raise DegenerateRangeError("baseline range needs at least 2 reference scores", game)
    lo, hi = min(refs), max(refs)
    if lo == hi:
        raise DegenerateRangeError("all baseline scores are equal", game)
    return ScoreRange(lo, hi)


def inter_algorithm_scores(scores: Sequence[float], game: str | None = None) -> np.ndarray:
    """Normalize by the per-game [min, max] over the compared algorithms.

    If every algorithm scored the same, all get 0.5 and a warning is issued.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.size < 2:
        raise ValueError("inter-algorithm scores need at least 2 algorithms")
    lo, hi = s.min(), s.max()
    if lo == hi:
        warnings.warn(f"all algorithms tie{f' on {game}' if game else ''}; using 0.5", RuntimeWarning, stacklevel=2)
        return np.full(s.size, 0.5)
    z = (s - lo) / (hi - lo)
    # exact extremes regardless of rounding
    z[s == lo] = 0.0
    z[s == hi] = 1.0
    return z


def aggregate_average(z: Sequence[float]) -> float:
    z = np.asarray(z, dtype=np.float64)
    if z.size == 0:
        raise ValueError("cannot aggregate an empty score list")
    return float(z.mean())


def aggregate_median(z: Sequence[float]) -> float:
    z = np.sort(np.asarray(z, dtype=np.float64))
    n = z.size
    if n == 0:
        raise ValueError("cannot aggregate an empty score list")
    mid = n // 2
    return float(z[mid]) if n % 2 else float((z[mid - 1] + z[mid]) / 2.0)


class ScoreDistribution:
    """f(x) = fraction of scores >= x: a non-increasing step function."""

    def __init__(self, scores: Sequence[float]):
        s = np.sort(np.asarray(scores, dtype=np.float64))
        if s.size == 0:
            raise ValueError("score distribution needs at least one score")
        self.sorted = s
        self.n = s.size

    def __call__(self, x):
        below = np.searchsorted(self.sorted, x, side="left")
        return (self.n - below) / self.n

    def breakpoints(self) -> list[tuple[float, float]]:
        """(x, f(x)) at each distinct score; f is constant on the gaps between them."""
        xs = np.unique(self.sorted)
        return [(float(x), float(self(x))) for x in xs]

    def integral(self, lo: float, hi: float) -> float:
        """Exact integral of f over [lo, hi] using the breakpoints."""
        if hi < lo:
            raise ValueError("need lo <= hi")
        cuts = [lo] + [x for x, _ in self.breakpoints() if lo < x < hi] + [hi]
        total = 0.0
        for a, b in zip(cuts, cuts[1:]):
            # f is constant on (a, b]; evaluate at the right end
            total += (b - a) * float(self(b))
        return total


def times_best(means: dict[str, Sequence[float]]) -> dict[str, int]:
    """Per algorithm, the number of games where it has the highest mean (ties count for all)."""
    algs = list(means)
    n_games = len(next(iter(means.values()))) if algs else 0
    counts = {a: 0 for a in algs}
    for g in range(n_games):
        best = max(means[a][g] for a in algs)
        for a in algs:
            if means[a][g] == best:
                counts[a] += 1
    return counts


__all__ = [
    "DegenerateRangeError", "ScoreRange", "normalize", "random_range", "baseline_range",
    "inter_algorithm_scores", "aggregate_average", "aggregate_median", "ScoreDistribution", "times_best",
]
