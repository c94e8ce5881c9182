"""Tiny test-only environments."""

from __future__ import annotations

from typing import Callable

import numpy as np

from arcadelab import _pykernels as K
from arcadelab.env.core import Environment, blank_ram

PATH = K.HEADER
MODULUS = (1 << 61) - 1


class ToyTree(Environment):
    """Every action sequence reaches a distinct state; reward(path, action) is user supplied.

    The path is encoded base 19 (modulo a large prime) in one state slot, so
    child snapshots of any node are pairwise different.
    """

    game_id = "toytree"
    tag = b"TOYT"
    state_size = K.HEADER + 2

    def __init__(self, config=None, reward: Callable[[int, int], float] = lambda path, a: 0.0, depth_limit: int = 0):
        self.reward_fn = reward
        self.depth_limit = depth_limit
        super().__init__(config)

    def _spawn(self):
        return ToyTree(self.config, self.reward_fn, self.depth_limit)

    def _init_state(self, st):
        st[PATH] = 0

    def _run(self, action, frames, max_frames):
        s = self._state
        r = self.reward_fn(int(s[PATH]), action)
        s[PATH] = (int(s[PATH]) * 19 + action + 1) % MODULUS
        s[PATH + 1] += 1
        s[K.FRAME] = min(s[K.FRAME] + frames, max_frames)
        if self.depth_limit and s[PATH + 1] >= self.depth_limit:
            s[K.OVER] = 1
        s[K.SCORE] += int(r)
        return r

    def _render(self, st):
        return np.zeros((210, 160), dtype=np.uint8)

    def _ram(self, st):
        return blank_ram()

    def background(self):
        return np.zeros((210, 160), dtype=np.uint8)


# ---------------------------------------------------------------- statistics oracle
def betainc_series(a: float, b: float, x: float, terms: int = 4000) -> float:
    """Regularized incomplete beta from the power series of B(x; a, b).

    B(x; a, b) = sum_n (1 - b)_n / n! * x^(a + n) / (a + n); used for x <= 1/2
    (geometric convergence) and mirrored through I_x(a, b) = 1 - I_{1-x}(b, a).
    """
    import math

    if x == 0.0 or x == 1.0:
        return x
    if x > 0.5:
        return 1.0 - betainc_series(b, a, 1.0 - x, terms)
    log_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    coef, parts = 1.0, []
    for n in range(terms):
        parts.append(coef / (a + n))
        coef *= (n + 1 - b) / (n + 1) * x
        if abs(coef) < 1e-18 and n > 10:
            break
    return math.fsum(parts) * math.exp(a * math.log(x) - log_beta)


def welch_p_oracle(x, y) -> float:
    """Two-tailed Welch p-value computed from scratch with the series oracle."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    vx, vy = x.var(ddof=1) / x.size, y.var(ddof=1) / y.size
    t = (x.mean() - y.mean()) / np.sqrt(vx + vy)
    df = (vx + vy) ** 2 / (vx ** 2 / (x.size - 1) + vy ** 2 / (y.size - 1))
    return betainc_series(df / 2, 0.5, df / (df + t * t))


def random_score_table(rng: np.random.Generator, n_games: int, n_algs: int, n_samples: int):
    from arcadelab.metrics import ScoreTable

    table = ScoreTable([], [])
    for g in range(n_games):
        for a in range(n_algs):
            loc = rng.normal(0, 50)
            table.add(f"g{g}", f"a{a}", rng.normal(loc, rng.uniform(0.1, 30), size=n_samples))
    return table


# ---------------------------------------------------------------- acceptance bookkeeping
CRITERIA: dict[int, str] = {}


class criterion:
    """Context manager: times a block, records and prints one PASS/FAIL line."""

    def __init__(self, number: int, title: str, limit_s: float):
        self.number, self.title, self.limit = number, title, limit_s

    def __enter__(self):
        import time

        self.start = time.perf_counter()
        self.detail = ""
        return self

    def __exit__(self, exc_type, exc, tb):
        import time

        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.limit
        why = "" if exc_type is None else f" ({exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        if exc_type is None and not ok:
            why = f" (runtime {elapsed:.1f}s over {self.limit:.0f}s)"
        line = (f"criterion {self.number} {'PASS' if ok else 'FAIL'}: {self.title} "
                f"[{elapsed:.1f}s / {self.limit:.0f}s]{' ' + self.detail if self.detail else ''}{why}")
        CRITERIA[self.number] = line
        print(line)
        if exc_type is None and not ok:
            raise AssertionError(line)
        return False
