"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row times one kernel call on identical inputs for both backends and
checks that the two return the same result.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from arcadelab import _pykernels
from arcadelab.env import EpisodeConfig, make_env
from arcadelab.features import LshModel, binarize_screen
from arcadelab.features.colour import IDENTITY_PALETTE, N_COLOURS, TILE_COLS, TILE_H, TILE_W

try:
    from arcadelab import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _game_case(game):
    env = make_env(game, EpisodeConfig(seed=1))
    for a in np.random.default_rng(0).integers(18, size=20):
        env.emulate(int(a))
    state = env._state.copy()
    name = f"{game}_run"

    def call(mod):
        s = state.copy()
        r = getattr(mod, name)(s, 3, 5, 18_000)
        return r, s.tobytes()

    return f"{game} step (5 frames)", call


def _colour_case():
    env = make_env("crossing")
    screen, bg = env.screen(), np.zeros((210, 160), dtype=np.uint8)
    return "colour presence (Basic)", lambda mod: np.asarray(
        mod.colour_presence(screen, bg, IDENTITY_PALETTE, N_COLOURS, TILE_W, TILE_H, TILE_COLS)).tobytes()


def _pairs_case():
    base = np.unique(np.random.default_rng(1).integers(0, 1792, size=60)).astype(np.int64)
    return f"pair indices ({base.size} active)", lambda mod: np.asarray(mod.pair_indices(base, 1792)).tobytes()


def _lsh_case():
    model = LshModel.generate(0)
    bits = binarize_screen(make_env("dodger").screen())
    return "LSH projection (l=2000, k=1000)", lambda mod: np.asarray(
        mod.lsh_project(bits, model.support, model.hashes, model.table_size)).tobytes()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available")
        return 1
    cases = [_game_case(g) for g in ("crossing", "dodger", "gatherer")] + [_colour_case(), _pairs_case(), _lsh_case()]
    print(f"{'kernel':34} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}  same")
    for title, call in cases:
        same = call(_pykernels) == call(_ckernels)
        times = {}
        for label, mod in (("python", _pykernels), ("cython", _ckernels)):
            number = 3 if label == "python" else 50
            best = min(timeit.repeat(lambda: call(mod), number=number, repeat=args.repeat)) / number
            times[label] = best * 1e3
        print(f"{title:34} {times['python']:12.4f} {times['cython']:12.4f} "
              f"{times['python'] / times['cython']:7.1f}x  {'yes' if same else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
