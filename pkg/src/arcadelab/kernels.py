"""Kernel backend selection.

The compiled module is used when it imports; set ``ARCADELAB_PURE_PYTHON=1`` to
force the pure-Python kernels (useful for parity checks and debugging).
"""

import os

from . import _pykernels

if os.environ.get("ARCADELAB_PURE_PYTHON", "").strip().lower() in ("1", "true", "yes", "on"):
    backend = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as backend
        BACKEND = "cython"
    except ImportError:  # extension not built
        backend = _pykernels
        BACKEND = "python"

crossing_run = backend.crossing_run
dodger_run = backend.dodger_run
gatherer_run = backend.gatherer_run
chain_run = backend.chain_run
colour_presence = backend.colour_presence
pair_indices = backend.pair_indices
lsh_project = backend.lsh_project

__all__ = [
    "BACKEND",
    "backend",
    "crossing_run",
    "dodger_run",
    "gatherer_run",
    "chain_run",
    "colour_presence",
    "pair_indices",
    "lsh_project",
]
