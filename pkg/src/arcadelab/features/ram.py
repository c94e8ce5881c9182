"""RAM bits plus the pairwise AND of every pair of set bits."""

from __future__ import annotations

import numpy as np

from ..env.core import RAM_SIZE
from .sparse import SparseBinaryFeatures, n_pairs, with_pairs

RAM_BITS = RAM_SIZE * 8
RAM_DIM = RAM_BITS + n_pairs(RAM_BITS)


def ram_features(ram: np.ndarray) -> SparseBinaryFeatures:
    ram = np.asarray(ram, dtype=np.uint8)
    if ram.shape != (RAM_SIZE,):
        raise ValueError(f"RAM must be {RAM_SIZE} bytes, got shape {ram.shape}")
    # byte-major, most significant bit first
    bits = np.flatnonzero(np.unpackbits(ram)).astype(np.int64)
    return SparseBinaryFeatures(RAM_DIM, with_pairs(bits, RAM_BITS))


class RamEncoder:
    name = "ram"
    dimension = RAM_DIM

    def reset(self) -> None:
        pass

    def __call__(self, obs) -> SparseBinaryFeatures:
        return ram_features(obs.ram)
