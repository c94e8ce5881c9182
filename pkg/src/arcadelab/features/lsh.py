"""Locality-sensitive hashing of binarized screens.

Each of ``l`` random bit vectors (``k`` ones out of ``n``) carries its own hash
vector with entries in ``[0, M)``. A screen's code under vector ``i`` is the
sum of hash entries over the positions where the screen bit and the vector bit
are both set, modulo ``M``; the output has exactly one active feature per
vector.

Hash entries are a counter-based function of ``(seed, i, j)``, so the full
``l x n`` tables never need to be stored; the entries on each vector's support
are cached because the default projection only ever reads those.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..env.core import SCREEN_HEIGHT, SCREEN_WIDTH
from . import modelio
from .sparse import SparseBinaryFeatures

KIND = b"LSHM"
COLOUR_BITS = 7
N_SCREEN_BITS = COLOUR_BITS * SCREEN_HEIGHT * SCREEN_WIDTH  # 235,200

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash_entries(seed: int, i, j, n: int, m: int) -> np.ndarray:
    """Entries ``hash_i[j]`` in ``[0, m)``; broadcasts over ``i`` and ``j``."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    key = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (i * np.uint64(n) + j + np.uint64(1)) * _GOLDEN
    return (_mix64(key) % np.uint64(m)).astype(np.int32)


def binarize_screen(screen: np.ndarray) -> np.ndarray:
    """7 bits per pixel (most significant first), pixels in row-major order."""
    bits = np.unpackbits(np.ascontiguousarray(screen, dtype=np.uint8)[..., None], axis=-1)
    return np.ascontiguousarray(bits[..., 1:].reshape(-1))


@dataclass(frozen=True, eq=False)
class LshModel:
    seed: int
    n_vectors: int  # l
    nonzeros: int  # k
    table_size: int  # M
    n_bits: int  # n
    support: np.ndarray  # (l, k) int32, sorted rows of distinct coordinates
    hashes: np.ndarray  # (l, k) int32, hash entries on the support

    @property
    def dimension(self) -> int:
        return self.n_vectors * self.table_size

    @classmethod
    def generate(cls, seed: int, n_vectors: int = 2000, nonzeros: int = 1000, table_size: int = 50,
                 n_bits: int = N_SCREEN_BITS) -> "LshModel":
        if not 0 < nonzeros <= n_bits:
            raise ValueError("need 0 < k <= n")
        rng = np.random.default_rng(seed)
        support = np.empty((n_vectors, nonzeros), dtype=np.int32)
        for i in range(n_vectors):
            support[i] = np.sort(rng.choice(n_bits, size=nonzeros, replace=False))
        rows = np.arange(n_vectors, dtype=np.uint64)[:, None]
        hashes = hash_entries(seed, rows, support.astype(np.uint64), n_bits, table_size)
        return cls(seed, n_vectors, nonzeros, table_size, n_bits, support, hashes)

    def vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.n_bits, dtype=np.uint8)
        v[self.support[i]] = 1
        return v

    def save(self, path):
        meta = {"seed": int(self.seed), "l": self.n_vectors, "k": self.nonzeros,
                "M": self.table_size, "n": self.n_bits}
        return modelio.save(path, KIND, meta, {"support": self.support, "hashes": self.hashes})

    @classmethod
    def load(cls, path) -> "LshModel":
        meta, arr = modelio.load(path, KIND)
        return cls(meta["seed"], meta["l"], meta["k"], meta["M"], meta["n"], arr["support"], arr["hashes"])

    def same_as(self, other: "LshModel") -> bool:
        return (
            (self.seed, self.n_vectors, self.nonzeros, self.table_size, self.n_bits)
            == (other.seed, other.n_vectors, other.nonzeros, other.table_size, other.n_bits)
            and np.array_equal(self.support, other.support)
            and np.array_equal(self.hashes, other.hashes)
        )


def lsh_codes(bits: np.ndarray, model: LshModel, literal: bool = False) -> np.ndarray:
    """Per-vector bucket in ``[0, M)``.

    Default: positions where screen bit AND vector bit are set. ``literal``
    counts every position where the two bits are equal, including 0-0
    agreements; that needs hash entries over the whole bit vector and costs
    O(l n) per screen.
    """
    if bits.shape != (model.n_bits,):
        raise ValueError(f"expected {model.n_bits} screen bits, got {bits.shape}")
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    on_support = kernels.lsh_project(bits, model.support, model.hashes, model.table_size)
    if not literal:
        return on_support
    m = model.table_size
    zeros = np.flatnonzero(bits == 0).astype(np.uint64)
    codes = np.empty(model.n_vectors, dtype=np.int64)
    for i in range(model.n_vectors):
        zero_sum = int(hash_entries(model.seed, i, zeros, model.n_bits, m).sum(dtype=np.int64))
        sup_zero = bits[model.support[i]] == 0
        # support positions have v_ij = 1, so zeros there do not agree
        zero_sum -= int(model.hashes[i][sup_zero].sum(dtype=np.int64))
        codes[i] = (zero_sum + int(on_support[i])) % m
    return codes


def lsh_features(screen: np.ndarray, model: LshModel, literal: bool = False) -> SparseBinaryFeatures:
    codes = lsh_codes(binarize_screen(screen), model, literal)
    idx = np.arange(model.n_vectors, dtype=np.int64) * model.table_size + codes
    return SparseBinaryFeatures(model.dimension, idx)


class LshEncoder:
    name = "lsh"

    def __init__(self, model: LshModel, literal: bool = False):
        self.model = model
        self.literal = literal
        self.dimension = model.dimension

    def reset(self) -> None:
        pass

    def __call__(self, obs) -> SparseBinaryFeatures:
        return lsh_features(obs.screen, self.model, self.literal)
