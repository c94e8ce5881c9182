"""Sparse binary feature vectors and the unordered-pair index used by BASS and RAM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass(frozen=True, eq=False)
class SparseBinaryFeatures:
    """A binary vector of length ``dimension`` stored as its sorted active indices."""

    dimension: int
    active: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.active, dtype=np.int64)
        object.__setattr__(self, "active", a)
        if a.ndim != 1:
            raise ValueError("active indices must be one-dimensional")
        if a.size:
            if a[0] < 0 or a[-1] >= self.dimension:
                raise ValueError("active index out of range")
            if a.size > 1 and not np.all(a[1:] > a[:-1]):
                raise ValueError("active indices must be strictly increasing")

    @classmethod
    def from_indices(cls, dimension: int, indices) -> "SparseBinaryFeatures":
        return cls(dimension, np.unique(np.asarray(indices, dtype=np.int64)))

    @classmethod
    def empty(cls, dimension: int) -> "SparseBinaryFeatures":
        return cls(dimension, np.empty(0, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.active.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBinaryFeatures):
            return NotImplemented
        return self.dimension == other.dimension and np.array_equal(self.active, other.active)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension, dtype=bool)
        out[self.active] = True
        return out


def n_pairs(d: int) -> int:
    return d * (d - 1) // 2


def pair_index(i, j, d: int):
    """Flat index of unordered pair (i, j), i < j, among all pairs of a d-dim block."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    return i * d - i * (i + 1) // 2 + (j - i - 1)


def pair_from_index(p, d: int):
    """Inverse of :func:`pair_index`."""
    p = np.asarray(p, dtype=np.int64)
    b = 2 * d - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * p)) / 2).astype(np.int64)
    # float rounding can land one row off in either direction
    start = i * d - i * (i + 1) // 2
    i = np.where(start > p, i - 1, i)
    nxt = (i + 1) * d - (i + 1) * (i + 2) // 2
    i = np.where(nxt <= p, i + 1, i)
    start = i * d - i * (i + 1) // 2
    j = p - start + i + 1
    return i, j


def with_pairs(base: np.ndarray, d: int) -> np.ndarray:
    """Base indices followed by the pair block (offset by d); result stays sorted."""
    base = np.ascontiguousarray(base, dtype=np.int64)
    pairs = kernels.pair_indices(base, d)
    return np.concatenate([base, pairs + d])
