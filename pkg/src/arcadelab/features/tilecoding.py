"""Grid tile coding with uniformly offset tilings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TileCoderConfig:
    tilings: int = 8
    grid: int = 8
    max_velocity: float = 8.0

    def __post_init__(self):
        if self.tilings < 1 or self.grid < 1 or self.max_velocity <= 0:
            raise ValueError("tile coder parameters must be positive")


class TileCoder:
    """Maps a point in a box to one tile per tiling.

    Tiling ``t`` is shifted by ``t / tilings`` of a tile width along every
    dimension; coordinates are clipped to the box, so every point activates
    exactly ``tilings`` tiles.
    """

    def __init__(self, lows, highs, grid: int = 8, tilings: int = 8):
        self.lows = np.asarray(lows, dtype=np.float64)
        self.highs = np.asarray(highs, dtype=np.float64)
        if self.lows.shape != self.highs.shape or np.any(self.highs <= self.lows):
            raise ValueError("need lows < highs")
        self.grid = grid
        self.tilings = tilings
        self.ndim = self.lows.size
        self.width = (self.highs - self.lows) / grid
        self.tiles_per_tiling = grid ** self.ndim
        self.size = tilings * self.tiles_per_tiling
        self._offsets = np.arange(tilings)[:, None] * self.width[None, :] / tilings
        self._strides = grid ** np.arange(self.ndim - 1, -1, -1)

    def tiles(self, point) -> np.ndarray:
        p = np.clip(np.asarray(point, dtype=np.float64), self.lows, self.highs)
        coords = np.floor((p - self.lows + self._offsets) / self.width).astype(np.int64)
        coords = np.clip(coords, 0, self.grid - 1)
        flat = coords @ self._strides
        return np.arange(self.tilings, dtype=np.int64) * self.tiles_per_tiling + flat
