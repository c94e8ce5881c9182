"""Colour-presence encodings: Basic (128 colours) and BASS (8 SECAM colours + pairs)."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..env.core import N_COLOURS, SCREEN_HEIGHT, SCREEN_WIDTH
from .background import BackgroundModel
from .sparse import SparseBinaryFeatures, n_pairs, with_pairs

TILE_COLS, TILE_ROWS = 16, 14
TILE_W = SCREEN_WIDTH // TILE_COLS  # 10
TILE_H = SCREEN_HEIGHT // TILE_ROWS  # 15
N_TILES = TILE_COLS * TILE_ROWS
SECAM_COLOURS = 8

BASIC_DIM = N_TILES * N_COLOURS
BASS_BASE_DIM = N_TILES * SECAM_COLOURS
BASS_DIM = BASS_BASE_DIM + n_pairs(BASS_BASE_DIM)

IDENTITY_PALETTE = np.arange(N_COLOURS, dtype=np.int64)
# default SECAM reduction: the high three bits of the 7-bit colour index
SECAM_TABLE = (np.arange(N_COLOURS, dtype=np.int64) >> 4)


def secam_map(colour: int, table: np.ndarray = SECAM_TABLE) -> int:
    if not 0 <= colour < N_COLOURS:
        raise ValueError(f"colour {colour} outside [0, 127]")
    return int(table[colour])


def _check(screen: np.ndarray, bg: BackgroundModel) -> np.ndarray:
    if screen.shape != bg.shape:
        raise ValueError(f"screen shape {screen.shape} does not match background {bg.shape}")
    return np.ascontiguousarray(screen, dtype=np.uint8)


def basic_features(screen: np.ndarray, bg: BackgroundModel) -> SparseBinaryFeatures:
    """One bit per (tile, colour) with a non-background pixel of that colour in the tile."""
    idx = kernels.colour_presence(_check(screen, bg), bg.modal, IDENTITY_PALETTE, N_COLOURS, TILE_W, TILE_H, TILE_COLS)
    return SparseBinaryFeatures(BASIC_DIM, idx)


def bass_base(screen: np.ndarray, bg: BackgroundModel, table: np.ndarray = SECAM_TABLE) -> np.ndarray:
    return kernels.colour_presence(_check(screen, bg), bg.modal, table, SECAM_COLOURS, TILE_W, TILE_H, TILE_COLS)


def bass_features(screen: np.ndarray, bg: BackgroundModel, table: np.ndarray = SECAM_TABLE) -> SparseBinaryFeatures:
    """SECAM colour presence per tile plus the AND of every pair of those bits."""
    return SparseBinaryFeatures(BASS_DIM, with_pairs(bass_base(screen, bg, table), BASS_BASE_DIM))


class BasicEncoder:
    name = "basic"
    dimension = BASIC_DIM

    def __init__(self, background: BackgroundModel):
        self.background = background

    def reset(self) -> None:
        pass

    def __call__(self, obs) -> SparseBinaryFeatures:
        return basic_features(obs.screen, self.background)


class BassEncoder:
    name = "bass"
    dimension = BASS_DIM

    def __init__(self, background: BackgroundModel, table: np.ndarray = SECAM_TABLE):
        self.background = background
        self.table = np.asarray(table, dtype=np.int64)

    def reset(self) -> None:
        pass

    def __call__(self, obs) -> SparseBinaryFeatures:
        return bass_features(obs.screen, self.background, self.table)
