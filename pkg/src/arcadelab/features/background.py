"""Per-pixel histogram background model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..env.core import N_COLOURS
from . import modelio

KIND = b"BGND"


@dataclass(frozen=True, eq=False)
class BackgroundModel:
    modal: np.ndarray  # (H, W) uint8, most frequent colour per pixel
    sample_count: int

    def __post_init__(self):
        m = np.ascontiguousarray(self.modal, dtype=np.uint8)
        if m.ndim != 2 or (m.size and m.max() >= N_COLOURS):
            raise ValueError("background must be a 2-D grid of 7-bit colours")
        object.__setattr__(self, "modal", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.modal.shape

    def save(self, path):
        return modelio.save(path, KIND, {"sample_count": int(self.sample_count)}, {"modal": self.modal})

    @classmethod
    def load(cls, path) -> "BackgroundModel":
        meta, arrays = modelio.load(path, KIND)
        return cls(arrays["modal"], int(meta["sample_count"]))


class BackgroundAccumulator:
    """Streaming colour histogram; ``model()`` takes the per-pixel mode."""

    def __init__(self, shape: tuple[int, int]):
        self.shape = tuple(shape)
        self.counts = np.zeros((self.shape[0] * self.shape[1], N_COLOURS), dtype=np.int32)
        self._rows = np.arange(self.counts.shape[0])
        self.n = 0

    def add(self, screen: np.ndarray) -> None:
        if screen.shape != self.shape:
            raise ValueError(f"screen shape {screen.shape} != {self.shape}")
        self.counts[self._rows, screen.ravel()] += 1
        self.n += 1

    def model(self) -> BackgroundModel:
        if self.n == 0:
            raise ValueError("background detection needs at least one sample")
        # argmax returns the first maximum, i.e. the lowest colour index on ties
        modal = self.counts.argmax(axis=1).astype(np.uint8).reshape(self.shape)
        return BackgroundModel(modal, self.n)


def detect_background(samples: Iterable[np.ndarray]) -> BackgroundModel:
    acc = None
    for screen in samples:
        if acc is None:
            acc = BackgroundAccumulator(screen.shape)
        acc.add(screen)
    if acc is None:
        raise ValueError("background detection needs at least one sample")
    return acc.model()
