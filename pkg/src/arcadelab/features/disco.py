"""Object-class features: blob extraction, class discovery, instance tile coding.

Preprocessing turns sample screens into a small set of shape classes.
At run time every foreground blob is matched to its nearest class, matched
instances are tracked from the previous observation to get a velocity, and
the result is tile coded: position and velocity per class, relative position
and relative velocity per pair of instances from different classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from ..env.core import SCREEN_HEIGHT, SCREEN_WIDTH
from . import modelio
from .background import BackgroundModel
from .colour import TILE_H, TILE_W
from .sparse import SparseBinaryFeatures, n_pairs, pair_index
from .tilecoding import TileCoder, TileCoderConfig

KIND = b"DSCO"
_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class Blob:
    mask: np.ndarray  # cropped to the bounding box
    top: int
    left: int
    colour: int

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """(top, left, bottom, right), bottom/right exclusive."""
        h, w = self.mask.shape
        return self.top, self.left, self.top + h, self.left + w

    @property
    def centroid(self) -> tuple[float, float]:
        ys, xs = np.nonzero(self.mask)
        return self.top + float(ys.mean()), self.left + float(xs.mean())

    @property
    def key(self) -> tuple:
        return self.mask.shape, self.mask.tobytes()


def extract_blobs(screen: np.ndarray, bg: BackgroundModel) -> list[Blob]:
    """8-connected components of foreground pixels, one colour at a time."""
    if screen.shape != bg.shape:
        raise ValueError("screen and background shapes differ")
    fg = screen != bg.modal
    blobs = []
    for colour in np.unique(screen[fg]):
        labels, _ = ndimage.label(fg & (screen == colour), structure=_EIGHT_CONNECTED)
        for k, sl in enumerate(ndimage.find_objects(labels), start=1):
            if sl is None:
                continue
            blobs.append(Blob(labels[sl] == k, sl[0].start, sl[1].start, int(colour)))
    blobs.sort(key=lambda b: (b.top, b.left, b.colour))
    return blobs


def mask_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two masks aligned at their top-left corners."""
    h = max(a.shape[0], b.shape[0])
    w = max(a.shape[1], b.shape[1])
    pa = np.zeros((h, w), dtype=bool)
    pb = np.zeros((h, w), dtype=bool)
    pa[:a.shape[0], :a.shape[1]] = a
    pb[:b.shape[0], :b.shape[1]] = b
    union = np.count_nonzero(pa | pb)
    return np.count_nonzero(pa & pb) / union if union else 0.0


@dataclass(frozen=True)
class DiscoveryConfig:
    max_classes: int = 10
    min_frequency: float = 0.2
    merge_overlap: float = 0.9
    match_overlap: float = 0.5
    min_extent: tuple[int, int] = (TILE_H, TILE_W)  # a class must move beyond one tile


@dataclass(frozen=True, eq=False)
class ShapeClass:
    mask: np.ndarray
    frequency: float  # fraction of sample screens containing at least one instance
    extent: tuple[int, int, int, int]  # union of instance boxes over the samples


@dataclass(frozen=True, eq=False)
class ClassModel:
    classes: tuple[ShapeClass, ...]
    n_samples: int
    config: DiscoveryConfig = field(default_factory=DiscoveryConfig)

    def __len__(self) -> int:
        return len(self.classes)

    def classify(self, mask: np.ndarray) -> int:
        """Index of the best-overlapping class, or -1 below the match threshold."""
        best, best_i = 0.0, -1
        for i, c in enumerate(self.classes):
            o = mask_overlap(mask, c.mask)
            if o > best:
                best, best_i = o, i
        return best_i if best >= self.config.match_overlap else -1

    def save(self, path):
        cfg = self.config
        meta = {
            "n_samples": self.n_samples,
            "frequency": [c.frequency for c in self.classes],
            "extent": [list(c.extent) for c in self.classes],
            "config": {"max_classes": cfg.max_classes, "min_frequency": cfg.min_frequency,
                       "merge_overlap": cfg.merge_overlap, "match_overlap": cfg.match_overlap,
                       "min_extent": list(cfg.min_extent)},
        }
        arrays = {f"mask{i}": c.mask.astype(np.uint8) for i, c in enumerate(self.classes)}
        return modelio.save(path, KIND, meta, arrays)

    @classmethod
    def load(cls, path) -> "ClassModel":
        meta, arrays = modelio.load(path, KIND)
        c = meta["config"]
        cfg = DiscoveryConfig(c["max_classes"], c["min_frequency"], c["merge_overlap"],
                              c["match_overlap"], tuple(c["min_extent"]))
        classes = tuple(
            ShapeClass(arrays[f"mask{i}"].astype(bool), f, tuple(e))
            for i, (f, e) in enumerate(zip(meta["frequency"], meta["extent"]))
        )
        return cls(classes, meta["n_samples"], cfg)


@dataclass
class _Candidate:
    mask: np.ndarray
    screens: set
    extent: list
    order: tuple

    def absorb(self, top, left, bottom, right):
        e = self.extent
        e[0], e[1], e[2], e[3] = min(e[0], top), min(e[1], left), max(e[2], bottom), max(e[3], right)


def discover_classes(blob_lists: Iterable[Sequence[Blob]], config: DiscoveryConfig = DiscoveryConfig()) -> ClassModel:
    """Distinct shapes -> frequency/extent filter -> merge similar -> keep most frequent."""
    shapes: dict[tuple, _Candidate] = {}
    n = 0
    for idx, blobs in enumerate(blob_lists):
        n += 1
        for b in blobs:
            cand = shapes.get(b.key)
            if cand is None:
                cand = shapes[b.key] = _Candidate(b.mask, set(), list(b.bbox), b.key)
            cand.screens.add(idx)
            cand.absorb(*b.bbox)
    if n == 0:
        raise ValueError("class discovery needs sample screens")

    min_h, min_w = config.min_extent

    def keep(c: _Candidate) -> bool:
        t, l, b, r = c.extent
        return len(c.screens) / n >= config.min_frequency and (b - t > min_h or r - l > min_w)

    ranked = sorted((c for c in shapes.values() if keep(c)), key=lambda c: (-len(c.screens), c.order))
    merged: list[_Candidate] = []
    for c in ranked:
        for m in merged:
            if mask_overlap(m.mask, c.mask) >= config.merge_overlap:
                m.screens |= c.screens
                m.absorb(*c.extent)
                break
        else:
            merged.append(_Candidate(c.mask, set(c.screens), list(c.extent), c.order))
    merged.sort(key=lambda c: (-len(c.screens), c.order))
    classes = tuple(
        ShapeClass(c.mask, len(c.screens) / n, tuple(int(v) for v in c.extent))
        for c in merged[:config.max_classes]
    )
    return ClassModel(classes, n, config)


@dataclass(frozen=True)
class Instance:
    cls: int
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0


class _Classifier:
    def __init__(self, model: ClassModel):
        self.model = model
        self._cache: dict[tuple, int] = {}

    def __call__(self, blob: Blob) -> int:
        k = blob.key
        c = self._cache.get(k)
        if c is None:
            c = self._cache[k] = self.model.classify(blob.mask)
        return c


def detect_instances(screen: np.ndarray, bg: BackgroundModel, model: ClassModel, classifier=None) -> list[Instance]:
    classify = classifier or _Classifier(model)
    out = []
    for b in extract_blobs(screen, bg):
        c = classify(b)
        if c >= 0:
            y, x = b.centroid
            out.append(Instance(c, x, y))
    return out


def track(instances: Sequence[Instance], previous: Sequence[Instance], max_velocity: float,
          frames_elapsed: int = 1) -> list[Instance]:
    """Attach per-frame velocities by nearest same-class match; unmatched get (0, 0)."""
    radius = max_velocity * frames_elapsed
    out = []
    for inst in instances:
        best, best_d = None, radius
        for p in previous:
            if p.cls != inst.cls:
                continue
            d = float(np.hypot(inst.x - p.x, inst.y - p.y))
            if d <= best_d:
                best, best_d = p, d
        if best is None:
            out.append(Instance(inst.cls, inst.x, inst.y))
        else:
            out.append(Instance(inst.cls, inst.x, inst.y,
                                (inst.x - best.x) / frames_elapsed, (inst.y - best.y) / frames_elapsed))
    return out


class DiscoLayout:
    """Index layout for a model with C classes.

    ``[class c: position tiles | velocity tiles] * C`` followed by
    ``[pair (c1<c2): relative-position tiles | relative-velocity tiles] * C(C-1)/2``.
    """

    def __init__(self, n_classes: int, cfg: TileCoderConfig = TileCoderConfig()):
        g, t, v = cfg.grid, cfg.tilings, cfg.max_velocity
        self.n_classes = n_classes
        self.position = TileCoder([0, 0], [SCREEN_WIDTH, SCREEN_HEIGHT], g, t)
        self.velocity = TileCoder([-v, -v], [v, v], g, t)
        self.rel_position = TileCoder([-SCREEN_WIDTH, -SCREEN_HEIGHT], [SCREEN_WIDTH, SCREEN_HEIGHT], g, t)
        self.rel_velocity = TileCoder([-2 * v, -2 * v], [2 * v, 2 * v], g, t)
        self.block = self.position.size + self.velocity.size
        self.dimension = self.block * (n_classes + n_pairs(n_classes))

    def class_offset(self, c: int) -> int:
        return c * self.block

    def pair_offset(self, c1: int, c2: int) -> int:
        return self.block * (self.n_classes + int(pair_index(c1, c2, self.n_classes)))


def disco_features(instances: Sequence[Instance], layout: DiscoLayout) -> SparseBinaryFeatures:
    """Tile-code tracked instances; overlapping instance tiles are unioned."""
    parts = []
    psize = layout.position.size
    for a in instances:
        base = layout.class_offset(a.cls)
        parts.append(base + layout.position.tiles((a.x, a.y)))
        parts.append(base + psize + layout.velocity.tiles((a.vx, a.vy)))
    for i, a in enumerate(instances):
        for b in instances[i + 1:]:
            if a.cls == b.cls:
                continue
            lo, hi = (a, b) if a.cls < b.cls else (b, a)
            base = layout.pair_offset(lo.cls, hi.cls)
            parts.append(base + layout.rel_position.tiles((hi.x - lo.x, hi.y - lo.y)))
            parts.append(base + psize + layout.rel_velocity.tiles((hi.vx - lo.vx, hi.vy - lo.vy)))
    if not parts:
        return SparseBinaryFeatures.empty(layout.dimension)
    return SparseBinaryFeatures(layout.dimension, np.unique(np.concatenate(parts)))


class DiscoEncoder:
    name = "disco"

    def __init__(self, background: BackgroundModel, model: ClassModel,
                 tiles: TileCoderConfig = TileCoderConfig(), frames_elapsed: int = 1):
        self.background = background
        self.model = model
        self.tiles = tiles
        self.frames_elapsed = frames_elapsed
        self.layout = DiscoLayout(len(model), tiles)
        self.dimension = self.layout.dimension
        self._classify = _Classifier(model)
        self._previous: list[Instance] = []

    def reset(self) -> None:
        self._previous = []

    def __call__(self, obs) -> SparseBinaryFeatures:
        found = detect_instances(obs.screen, self.background, self.model, self._classify)
        tracked = track(found, self._previous, self.tiles.max_velocity, self.frames_elapsed)
        self._previous = tracked
        return disco_features(tracked, self.layout)
