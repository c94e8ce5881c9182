"""Sparse binary feature generators and their preprocessing models."""

from __future__ import annotations

from .background import BackgroundAccumulator, BackgroundModel, detect_background
from .colour import BASIC_DIM, BASS_BASE_DIM, BASS_DIM, SECAM_TABLE, BasicEncoder, BassEncoder, basic_features, bass_features, secam_map
from .disco import (
    Blob, ClassModel, DiscoEncoder, DiscoLayout, DiscoveryConfig, Instance, ShapeClass,
    detect_instances, disco_features, discover_classes, extract_blobs, mask_overlap, track,
)
from .lsh import N_SCREEN_BITS, LshEncoder, LshModel, binarize_screen, lsh_codes, lsh_features
from .modelio import ModelFormatError
from .ram import RAM_DIM, RamEncoder, ram_features
from .sparse import SparseBinaryFeatures, n_pairs, pair_from_index, pair_index, with_pairs
from .tilecoding import TileCoder, TileCoderConfig

FEATURE_KINDS = ("basic", "bass", "disco", "lsh", "ram")


def make_encoder(kind: str, *, background: BackgroundModel | None = None, class_model: ClassModel | None = None,
                 lsh_model: LshModel | None = None, frames_per_action: int = 5, lsh_literal: bool = False):
    """Build the encoder for ``kind`` from already-built preprocessing models."""
    if kind == "basic":
        return BasicEncoder(_need(background, kind, "background"))
    if kind == "bass":
        return BassEncoder(_need(background, kind, "background"))
    if kind == "disco":
        return DiscoEncoder(_need(background, kind, "background"), _need(class_model, kind, "class"),
                            frames_elapsed=frames_per_action)
    if kind == "lsh":
        return LshEncoder(_need(lsh_model, kind, "lsh"), literal=lsh_literal)
    if kind == "ram":
        return RamEncoder()
    raise ValueError(f"unknown feature kind {kind!r}; expected one of {FEATURE_KINDS}")


def _need(model, kind, what):
    if model is None:
        raise ValueError(f"{kind} features need a {what} model")
    return model


__all__ = [
    "BackgroundAccumulator", "BackgroundModel", "detect_background",
    "BASIC_DIM", "BASS_BASE_DIM", "BASS_DIM", "SECAM_TABLE", "BasicEncoder", "BassEncoder",
    "basic_features", "bass_features", "secam_map",
    "Blob", "ClassModel", "DiscoEncoder", "DiscoLayout", "DiscoveryConfig", "Instance", "ShapeClass",
    "detect_instances", "disco_features", "discover_classes", "extract_blobs", "mask_overlap", "track",
    "N_SCREEN_BITS", "LshEncoder", "LshModel", "binarize_screen", "lsh_codes", "lsh_features",
    "ModelFormatError", "RAM_DIM", "RamEncoder", "ram_features",
    "SparseBinaryFeatures", "n_pairs", "pair_from_index", "pair_index", "with_pairs",
    "TileCoder", "TileCoderConfig", "FEATURE_KINDS", "make_encoder",
]
