"""Build and cache the per-game preprocessing models (background, classes, LSH)."""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

import numpy as np

from ..env.core import Action, EpisodeConfig, Environment
from ..env.games import make_env
from ..features.background import BackgroundAccumulator, BackgroundModel
from ..features.disco import ClassModel, discover_classes, extract_blobs
from ..features.lsh import LshModel

MODEL_KINDS = ("background", "classes", "lsh")
# which models each feature kind needs
REQUIRED_MODELS = {
    "basic": ("background",),
    "bass": ("background",),
    "disco": ("background", "classes"),
    "lsh": ("lsh",),
    "ram": (),
}


class PreprocessingMissing(FileNotFoundError):
    pass


def demo_action(env: Environment, t: int) -> int:
    """Scripted demonstration policy for each built-in game."""
    g = env.game_id
    if g == "crossing":
        return Action.UP
    if g == "dodger":
        # sweep while firing
        return Action.RIGHTFIRE if (t // 30) % 2 == 0 else Action.LEFTFIRE
    if g == "gatherer":
        cycle = t % 80
        if cycle < 30:
            return Action.DOWNRIGHT if (t // 80) % 2 == 0 else Action.DOWNLEFT
        if cycle < 50:
            return Action.RIGHT if (t // 80) % 2 == 0 else Action.LEFT
        return Action.UP
    return Action.RIGHT


def sample_screens(game: str, n: int, seed: int, episode: EpisodeConfig | None = None,
                   env_kwargs: dict | None = None, max_demo_steps: int = 200) -> Iterator[np.ndarray]:
    """Screens from episodes that follow the demo policy for a random number of
    steps and then act uniformly at random."""
    rng = np.random.default_rng([seed, 2])
    base = episode or EpisodeConfig()
    env = make_env(game, base, **(env_kwargs or {}))
    produced = 0
    while produced < n:
        env.reset(base.with_seed(int(rng.integers(2 ** 62))))
        demo_steps = int(rng.integers(0, max_demo_steps + 1))
        t = 0
        while not env.terminal and produced < n:
            a = demo_action(env, t) if t < demo_steps else int(rng.integers(18))
            env.emulate(a)
            t += 1
            produced += 1
            yield env.screen()


def model_path(out_dir, game: str, kind: str, seed: int, samples: int | None = None) -> Path:
    suffix = f"-n{samples}" if samples is not None else ""
    return Path(out_dir) / "models" / f"{game}-{kind}-s{seed}{suffix}.arcm"


def build_background(game: str, samples: int, seed: int, **kw) -> BackgroundModel:
    if samples < 1:
        raise ValueError("background detection needs at least one sample")
    acc = None
    for screen in sample_screens(game, samples, seed, **kw):
        if acc is None:
            acc = BackgroundAccumulator(screen.shape)
        acc.add(screen)
    return acc.model()


def build_classes(game: str, samples: int, seed: int, background: BackgroundModel, **kw) -> ClassModel:
    if samples < 1:
        raise ValueError("class discovery needs at least one sample")
    return discover_classes(extract_blobs(s, background) for s in sample_screens(game, samples, seed + 1, **kw))


def build_preprocessing(game: str, features: str, out_dir, seed: int = 0, background_samples: int = 18_000,
                        class_samples: int = 36_000, episode: EpisodeConfig | None = None,
                        env_kwargs: dict | None = None, rebuild: bool = False) -> dict[str, Path]:
    """Write every model ``features`` needs; existing files are reused unless ``rebuild``."""
    kw = {"episode": episode, "env_kwargs": env_kwargs}
    paths: dict[str, Path] = {}
    needed = REQUIRED_MODELS[features]
    bg = None
    if "background" in needed or "classes" in needed:
        p = model_path(out_dir, game, "background", seed, background_samples)
        if rebuild or not p.exists():
            p.parent.mkdir(parents=True, exist_ok=True)
            build_background(game, background_samples, seed, **kw).save(p)
        bg = BackgroundModel.load(p)
        paths["background"] = p
    if "classes" in needed:
        p = model_path(out_dir, game, "classes", seed, class_samples)
        if rebuild or not p.exists():
            build_classes(game, class_samples, seed, bg, **kw).save(p)
        paths["classes"] = p
    if "lsh" in needed:
        p = model_path(out_dir, game, "lsh", seed)
        if rebuild or not p.exists():
            p.parent.mkdir(parents=True, exist_ok=True)
            LshModel.generate(seed).save(p)
        paths["lsh"] = p
    return paths


def load_models(paths: dict[str, Path]) -> dict:
    out = {}
    if "background" in paths:
        out["background"] = BackgroundModel.load(paths["background"])
    if "classes" in paths:
        out["class_model"] = ClassModel.load(paths["classes"])
    if "lsh" in paths:
        out["lsh_model"] = LshModel.load(paths["lsh"])
    return out
