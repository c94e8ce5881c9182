"""Episodic game environments with exact save/restore snapshots."""

from .core import (
    ALL_ACTIONS,
    N_ACTIONS,
    RAM_SIZE,
    SCREEN_HEIGHT,
    SCREEN_WIDTH,
    Action,
    EmulatorState,
    EnvError,
    Environment,
    EpisodeConfig,
    EpisodeOverError,
    Observation,
    SnapshotError,
)
from .games import GAMES, ChainWorld, Crossing, Dodger, Gatherer, TabularMDP, chain_mdp, make_env, random_mdp

__all__ = [
    "ALL_ACTIONS", "N_ACTIONS", "RAM_SIZE", "SCREEN_HEIGHT", "SCREEN_WIDTH",
    "Action", "EmulatorState", "EnvError", "Environment", "EpisodeConfig",
    "EpisodeOverError", "Observation", "SnapshotError",
    "GAMES", "ChainWorld", "Crossing", "Dodger", "Gatherer", "TabularMDP",
    "chain_mdp", "make_env", "random_mdp",
]
