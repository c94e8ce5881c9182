"""Environment contract: actions, observations, episode config and snapshots."""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import ClassVar

import numpy as np

from .. import _pykernels as _k

SCREEN_WIDTH = 160
SCREEN_HEIGHT = 210
RAM_SIZE = 128
N_COLOURS = 128
N_ACTIONS = 18

_SEED_MASK = (1 << 62) - 1


class Action(IntEnum):
    NOOP = 0
    FIRE = 1
    UP = 2
    RIGHT = 3
    LEFT = 4
    DOWN = 5
    UPRIGHT = 6
    UPLEFT = 7
    DOWNRIGHT = 8
    DOWNLEFT = 9
    UPFIRE = 10
    RIGHTFIRE = 11
    LEFTFIRE = 12
    DOWNFIRE = 13
    UPRIGHTFIRE = 14
    UPLEFTFIRE = 15
    DOWNRIGHTFIRE = 16
    DOWNLEFTFIRE = 17

    @property
    def dx(self) -> int:
        return _k.ACTION_DX[self]

    @property
    def dy(self) -> int:
        return _k.ACTION_DY[self]

    @property
    def fire(self) -> bool:
        return bool(_k.ACTION_FIRE[self])


ALL_ACTIONS: tuple[Action, ...] = tuple(Action)


class EnvError(RuntimeError):
    pass


class EpisodeOverError(EnvError):
    """Raised when acting on an episode that has already terminated."""


class SnapshotError(ValueError):
    """Raised for payloads that are corrupted or belong to another game type."""


@dataclass(frozen=True)
class EpisodeConfig:
    frames_per_action: int = 5
    max_frames: int = 18_000
    seed: int = 0

    def __post_init__(self):
        if self.frames_per_action < 1:
            raise ValueError("frames_per_action must be >= 1")
        if self.max_frames < self.frames_per_action:
            raise ValueError("max_frames must be >= frames_per_action")

    def with_seed(self, seed: int) -> "EpisodeConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class Observation:
    screen: np.ndarray
    ram: np.ndarray
    reward: float
    terminal: bool


@dataclass(frozen=True)
class EmulatorState:
    """Opaque snapshot: 4-byte game tag, little-endian u32 body length, body."""

    payload: bytes

    @property
    def tag(self) -> bytes:
        return self.payload[:4]

    @classmethod
    def pack(cls, tag: bytes, state: np.ndarray) -> "EmulatorState":
        body = np.ascontiguousarray(state, dtype="<i8").tobytes()
        return cls(tag + struct.pack("<I", len(body)) + body)

    def unpack(self, tag: bytes, size: int) -> np.ndarray:
        p = self.payload
        if len(p) < 8:
            raise SnapshotError("payload too short")
        if p[:4] != tag:
            raise SnapshotError(f"snapshot is for game type {p[:4]!r}, not {tag!r}")
        (n,) = struct.unpack("<I", p[4:8])
        if n != len(p) - 8 or n != 8 * size:
            raise SnapshotError("payload length does not match its header")
        return np.frombuffer(p, dtype="<i8", offset=8).astype(np.int64)

    def to_bytes(self) -> bytes:
        return self.payload


def parse_action(action) -> int:
    a = int(action)
    if not 0 <= a < N_ACTIONS:
        raise ValueError(f"action {action!r} outside [0, 17]")
    return a


class Environment:
    """Deterministic episodic game over a fixed-size int64 state vector.

    Subclasses provide the state layout (``_init_state``), the frame kernel
    (``_run``) and the renderers (``_render``, ``_ram``). Everything that
    influences future frames, including the random-number counter, lives in
    the state vector, so a snapshot is just that vector.
    """

    game_id: ClassVar[str]
    tag: ClassVar[bytes]
    state_size: ClassVar[int]
    minimal_actions: ClassVar[tuple[Action, ...]] = ALL_ACTIONS

    def __init__(self, config: EpisodeConfig | None = None):
        self.config = config or EpisodeConfig()
        self._state = np.zeros(self.state_size, dtype=np.int64)
        self.reset()

    # -- episode control
    def reset(self, config: EpisodeConfig | None = None) -> Observation:
        if config is not None:
            self.config = config
        st = np.zeros(self.state_size, dtype=np.int64)
        st[_k.SEED] = self.config.seed & _SEED_MASK
        self._init_state(st)
        self._state = st
        return self._observe(0.0)

    def emulate(self, action) -> tuple[float, bool]:
        """Advance one decision step without rendering; returns (reward, terminal)."""
        a = parse_action(action)
        if self.terminal:
            raise EpisodeOverError(f"{self.game_id}: act() after terminal; call reset() first")
        r = self._run(a, self.config.frames_per_action, self.config.max_frames)
        return float(r), self.terminal

    def play(self, actions, gamma: float = 1.0) -> float:
        """Apply ``actions`` until they run out or the episode ends; returns sum of gamma^t r_t."""
        fpa, cap = self.config.frames_per_action, self.config.max_frames
        total, g = 0.0, 1.0
        for a in actions:
            if self.terminal:
                break
            total += g * self._run(parse_action(a), fpa, cap)
            g *= gamma
        return total

    def act(self, action) -> Observation:
        reward, _ = self.emulate(action)
        return self._observe(reward)

    @property
    def terminal(self) -> bool:
        s = self._state
        return bool(s[_k.OVER]) or int(s[_k.FRAME]) >= self.config.max_frames

    @property
    def frame(self) -> int:
        return int(self._state[_k.FRAME])

    @property
    def score(self) -> int:
        return int(self._state[_k.SCORE])

    # -- snapshots
    def save_state(self) -> EmulatorState:
        return EmulatorState.pack(self.tag, self._state)

    def restore_state(self, state: EmulatorState) -> None:
        if not isinstance(state, EmulatorState):
            state = EmulatorState(bytes(state))
        self._state = state.unpack(self.tag, self.state_size)

    def clone(self) -> "Environment":
        """Independent environment of the same game in the same state."""
        other = self._spawn()
        other._state = self._state.copy()
        return other

    def _spawn(self) -> "Environment":
        return type(self)(self.config)

    # -- views
    def observe(self) -> Observation:
        return self._observe(0.0)

    def screen(self) -> np.ndarray:
        return self._render(self._state)

    def ram(self) -> np.ndarray:
        return self._ram(self._state)

    def minimal_action_set(self) -> tuple[Action, ...]:
        return self.minimal_actions

    def legal_action_set(self) -> tuple[Action, ...]:
        return ALL_ACTIONS

    def _observe(self, reward: float) -> Observation:
        return Observation(self.screen(), self.ram(), reward, self.terminal)

    # -- per game
    def _init_state(self, st: np.ndarray) -> None:
        raise NotImplementedError

    def _run(self, action: int, frames: int, max_frames: int) -> int:
        raise NotImplementedError

    def _render(self, st: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _ram(self, st: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def background(self) -> np.ndarray:
        """The static backdrop every frame is drawn on."""
        raise NotImplementedError


def blank_ram() -> np.ndarray:
    return np.zeros(RAM_SIZE, dtype=np.uint8)


def put_word(ram: np.ndarray, offset: int, value: int) -> None:
    """Store a 16-bit little-endian word."""
    ram[offset] = value & 0xFF
    ram[offset + 1] = (value >> 8) & 0xFF
