"""Built-in deterministic games.

All four draw a static backdrop plus a handful of single-colour sprites on the
full 160x210 7-bit screen, and mirror their object positions and timers into
the 128-byte RAM.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _pykernels as K
from .. import kernels
from .core import (
    SCREEN_HEIGHT,
    SCREEN_WIDTH,
    Action,
    EpisodeConfig,
    Environment,
    blank_ram,
    put_word,
)


def _mask(rows: list[str]) -> np.ndarray:
    return np.array([[ch == "#" for ch in r] for r in rows], dtype=bool)


def _blit(screen: np.ndarray, mask: np.ndarray, top: int, left: int, colour: int, wrap: bool = False) -> None:
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    ys = ys + top
    xs = xs + left
    if wrap:
        xs %= SCREEN_WIDTH
    keep = (ys >= 0) & (ys < SCREEN_HEIGHT) & (xs >= 0) & (xs < SCREEN_WIDTH)
    screen[ys[keep], xs[keep]] = colour


# ---------------------------------------------------------------- Crossing
CROSSING_AVATAR = _mask([
    "..##....",
    ".####...",
    "######..",
    ".######.",
    "..######",
    "..#####.",
    "...#.#..",
    "..##.##.",
])
CROSSING_CAR = _mask([
    "..########..",
    ".##########.",
    "############",
    "############",
    "############",
    "############",
    ".##..##..##.",
    ".##......##.",
])
CROSSING_SIDEWALK, CROSSING_ROAD, CROSSING_DIVIDER, CROSSING_AVATAR_COLOUR = 8, 4, 30, 28
CROSSING_CAR_COLOURS = (66, 88, 70, 54, 100, 116, 36, 120, 84, 72)


def _crossing_background() -> np.ndarray:
    bg = np.full((SCREEN_HEIGHT, SCREEN_WIDTH), CROSSING_SIDEWALK, dtype=np.uint8)
    road_top = K.CR_LANE_TOP
    road_bottom = K.CR_LANE_TOP + K.CR_LANES * K.CR_LANE_H
    bg[road_top:road_bottom] = CROSSING_ROAD
    dash = (np.arange(SCREEN_WIDTH) % 8) < 4
    for lane in range(1, K.CR_LANES):
        bg[road_top + lane * K.CR_LANE_H, dash] = CROSSING_DIVIDER
    return bg


class Crossing(Environment):
    """Climb through ten lanes of traffic; +1 per completed crossing, a hit sends you back."""

    game_id = "crossing"
    tag = b"XING"
    state_size = K.CR_CARS + K.CR_LANES
    minimal_actions = (Action.NOOP, Action.UP, Action.DOWN)
    _background = _crossing_background()

    def _init_state(self, st):
        st[K.CR_AV_Y] = K.CR_START_Y
        for lane in range(K.CR_LANES):
            st[K.CR_CARS + lane] = K.rand_next_array(st) % SCREEN_WIDTH

    def _run(self, action, frames, max_frames):
        return kernels.crossing_run(self._state, action, frames, max_frames)

    def background(self):
        return self._background.copy()

    def _render(self, st):
        scr = self._background.copy()
        for lane in range(K.CR_LANES):
            top = K.CR_LANE_TOP + lane * K.CR_LANE_H + K.CR_CAR_OFF
            _blit(scr, CROSSING_CAR, top, int(st[K.CR_CARS + lane]), CROSSING_CAR_COLOURS[lane], wrap=True)
        _blit(scr, CROSSING_AVATAR, int(st[K.CR_AV_Y]), K.CR_AV_X, CROSSING_AVATAR_COLOUR)
        return scr

    def _ram(self, st):
        ram = blank_ram()
        ram[0] = st[K.CR_AV_Y]
        ram[1:1 + K.CR_LANES] = st[K.CR_CARS:K.CR_CARS + K.CR_LANES]
        put_word(ram, 16, int(st[K.SCORE]))
        put_word(ram, 18, int(st[K.FRAME]))
        return ram


# ---------------------------------------------------------------- Dodger
DODGER_ENEMY = _mask([
    ".#....#.",
    "..####..",
    ".##..##.",
    "########",
    "#.####.#",
    "#.#..#.#",
])
DODGER_PLAYER = _mask([
    "...##...",
    "..####..",
    ".######.",
    "########",
    "########",
    "##....##",
])
DODGER_GROUND, DODGER_PLAYER_COLOUR, DODGER_BULLET_COLOUR, DODGER_BOMB_COLOUR = 18, 26, 14, 72
DODGER_ROW_COLOURS = (68, 52, 40)


def _dodger_background() -> np.ndarray:
    bg = np.zeros((SCREEN_HEIGHT, SCREEN_WIDTH), dtype=np.uint8)
    bg[200:204] = DODGER_GROUND
    return bg


class Dodger(Environment):
    """Shoot a descending formation that speeds up as it thins out; dodge its bombs."""

    game_id = "dodger"
    tag = b"DODG"
    state_size = K.DG_ALIVE + K.DG_ROWS * K.DG_COLS
    minimal_actions = (Action.NOOP, Action.FIRE, Action.RIGHT, Action.LEFT, Action.RIGHTFIRE, Action.LEFTFIRE)
    _background = _dodger_background()

    def _init_state(self, st):
        st[K.DG_PX] = 76
        st[K.DG_LIVES] = 3
        st[K.DG_FX], st[K.DG_FY], st[K.DG_FDIR] = K.DG_FORM_X0, K.DG_FORM_Y0, 1
        st[K.DG_ALIVE:] = 1
        # desynchronise bomb timing across seeds
        st[K.COUNTER] = K.rand_next_array(st) % 1024

    def _run(self, action, frames, max_frames):
        return kernels.dodger_run(self._state, action, frames, max_frames)

    def background(self):
        return self._background.copy()

    def _render(self, st):
        scr = self._background.copy()
        fx, fy = int(st[K.DG_FX]), int(st[K.DG_FY])
        for i in range(K.DG_ROWS * K.DG_COLS):
            if st[K.DG_ALIVE + i]:
                r, c = divmod(i, K.DG_COLS)
                _blit(scr, DODGER_ENEMY, fy + r * K.DG_DY, fx + c * K.DG_DX, DODGER_ROW_COLOURS[r])
        _blit(scr, DODGER_PLAYER, K.DG_PLAYER_Y, int(st[K.DG_PX]), DODGER_PLAYER_COLOUR)
        if st[K.DG_BACT]:
            by, bx = int(st[K.DG_BY]), int(st[K.DG_BX])
            scr[max(by, 0):by + K.DG_BULLET_H, bx] = DODGER_BULLET_COLOUR
        if st[K.DG_MACT]:
            my, mx = int(st[K.DG_MY]), int(st[K.DG_MX])
            scr[my:min(my + K.DG_BOMB_H, SCREEN_HEIGHT), mx:mx + K.DG_BOMB_W] = DODGER_BOMB_COLOUR
        return scr

    def _ram(self, st):
        ram = blank_ram()
        ram[0:12] = st[[K.DG_PX, K.DG_LIVES, K.DG_BACT, K.DG_BX, K.DG_BY, K.DG_FX,
                        K.DG_FY, K.DG_FDIR, K.DG_TIMER, K.DG_MACT, K.DG_MX, K.DG_MY]] & 0xFF
        alive = st[K.DG_ALIVE:K.DG_ALIVE + K.DG_ROWS * K.DG_COLS].astype(np.uint8)
        ram[12:15] = np.packbits(alive.reshape(K.DG_ROWS, K.DG_COLS), axis=1).ravel()
        ram[15] = st[K.DG_WAVE] & 0xFF
        put_word(ram, 16, int(st[K.SCORE]))
        put_word(ram, 18, int(st[K.FRAME]))
        return ram


# ---------------------------------------------------------------- Gatherer
GATHERER_SUB = _mask([
    ".....##.....",
    "....####....",
    ".##########.",
    "############",
    "############",
    ".##########.",
    "..#......#..",
    "............",
])
GATHERER_ITEM = _mask([
    "..##..",
    ".####.",
    "######",
    "######",
    ".####.",
    "..##..",
])
GATHERER_SHARK = _mask([
    "....##......",
    "..#######..#",
    "###########.",
    "###########.",
    "..#######..#",
    "....##......",
])
GATHERER_SKY, GATHERER_WATER, GATHERER_SEABED = 118, 112, 20
GATHERER_SUB_COLOUR, GATHERER_ITEM_COLOUR, GATHERER_SHARK_COLOUR, GATHERER_AIR_COLOUR = 28, 56, 92, 10
GATHERER_SHARK_Y = (100, 150)


def _gatherer_background() -> np.ndarray:
    bg = np.full((SCREEN_HEIGHT, SCREEN_WIDTH), GATHERER_WATER, dtype=np.uint8)
    bg[:K.GT_SURFACE] = GATHERER_SKY
    bg[K.GT_YMAX + K.GT_SUB_H:] = GATHERER_SEABED
    return bg


class Gatherer(Environment):
    """Collect drifting items underwater before the air runs out; surface to refill."""

    game_id = "gatherer"
    tag = b"GATH"
    state_size = K.GT_SPAWN + 1
    minimal_actions = tuple(Action(a) for a in range(10) if a != Action.FIRE)
    _background = _gatherer_background()

    def _init_state(self, st):
        st[K.GT_SX], st[K.GT_SY] = K.GT_START_X, K.GT_SURFACE
        st[K.GT_AIR], st[K.GT_LIVES] = K.GT_AIR_MAX, 3
        st[K.GT_KX], st[K.GT_KX + 1] = 20, 120
        st[K.GT_KY], st[K.GT_KY + 1] = GATHERER_SHARK_Y
        st[K.GT_KDIR], st[K.GT_KDIR + 1] = 1, -1
        st[K.GT_SPAWN] = K.rand_next_array(st) % K.GT_SPAWN_PERIOD

    def _run(self, action, frames, max_frames):
        return kernels.gatherer_run(self._state, action, frames, max_frames)

    def background(self):
        return self._background.copy()

    def _render(self, st):
        scr = self._background.copy()
        scr[4:8, :int(st[K.GT_AIR]) * 2] = GATHERER_AIR_COLOUR
        for i in range(K.GT_ITEMS):
            if st[K.GT_IACT + i]:
                _blit(scr, GATHERER_ITEM, int(st[K.GT_IY + i]), int(st[K.GT_IX + i]), GATHERER_ITEM_COLOUR)
        for i in range(K.GT_SHARKS):
            _blit(scr, GATHERER_SHARK, int(st[K.GT_KY + i]), int(st[K.GT_KX + i]), GATHERER_SHARK_COLOUR)
        _blit(scr, GATHERER_SUB, int(st[K.GT_SY]), int(st[K.GT_SX]), GATHERER_SUB_COLOUR)
        return scr

    def _ram(self, st):
        ram = blank_ram()
        ram[0:K.GT_SPAWN - K.GT_SX + 1] = st[K.GT_SX:K.GT_SPAWN + 1] & 0xFF
        put_word(ram, 32, int(st[K.SCORE]))
        put_word(ram, 34, int(st[K.FRAME]))
        return ram


# ---------------------------------------------------------------- ChainWorld
JOYSTICK_GROUP = np.array([(K.ACTION_DY[a] + 1) * 3 + K.ACTION_DX[a] + 1 for a in range(18)], dtype=np.int64)
HORIZONTAL_GROUP = np.array([K.ACTION_DX[a] + 1 for a in range(18)], dtype=np.int64)
CHAIN_CELL, CHAIN_MARKER = 6, 30
CHAIN_CELL_W, CHAIN_ROW = 16, 97


@dataclass(frozen=True)
class TabularMDP:
    """Deterministic MDP over integer states; actions act through ``groups``."""

    next_state: np.ndarray  # (n_states, n_groups)
    rewards: np.ndarray  # (n_states, n_groups), integer
    terminal: np.ndarray  # (n_states,), bool
    groups: np.ndarray  # (18,), action -> group
    start: int = 0

    @property
    def n_states(self) -> int:
        return self.next_state.shape[0]

    @property
    def n_groups(self) -> int:
        return self.next_state.shape[1]


def chain_mdp(n_states: int = 10) -> TabularMDP:
    """Left/stay/right chain; entering the last state pays 1 and ends the episode."""
    s = np.arange(n_states)
    nxt = np.stack([np.maximum(s - 1, 0), s, np.minimum(s + 1, n_states - 1)], axis=1)
    rew = np.zeros((n_states, 3), dtype=np.int64)
    rew[n_states - 2, 2] = 1
    term = np.zeros(n_states, dtype=bool)
    term[-1] = True
    return TabularMDP(nxt.astype(np.int64), rew, term, HORIZONTAL_GROUP.copy())


def random_mdp(layout_seed: int, max_states: int = 10, max_reward: int = 3) -> TabularMDP:
    """Random deterministic MDP over the nine joystick positions (fire is ignored)."""
    rng = np.random.default_rng(layout_seed)
    n = int(rng.integers(3, max_states + 1))
    nxt = rng.integers(0, n, size=(n, 9)).astype(np.int64)
    rew = rng.integers(0, max_reward + 1, size=(n, 9)).astype(np.int64)
    term = rng.random(n) < 0.15
    term[0] = False
    return TabularMDP(nxt, rew, term, JOYSTICK_GROUP.copy())


class ChainWorld(Environment):
    """A small tabular MDP drawn as a row of cells; one transition per decision step.

    RAM holds the current state as a single set bit (bit index == state), so
    RAM features are exactly tabular.
    """

    game_id = "chainworld"
    tag = b"CHWD"
    state_size = K.CW_PERIOD + 1

    def __init__(self, config: EpisodeConfig | None = None, mdp: TabularMDP | None = None,
                 layout: str = "chain", layout_seed: int = 0, n_states: int = 10):
        if mdp is None:
            if layout == "chain":
                mdp = chain_mdp(n_states)
            elif layout == "random":
                mdp = random_mdp(layout_seed)
            else:
                raise ValueError(f"unknown ChainWorld layout {layout!r}")
        if not 1 <= mdp.n_states <= SCREEN_WIDTH // CHAIN_CELL_W:
            raise ValueError("ChainWorld supports 1..10 states")
        self.mdp = mdp
        self._next = np.ascontiguousarray(mdp.next_state, dtype=np.int64)
        self._rewards = np.ascontiguousarray(mdp.rewards, dtype=np.int64)
        self._terminal = np.ascontiguousarray(mdp.terminal, dtype=np.uint8)
        self._groups = np.ascontiguousarray(mdp.groups, dtype=np.int64)
        self._bg = self._make_background()
        super().__init__(config)

    @property
    def minimal_actions(self):
        first = {}
        for a in range(18):
            first.setdefault(int(self._groups[a]), Action(a))
        return tuple(sorted(first.values()))

    def _spawn(self):
        return ChainWorld(self.config, mdp=self.mdp)

    def _init_state(self, st):
        st[K.CW_POS] = self.mdp.start
        st[K.CW_PERIOD] = self.config.frames_per_action

    def _run(self, action, frames, max_frames):
        return kernels.chain_run(self._state, action, frames, max_frames,
                                 self._next, self._rewards, self._terminal, self._groups)

    @property
    def position(self) -> int:
        return int(self._state[K.CW_POS])

    def _make_background(self):
        bg = np.zeros((SCREEN_HEIGHT, SCREEN_WIDTH), dtype=np.uint8)
        for i in range(self.mdp.n_states):
            x0 = i * CHAIN_CELL_W
            bg[CHAIN_ROW, x0:x0 + CHAIN_CELL_W - 1] = CHAIN_CELL
            bg[CHAIN_ROW + 15, x0:x0 + CHAIN_CELL_W - 1] = CHAIN_CELL
            bg[CHAIN_ROW:CHAIN_ROW + 16, x0] = CHAIN_CELL
            bg[CHAIN_ROW:CHAIN_ROW + 16, x0 + CHAIN_CELL_W - 2] = CHAIN_CELL
        return bg

    def background(self):
        return self._bg.copy()

    def _render(self, st):
        scr = self._bg.copy()
        x0 = int(st[K.CW_POS]) * CHAIN_CELL_W
        scr[CHAIN_ROW + 4:CHAIN_ROW + 12, x0 + 4:x0 + 11] = CHAIN_MARKER
        return scr

    def _ram(self, st):
        ram = blank_ram()
        pos = int(st[K.CW_POS])
        ram[pos // 8] = 0x80 >> (pos % 8)
        return ram


GAMES: dict[str, type[Environment]] = {
    cls.game_id: cls for cls in (Crossing, Dodger, Gatherer, ChainWorld)
}


def make_env(game_id: str, config: EpisodeConfig | None = None, **kwargs) -> Environment:
    try:
        cls = GAMES[game_id.lower()]
    except KeyError:
        raise ValueError(f"unknown game {game_id!r}; choose from {sorted(GAMES)}") from None
    return cls(config, **kwargs)
