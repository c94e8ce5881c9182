# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels. Semantics mirror ``_pykernels`` exactly (parity-tested)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, int32_t, uint8_t

cnp.import_array()

DEF FRAME = 0
DEF SCORE = 1
DEF OVER = 2
DEF SEED = 3
DEF COUNTER = 4

DEF SCREEN_W = 160
DEF SCREEN_H = 210

cdef int ACTION_DX[18]
cdef int ACTION_DY[18]
cdef int ACTION_FIRE[18]
ACTION_DX[:] = [0, 0, 0, 1, -1, 0, 1, -1, 1, -1, 0, 1, -1, 0, 1, -1, 1, -1]
ACTION_DY[:] = [0, 0, -1, 0, 0, 1, -1, -1, 1, 1, -1, 0, 0, 1, -1, -1, 1, 1]
ACTION_FIRE[:] = [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1]


cdef inline uint64_t rand_next(int64_t[::1] s) noexcept nogil:
    cdef uint64_t c = <uint64_t>(s[COUNTER] + 1)
    s[COUNTER] = <int64_t>c
    cdef uint64_t z = <uint64_t>s[SEED] + c * <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


# ---------------------------------------------------------------- Crossing
DEF CR_AV_X = 44
DEF CR_AV_W = 8
DEF CR_AV_H = 8
DEF CR_START_Y = 194
DEF CR_GOAL_Y = 16
DEF CR_AV_SPEED = 6
DEF CR_LANE_TOP = 25
DEF CR_LANE_H = 16
DEF CR_LANES = 10
DEF CR_CAR_W = 12
DEF CR_CAR_H = 8
DEF CR_CAR_OFF = 4
DEF CR_AV_Y = 5
DEF CR_CARS = 6

cdef int CR_CAR_V[10]
CR_CAR_V[:] = [1, -2, 1, -1, 2, -2, 1, -1, 2, -1]


def crossing_run(int64_t[::1] s, int action, int frames, int64_t max_frames):
    cdef int dy = ACTION_DY[action]
    cdef int64_t reward = 0, y, x, top, d
    cdef int f, lane
    for f in range(frames):
        if s[OVER] or s[FRAME] >= max_frames:
            break
        s[FRAME] += 1
        y = s[CR_AV_Y] + dy * CR_AV_SPEED
        if y > CR_START_Y:
            y = CR_START_Y
        if y <= CR_GOAL_Y:
            reward += 1
            y = CR_START_Y
        for lane in range(CR_LANES):
            x = s[CR_CARS + lane] + CR_CAR_V[lane]
            if x < 0:
                x += SCREEN_W
            elif x >= SCREEN_W:
                x -= SCREEN_W
            s[CR_CARS + lane] = x
        for lane in range(CR_LANES):
            top = CR_LANE_TOP + lane * CR_LANE_H + CR_CAR_OFF
            if y < top + CR_CAR_H and top < y + CR_AV_H:
                d = CR_AV_X - s[CR_CARS + lane]
                if d < 0:
                    d += SCREEN_W
                if d < CR_CAR_W or d > SCREEN_W - CR_AV_W:
                    y = CR_START_Y
                    break
        s[CR_AV_Y] = y
    s[SCORE] += reward
    return reward


# ---------------------------------------------------------------- Dodger
DEF DG_PLAYER_Y = 188
DEF DG_PLAYER_W = 8
DEF DG_PLAYER_H = 6
DEF DG_PLAYER_SPEED = 2
DEF DG_PLAYER_XMAX = 152
DEF DG_BULLET_SPEED = 4
DEF DG_BULLET_H = 4
DEF DG_ENEMY_W = 8
DEF DG_ENEMY_H = 6
DEF DG_ROWS = 3
DEF DG_COLS = 6
DEF DG_DX = 16
DEF DG_DY = 12
DEF DG_FORM_X0 = 36
DEF DG_FORM_Y0 = 30
DEF DG_FORM_XMAX = 72
DEF DG_FORM_STEP = 2
DEF DG_FORM_DROP = 6
DEF DG_BOMB_SPEED = 2
DEF DG_BOMB_W = 2
DEF DG_BOMB_H = 4
DEF DG_BOMB_ODDS = 24
DEF DG_PX = 5
DEF DG_LIVES = 6
DEF DG_BACT = 7
DEF DG_BX = 8
DEF DG_BY = 9
DEF DG_FX = 10
DEF DG_FY = 11
DEF DG_FDIR = 12
DEF DG_TIMER = 13
DEF DG_MACT = 14
DEF DG_MX = 15
DEF DG_MY = 16
DEF DG_WAVE = 17
DEF DG_ALIVE = 18


def dodger_run(int64_t[::1] s, int action, int frames, int64_t max_frames):
    cdef int dx = ACTION_DX[action]
    cdef int fire = ACTION_FIRE[action]
    cdef int n_enemies = DG_ROWS * DG_COLS
    cdef int64_t reward = 0, px, bx, by, ex, ey, fx, mx, my
    cdef int f, i, r, c, remaining, lowest
    cdef uint64_t rnd, nth
    for f in range(frames):
        if s[OVER] or s[FRAME] >= max_frames:
            break
        s[FRAME] += 1
        px = s[DG_PX] + dx * DG_PLAYER_SPEED
        if px < 0:
            px = 0
        elif px > DG_PLAYER_XMAX:
            px = DG_PLAYER_XMAX
        s[DG_PX] = px
        if fire and not s[DG_BACT]:
            s[DG_BACT] = 1
            s[DG_BX] = px + 3
            s[DG_BY] = DG_PLAYER_Y - DG_BULLET_H
        if s[DG_BACT]:
            s[DG_BY] -= DG_BULLET_SPEED
            if s[DG_BY] < 0:
                s[DG_BACT] = 0
            else:
                bx = s[DG_BX]
                by = s[DG_BY]
                for i in range(n_enemies):
                    if not s[DG_ALIVE + i]:
                        continue
                    r = i // DG_COLS
                    c = i % DG_COLS
                    ex = s[DG_FX] + c * DG_DX
                    ey = s[DG_FY] + r * DG_DY
                    if ex <= bx < ex + DG_ENEMY_W and by < ey + DG_ENEMY_H and ey < by + DG_BULLET_H:
                        s[DG_ALIVE + i] = 0
                        reward += DG_ROWS - r
                        s[DG_BACT] = 0
                        break
        remaining = 0
        lowest = -1
        for i in range(n_enemies):
            if s[DG_ALIVE + i]:
                remaining += 1
                lowest = i // DG_COLS
        if remaining == 0:
            s[DG_WAVE] += 1
            for i in range(n_enemies):
                s[DG_ALIVE + i] = 1
            s[DG_FX] = DG_FORM_X0
            s[DG_FY] = DG_FORM_Y0
            s[DG_FDIR] = 1
            s[DG_TIMER] = 0
            remaining = n_enemies
            lowest = DG_ROWS - 1
        s[DG_TIMER] += 1
        if s[DG_TIMER] >= 1 + remaining * remaining // 36:
            s[DG_TIMER] = 0
            fx = s[DG_FX] + s[DG_FDIR] * DG_FORM_STEP
            if fx < 0 or fx > DG_FORM_XMAX:
                fx = 0 if fx < 0 else DG_FORM_XMAX
                s[DG_FDIR] = -s[DG_FDIR]
                s[DG_FY] += DG_FORM_DROP
            s[DG_FX] = fx
        if s[DG_FY] + lowest * DG_DY + DG_ENEMY_H >= DG_PLAYER_Y:
            s[OVER] = 1
        if not s[DG_MACT]:
            rnd = rand_next(s)
            if rnd % DG_BOMB_ODDS == 0:
                nth = (rnd >> 8) % <uint64_t>remaining
                for i in range(n_enemies):
                    if s[DG_ALIVE + i]:
                        if nth == 0:
                            r = i // DG_COLS
                            c = i % DG_COLS
                            s[DG_MACT] = 1
                            s[DG_MX] = s[DG_FX] + c * DG_DX + 3
                            s[DG_MY] = s[DG_FY] + r * DG_DY + DG_ENEMY_H
                            break
                        nth -= 1
        else:
            s[DG_MY] += DG_BOMB_SPEED
            mx = s[DG_MX]
            my = s[DG_MY]
            if my >= SCREEN_H:
                s[DG_MACT] = 0
            elif (s[DG_PX] - DG_BOMB_W < mx < s[DG_PX] + DG_PLAYER_W
                  and my < DG_PLAYER_Y + DG_PLAYER_H and DG_PLAYER_Y < my + DG_BOMB_H):
                s[DG_MACT] = 0
                s[DG_LIVES] -= 1
                if s[DG_LIVES] <= 0:
                    s[OVER] = 1
    s[SCORE] += reward
    return reward


# ---------------------------------------------------------------- Gatherer
DEF GT_SUB_W = 12
DEF GT_SUB_H = 8
DEF GT_SPEED = 2
DEF GT_XMAX = 148
DEF GT_SURFACE = 46
DEF GT_YMAX = 190
DEF GT_AIR_MAX = 64
DEF GT_AIR_PERIOD = 4
DEF GT_AIR_REFILL = 2
DEF GT_ITEMS = 4
DEF GT_ITEM_W = 6
DEF GT_ITEM_H = 6
DEF GT_ITEM_XMAX = 154
DEF GT_SPAWN_PERIOD = 40
DEF GT_SHARKS = 2
DEF GT_SHARK_W = 12
DEF GT_SHARK_H = 6
DEF GT_SHARK_XMAX = 148
DEF GT_START_X = 74
DEF GT_SX = 5
DEF GT_SY = 6
DEF GT_AIR = 7
DEF GT_LIVES = 8
DEF GT_AIRT = 9
DEF GT_IX = 10
DEF GT_IY = 14
DEF GT_IACT = 18
DEF GT_IDIR = 22
DEF GT_KX = 26
DEF GT_KY = 28
DEF GT_KDIR = 30
DEF GT_SPAWN = 32


cdef inline void gt_lose_life(int64_t[::1] s) noexcept nogil:
    s[GT_LIVES] -= 1
    s[GT_SX] = GT_START_X
    s[GT_SY] = GT_SURFACE
    s[GT_AIR] = GT_AIR_MAX
    s[GT_AIRT] = 0
    if s[GT_LIVES] <= 0:
        s[OVER] = 1


def gatherer_run(int64_t[::1] s, int action, int frames, int64_t max_frames):
    cdef int dx = ACTION_DX[action]
    cdef int dy = ACTION_DY[action]
    cdef int64_t reward = 0, x, y, air, sx, sy, ix, kx, ky
    cdef int f, i
    cdef uint64_t rnd
    for f in range(frames):
        if s[OVER] or s[FRAME] >= max_frames:
            break
        s[FRAME] += 1
        x = s[GT_SX] + dx * GT_SPEED
        y = s[GT_SY] + dy * GT_SPEED
        s[GT_SX] = 0 if x < 0 else (GT_XMAX if x > GT_XMAX else x)
        s[GT_SY] = GT_SURFACE if y < GT_SURFACE else (GT_YMAX if y > GT_YMAX else y)
        if s[GT_SY] == GT_SURFACE:
            air = s[GT_AIR] + GT_AIR_REFILL
            s[GT_AIR] = GT_AIR_MAX if air > GT_AIR_MAX else air
            s[GT_AIRT] = 0
        else:
            s[GT_AIRT] += 1
            if s[GT_AIRT] >= GT_AIR_PERIOD:
                s[GT_AIRT] = 0
                s[GT_AIR] -= 1
                if s[GT_AIR] <= 0:
                    gt_lose_life(s)
                    if s[OVER]:
                        break
        sx = s[GT_SX]
        sy = s[GT_SY]
        for i in range(GT_ITEMS):
            if not s[GT_IACT + i]:
                continue
            ix = s[GT_IX + i] + s[GT_IDIR + i]
            s[GT_IX + i] = ix
            if ix < 0 or ix > GT_ITEM_XMAX:
                s[GT_IACT + i] = 0
            elif (sx < ix + GT_ITEM_W and ix < sx + GT_SUB_W
                  and sy < s[GT_IY + i] + GT_ITEM_H and s[GT_IY + i] < sy + GT_SUB_H):
                s[GT_IACT + i] = 0
                reward += 1
        for i in range(GT_SHARKS):
            kx = s[GT_KX + i] + s[GT_KDIR + i]
            if kx < 0 or kx > GT_SHARK_XMAX:
                kx = 0 if kx < 0 else GT_SHARK_XMAX
                s[GT_KDIR + i] = -s[GT_KDIR + i]
            s[GT_KX + i] = kx
        for i in range(GT_SHARKS):
            kx = s[GT_KX + i]
            ky = s[GT_KY + i]
            if sx < kx + GT_SHARK_W and kx < sx + GT_SUB_W and sy < ky + GT_SHARK_H and ky < sy + GT_SUB_H:
                gt_lose_life(s)
                break
        if s[OVER]:
            break
        s[GT_SPAWN] += 1
        if s[GT_SPAWN] >= GT_SPAWN_PERIOD:
            s[GT_SPAWN] = 0
            for i in range(GT_ITEMS):
                if not s[GT_IACT + i]:
                    rnd = rand_next(s)
                    s[GT_IACT + i] = 1
                    s[GT_IY + i] = 70 + <int64_t>(rnd % 6) * 20
                    if (rnd >> 8) & 1:
                        s[GT_IDIR + i] = 1
                        s[GT_IX + i] = 0
                    else:
                        s[GT_IDIR + i] = -1
                        s[GT_IX + i] = GT_ITEM_XMAX
                    break
    s[SCORE] += reward
    return reward


# ---------------------------------------------------------------- ChainWorld
DEF CW_POS = 5
DEF CW_PERIOD = 6


def chain_run(int64_t[::1] s, int action, int frames, int64_t max_frames,
              const int64_t[:, ::1] next_state, const int64_t[:, ::1] rewards,
              const uint8_t[::1] terminal, const int64_t[::1] groups):
    cdef int64_t g = groups[action]
    cdef int64_t reward = 0, pos
    cdef int f
    for f in range(frames):
        if s[OVER] or s[FRAME] >= max_frames:
            break
        if s[FRAME] % s[CW_PERIOD] == 0:
            pos = s[CW_POS]
            reward += rewards[pos, g]
            pos = next_state[pos, g]
            s[CW_POS] = pos
            if terminal[pos]:
                s[OVER] = 1
        s[FRAME] += 1
    s[SCORE] += reward
    return reward


# ---------------------------------------------------------------- features
def colour_presence(const uint8_t[:, ::1] screen, const uint8_t[:, ::1] background,
                    const int64_t[::1] palette, int n_buckets, int tile_w, int tile_h,
                    int n_tile_cols):
    cdef Py_ssize_t h = screen.shape[0], w = screen.shape[1]
    cdef int n_tile_rows = (h + tile_h - 1) // tile_h
    cdef Py_ssize_t total = <Py_ssize_t>n_tile_rows * n_tile_cols * n_buckets
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seen = np.zeros(total, dtype=np.uint8)
    cdef uint8_t[::1] sv = seen
    cdef Py_ssize_t y, x, idx, count = 0
    cdef uint8_t col
    for y in range(h):
        for x in range(w):
            col = screen[y, x]
            if col != background[y, x]:
                idx = ((y // tile_h) * n_tile_cols + x // tile_w) * n_buckets + palette[col]
                if not sv[idx]:
                    sv[idx] = 1
                    count += 1
    out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef Py_ssize_t k = 0
    for idx in range(total):
        if sv[idx]:
            ov[k] = idx
            k += 1
    return out


def pair_indices(const int64_t[::1] base, int64_t d):
    cdef Py_ssize_t n = base.shape[0], a, b, k = 0
    cdef Py_ssize_t total = n * (n - 1) // 2 if n > 1 else 0
    out = np.empty(total, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t i, j, row
    for a in range(n):
        i = base[a]
        row = i * d - i * (i + 1) // 2 - i - 1
        for b in range(a + 1, n):
            j = base[b]
            ov[k] = row + j
            k += 1
    return out


def lsh_project(const uint8_t[::1] bits, const int32_t[:, ::1] support,
                const int32_t[:, ::1] hashes, int64_t m):
    cdef Py_ssize_t l = support.shape[0], k = support.shape[1], i, j
    out = np.empty(l, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t acc
    with nogil:
        for i in range(l):
            acc = 0
            for j in range(k):
                if bits[support[i, j]]:
                    acc += hashes[i, j]
            ov[i] = acc % m
    return out
