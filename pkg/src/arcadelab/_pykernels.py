"""Pure-Python reference kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature and
bit-identical results. The compiled module is preferred at import time (see
``arcadelab.kernels``); this one is the fallback and the parity reference.

Game kernels mutate an int64 state vector in place and return the score delta
accumulated over the emulated frames.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# common state header
FRAME, SCORE, OVER, SEED, COUNTER = 0, 1, 2, 3, 4
HEADER = 5

SCREEN_W, SCREEN_H = 160, 210

# joystick decode, indexed by action id (standard 18-action ordering)
ACTION_DX = (0, 0, 0, 1, -1, 0, 1, -1, 1, -1, 0, 1, -1, 0, 1, -1, 1, -1)
ACTION_DY = (0, 0, -1, 0, 0, 1, -1, -1, 1, 1, -1, 0, 0, 1, -1, -1, 1, 1)
ACTION_FIRE = (0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1)


def rand_next(s):
    """splitmix64 over (seed, counter); advances the counter stored in ``s``."""
    c = s[COUNTER] + 1
    s[COUNTER] = c
    z = (s[SEED] + c * GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def rand_next_array(st):
    """``rand_next`` on a numpy state vector (python-int arithmetic, no overflow)."""
    s = [0] * HEADER
    s[SEED], s[COUNTER] = int(st[SEED]), int(st[COUNTER])
    r = rand_next(s)
    st[COUNTER] = s[COUNTER]
    return r


# ---------------------------------------------------------------- Crossing
CR_AV_X, CR_AV_W, CR_AV_H = 44, 8, 8
CR_START_Y, CR_GOAL_Y, CR_AV_SPEED = 194, 16, 6
CR_LANE_TOP, CR_LANE_H, CR_LANES = 25, 16, 10
CR_CAR_W, CR_CAR_H, CR_CAR_OFF = 12, 8, 4
CR_CAR_V = (1, -2, 1, -1, 2, -2, 1, -1, 2, -1)
CR_AV_Y, CR_CARS = 5, 6


def crossing_run(state, action, frames, max_frames):
    s = state.tolist()
    dy = ACTION_DY[action]
    reward = 0
    for _ in range(frames):
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
                d = (CR_AV_X - s[CR_CARS + lane]) % SCREEN_W
                if d < CR_CAR_W or d > SCREEN_W - CR_AV_W:
                    y = CR_START_Y
                    break
        s[CR_AV_Y] = y
    s[SCORE] += reward
    state[:] = s
    return reward


# ---------------------------------------------------------------- Dodger
DG_PLAYER_Y, DG_PLAYER_W, DG_PLAYER_H, DG_PLAYER_SPEED, DG_PLAYER_XMAX = 188, 8, 6, 2, 152
DG_BULLET_SPEED, DG_BULLET_H = 4, 4
DG_ENEMY_W, DG_ENEMY_H, DG_ROWS, DG_COLS, DG_DX, DG_DY = 8, 6, 3, 6, 16, 12
DG_FORM_X0, DG_FORM_Y0, DG_FORM_XMAX, DG_FORM_STEP, DG_FORM_DROP = 36, 30, 72, 2, 6
DG_BOMB_SPEED, DG_BOMB_W, DG_BOMB_H, DG_BOMB_ODDS = 2, 2, 4, 24
DG_PX, DG_LIVES, DG_BACT, DG_BX, DG_BY = 5, 6, 7, 8, 9
DG_FX, DG_FY, DG_FDIR, DG_TIMER = 10, 11, 12, 13
DG_MACT, DG_MX, DG_MY, DG_WAVE, DG_ALIVE = 14, 15, 16, 17, 18


def dodger_run(state, action, frames, max_frames):
    s = state.tolist()
    dx = ACTION_DX[action]
    fire = ACTION_FIRE[action]
    n_enemies = DG_ROWS * DG_COLS
    reward = 0
    for _ in range(frames):
        if s[OVER] or s[FRAME] >= max_frames:
            break
        s[FRAME] += 1
        px = s[DG_PX] + dx * DG_PLAYER_SPEED
        px = 0 if px < 0 else (DG_PLAYER_XMAX if px > DG_PLAYER_XMAX else px)
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
                bx, by = s[DG_BX], s[DG_BY]
                for i in range(n_enemies):
                    if not s[DG_ALIVE + i]:
                        continue
                    r, c = divmod(i, DG_COLS)
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
            s[DG_FX], s[DG_FY], s[DG_FDIR], s[DG_TIMER] = DG_FORM_X0, DG_FORM_Y0, 1, 0
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
            r = rand_next(s)
            if r % DG_BOMB_ODDS == 0:
                nth = (r >> 8) % remaining
                for i in range(n_enemies):
                    if s[DG_ALIVE + i]:
                        if nth == 0:
                            rr, c = divmod(i, DG_COLS)
                            s[DG_MACT] = 1
                            s[DG_MX] = s[DG_FX] + c * DG_DX + 3
                            s[DG_MY] = s[DG_FY] + rr * DG_DY + DG_ENEMY_H
                            break
                        nth -= 1
        else:
            s[DG_MY] += DG_BOMB_SPEED
            mx, my = s[DG_MX], s[DG_MY]
            if my >= SCREEN_H:
                s[DG_MACT] = 0
            elif (s[DG_PX] - DG_BOMB_W < mx < s[DG_PX] + DG_PLAYER_W
                  and my < DG_PLAYER_Y + DG_PLAYER_H and DG_PLAYER_Y < my + DG_BOMB_H):
                s[DG_MACT] = 0
                s[DG_LIVES] -= 1
                if s[DG_LIVES] <= 0:
                    s[OVER] = 1
    s[SCORE] += reward
    state[:] = s
    return reward


# ---------------------------------------------------------------- Gatherer
GT_SUB_W, GT_SUB_H, GT_SPEED = 12, 8, 2
GT_XMAX, GT_SURFACE, GT_YMAX = 148, 46, 190
GT_AIR_MAX, GT_AIR_PERIOD, GT_AIR_REFILL = 64, 4, 2
GT_ITEMS, GT_ITEM_W, GT_ITEM_H, GT_ITEM_XMAX, GT_SPAWN_PERIOD = 4, 6, 6, 154, 40
GT_SHARKS, GT_SHARK_W, GT_SHARK_H, GT_SHARK_XMAX = 2, 12, 6, 148
GT_START_X = 74
GT_SX, GT_SY, GT_AIR, GT_LIVES, GT_AIRT = 5, 6, 7, 8, 9
GT_IX, GT_IY, GT_IACT, GT_IDIR = 10, 14, 18, 22
GT_KX, GT_KY, GT_KDIR, GT_SPAWN = 26, 28, 30, 32


def _gt_lose_life(s):
    s[GT_LIVES] -= 1
    s[GT_SX], s[GT_SY] = GT_START_X, GT_SURFACE
    s[GT_AIR], s[GT_AIRT] = GT_AIR_MAX, 0
    if s[GT_LIVES] <= 0:
        s[OVER] = 1


def gatherer_run(state, action, frames, max_frames):
    s = state.tolist()
    dx, dy = ACTION_DX[action], ACTION_DY[action]
    reward = 0
    for _ in range(frames):
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
                    _gt_lose_life(s)
                    if s[OVER]:
                        break
        sx, sy = s[GT_SX], s[GT_SY]
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
            kx, ky = s[GT_KX + i], s[GT_KY + i]
            if sx < kx + GT_SHARK_W and kx < sx + GT_SUB_W and sy < ky + GT_SHARK_H and ky < sy + GT_SUB_H:
                _gt_lose_life(s)
                break
        if s[OVER]:
            break
        s[GT_SPAWN] += 1
        if s[GT_SPAWN] >= GT_SPAWN_PERIOD:
            s[GT_SPAWN] = 0
            for i in range(GT_ITEMS):
                if not s[GT_IACT + i]:
                    r = rand_next(s)
                    s[GT_IACT + i] = 1
                    s[GT_IY + i] = 70 + (r % 6) * 20
                    if (r >> 8) & 1:
                        s[GT_IDIR + i], s[GT_IX + i] = 1, 0
                    else:
                        s[GT_IDIR + i], s[GT_IX + i] = -1, GT_ITEM_XMAX
                    break
    s[SCORE] += reward
    state[:] = s
    return reward


# ---------------------------------------------------------------- ChainWorld
CW_POS, CW_PERIOD = 5, 6


def chain_run(state, action, frames, max_frames, next_state, rewards, terminal, groups):
    s = state.tolist()
    g = int(groups[action])
    reward = 0
    for _ in range(frames):
        if s[OVER] or s[FRAME] >= max_frames:
            break
        if s[FRAME] % s[CW_PERIOD] == 0:
            pos = s[CW_POS]
            reward += int(rewards[pos, g])
            pos = int(next_state[pos, g])
            s[CW_POS] = pos
            if terminal[pos]:
                s[OVER] = 1
        s[FRAME] += 1
    s[SCORE] += reward
    state[:] = s
    return reward


# ---------------------------------------------------------------- features
def colour_presence(screen, background, palette, n_buckets, tile_w, tile_h, n_tile_cols):
    """Sorted indices ``tile * n_buckets + palette[colour]`` for foreground pixels."""
    ys, xs = np.nonzero(screen != background)
    if ys.size == 0:
        return np.empty(0, dtype=np.int64)
    tiles = (ys // tile_h) * n_tile_cols + xs // tile_w
    idx = tiles.astype(np.int64) * n_buckets + palette[screen[ys, xs]]
    return np.unique(idx)


def pair_indices(base, d):
    """Flat indices of all unordered pairs of ``base`` (sorted, distinct) in a d-dim block."""
    base = np.asarray(base, dtype=np.int64)
    n = base.size
    if n < 2:
        return np.empty(0, dtype=np.int64)
    a, b = np.triu_indices(n, k=1)
    i, j = base[a], base[b]
    return i * d - i * (i + 1) // 2 + (j - i - 1)


def lsh_project(bits, support, hashes, m):
    """Per random vector, sum of hash values over support positions whose bit is set, mod m."""
    hit = bits[support].astype(bool)
    return (np.where(hit, hashes, 0).sum(axis=1, dtype=np.int64) % m).astype(np.int64)
