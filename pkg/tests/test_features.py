from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcadelab.env import ChainWorld, make_env
from arcadelab.features import (
    BASIC_DIM, BASS_BASE_DIM, BASS_DIM, RAM_DIM, SECAM_TABLE, BackgroundAccumulator, BackgroundModel, Blob,
    ClassModel, DiscoEncoder, DiscoLayout, DiscoveryConfig, Instance, LshModel, ModelFormatError, ShapeClass,
    SparseBinaryFeatures, TileCoder, basic_features, bass_features, binarize_screen, detect_background,
    disco_features, discover_classes, extract_blobs, lsh_codes, lsh_features, make_encoder, mask_overlap,
    n_pairs, pair_from_index, pair_index, ram_features, secam_map, track, with_pairs,
)
from arcadelab.features import modelio
from arcadelab.features.colour import TILE_COLS, TILE_H, TILE_W
from arcadelab.features.lsh import hash_entries

H, W = 210, 160


def _blank(colour=0):
    return np.full((H, W), colour, dtype=np.uint8)


@pytest.fixture(scope="module")
def zero_bg():
    return BackgroundModel(_blank(), 1)


@pytest.fixture(scope="module")
def lsh_model():
    return LshModel.generate(3)


# ---------------------------------------------------------------- dimensions
def test_fixed_dimensions():
    assert BASIC_DIM == 28_672
    assert BASS_DIM == 1_606_528
    assert RAM_DIM == 524_800


def test_dimension_counts_from_indexing():
    # 16x14 tiles; 8 SECAM colours; pairs of bits; 1024 RAM bits
    assert BASIC_DIM == 16 * 14 * 128
    assert BASS_DIM == 1792 + 1792 * 1791 // 2
    assert RAM_DIM == 1024 + 1024 * 1023 // 2


def test_pair_index_is_a_bijection_at_bass_size():
    d = BASS_BASE_DIM
    i, j = np.triu_indices(d, 1)
    p = pair_index(i, j, d)
    assert np.array_equal(p, np.arange(n_pairs(d)))
    ii, jj = pair_from_index(p, d)
    assert np.array_equal(ii, i) and np.array_equal(jj, j)


@settings(max_examples=200, deadline=None)
@given(d=st.integers(2, 5000), data=st.data())
def test_pair_index_roundtrip(d, data):
    i = data.draw(st.integers(0, d - 2))
    j = data.draw(st.integers(i + 1, d - 1))
    p = int(pair_index(i, j, d))
    assert 0 <= p < n_pairs(d)
    assert tuple(int(v) for v in pair_from_index(p, d)) == (i, j)


def test_sparse_features_validation():
    with pytest.raises(ValueError):
        SparseBinaryFeatures(10, np.array([3, 2]))
    with pytest.raises(ValueError):
        SparseBinaryFeatures(10, np.array([10]))
    f = SparseBinaryFeatures.from_indices(10, [4, 1, 4])
    assert list(f.active) == [1, 4] and len(f) == 2
    assert f.to_dense().sum() == 2


def test_with_pairs_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = int(rng.integers(2, 300))
        base = np.unique(rng.integers(0, d, size=rng.integers(0, 20)))
        expect = list(base) + sorted(d + int(pair_index(a, b, d)) for a, b in itertools.combinations(base, 2))
        assert list(with_pairs(base, d)) == expect


# ---------------------------------------------------------------- background
def test_background_identical_samples():
    s = np.random.default_rng(1).integers(0, 128, size=(H, W)).astype(np.uint8)
    assert np.array_equal(detect_background([s] * 3).modal, s)


def test_background_mode_and_tie_break():
    acc = BackgroundAccumulator((1, 2))
    for c in [5, 5, 5, 3, 3]:
        acc.add(np.array([[c, 3 if c == 5 else 5]], dtype=np.uint8))
    assert acc.model().modal.tolist() == [[5, 3]]
    tie = detect_background([np.array([[5]], dtype=np.uint8), np.array([[3]], dtype=np.uint8)])
    assert tie.modal[0, 0] == 3


def test_background_needs_samples():
    with pytest.raises(ValueError):
        detect_background([])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(0, 127), min_size=6, max_size=6), min_size=1, max_size=12), st.randoms())
def test_background_order_invariant(rows, rnd):
    screens = [np.array(r, dtype=np.uint8).reshape(2, 3) for r in rows]
    shuffled = list(screens)
    rnd.shuffle(shuffled)
    a, b = detect_background(screens).modal, detect_background(shuffled).modal
    assert np.array_equal(a, b)
    # mode oracle: the smallest colour among those with maximal count
    stack = np.stack(screens).reshape(len(screens), -1)
    for k in range(6):
        vals, counts = np.unique(stack[:, k], return_counts=True)
        assert a.ravel()[k] == vals[counts == counts.max()].min()


def test_game_background_recovered_from_samples():
    env = make_env("gatherer")
    assert np.array_equal(detect_background([env.background()] * 2).modal, env.background())


# ---------------------------------------------------------------- Basic / BASS
def test_basic_empty_on_background(zero_bg):
    assert len(basic_features(_blank(), zero_bg)) == 0


def test_basic_single_pixel(zero_bg):
    s = _blank()
    y, x, c = 37, 93, 77
    s[y, x] = c
    t = (y // TILE_H) * TILE_COLS + x // TILE_W
    assert basic_features(s, zero_bg).active.tolist() == [t * 128 + c]


def test_basic_uniform_colour_covers_every_tile(zero_bg):
    f = basic_features(_blank(9), zero_bg)
    expect = sorted({((y // TILE_H) * TILE_COLS + x // TILE_W) * 128 + 9 for y in range(H) for x in range(W)})
    assert f.active.tolist() == expect and len(expect) == 224


def test_basic_shape_mismatch(zero_bg):
    with pytest.raises(ValueError):
        basic_features(np.zeros((10, 10), dtype=np.uint8), zero_bg)


def test_secam_map():
    assert secam_map(0) == 0
    assert {secam_map(c) for c in range(16)} == {0}
    assert {secam_map(c) for c in range(128)} == set(range(8))
    with pytest.raises(ValueError):
        secam_map(128)


def _tile_colour_oracle(screen, bg, table):
    out = set()
    for y, x in zip(*np.nonzero(screen != bg)):
        t = (y // TILE_H) * TILE_COLS + x // TILE_W
        out.add(int(t * 8 + table[screen[y, x]]))
    return sorted(out)


def test_bass_two_base_features(zero_bg):
    s = _blank()
    s[0, 0] = 20
    s[100, 100] = 50
    f = bass_features(s, zero_bg)
    assert len(f) == 3


def test_bass_combinatorial_oracle(zero_bg):
    rng = np.random.default_rng(5)
    for _ in range(5):
        s = _blank()
        for _ in range(rng.integers(0, 40)):
            s[rng.integers(H), rng.integers(W)] = rng.integers(1, 128)
        base = _tile_colour_oracle(s, zero_bg.modal, SECAM_TABLE)
        f = bass_features(s, zero_bg)
        k = len(base)
        assert len(f) == k + k * (k - 1) // 2
        assert f.active[:k].tolist() == base
        assert f.dimension == BASS_DIM


# ---------------------------------------------------------------- RAM
def test_ram_features():
    ram = np.zeros(128, dtype=np.uint8)
    assert len(ram_features(ram)) == 0
    ram[3] = 0b1000_0001
    f = ram_features(ram)
    assert f.active.tolist() == [24, 31, 1024 + int(pair_index(24, 31, 1024))]
    with pytest.raises(ValueError):
        ram_features(np.zeros(64, dtype=np.uint8))


@settings(max_examples=50, deadline=None)
@given(st.binary(min_size=128, max_size=128))
def test_ram_feature_count(raw):
    ram = np.frombuffer(raw, dtype=np.uint8)
    b = int(np.unpackbits(ram).sum())
    assert len(ram_features(ram)) == b + b * (b - 1) // 2


# ---------------------------------------------------------------- LSH
def test_lsh_active_count(lsh_model):
    assert lsh_model.dimension == 100_000
    for game in ("crossing", "dodger"):
        f = lsh_features(make_env(game).screen(), lsh_model)
        assert len(f) == 2000 and f.dimension == 100_000
        # one bucket per random vector
        assert np.array_equal(f.active // 50, np.arange(2000))


def test_lsh_deterministic(lsh_model):
    s = make_env("gatherer").screen()
    assert lsh_features(s, lsh_model) == lsh_features(s.copy(), lsh_model)
    assert LshModel.generate(3).same_as(lsh_model)


def test_lsh_locality(lsh_model):
    env = make_env("crossing")
    s = env.screen()
    near = s.copy()
    near[100:103, 50:53] ^= 1
    far = np.random.default_rng(0).integers(0, 128, size=s.shape).astype(np.uint8)
    base = set(lsh_features(s, lsh_model).active)
    assert len(base & set(lsh_features(near, lsh_model).active)) > 1900
    assert len(base & set(lsh_features(far, lsh_model).active)) < 200


def test_binarize_screen():
    s = np.zeros((H, W), dtype=np.uint8)
    s[0, 0] = 0b1000001
    bits = binarize_screen(s)
    assert bits.shape == (7 * H * W,)
    assert bits.sum() == 2


def _brute_codes(bits, model, literal):
    codes = []
    for i in range(model.n_vectors):
        v = model.vector(i)
        h = hash_entries(model.seed, i, np.arange(model.n_bits, dtype=np.uint64), model.n_bits, model.table_size)
        agree = (bits == v) if literal else (bits & v).astype(bool)
        codes.append(int(h[agree].sum()) % model.table_size)
    return codes


@pytest.mark.parametrize("literal", [False, True])
def test_lsh_codes_match_brute_force(literal):
    m = LshModel.generate(7, n_vectors=12, nonzeros=40, table_size=50, n_bits=300)
    bits = np.random.default_rng(1).integers(0, 2, size=300).astype(np.uint8)
    assert lsh_codes(bits, m, literal).tolist() == _brute_codes(bits, m, literal)


def test_lsh_model_roundtrip(tmp_path, lsh_model):
    p = lsh_model.save(tmp_path / "m.arcm")
    assert LshModel.load(p).same_as(lsh_model)


# ---------------------------------------------------------------- blobs and classes
def test_blobs(zero_bg):
    assert extract_blobs(_blank(), zero_bg) == []
    s = _blank()
    s[10:14, 10:14] = 7
    s[50:54, 80:90] = 7
    assert len(extract_blobs(s, zero_bg)) == 2
    d = _blank()
    d[20, 20] = 4
    d[21, 21] = 4
    blobs = extract_blobs(d, zero_bg)
    assert len(blobs) == 1 and blobs[0].mask.shape == (2, 2)


def test_blobs_split_by_colour(zero_bg):
    s = _blank()
    s[10, 10:12] = 4
    s[10, 12:14] = 5
    assert sorted(b.colour for b in extract_blobs(s, zero_bg)) == [4, 5]


def test_mask_overlap():
    a = np.ones((4, 4), dtype=bool)
    assert mask_overlap(a, a) == 1.0
    assert mask_overlap(a, np.ones((4, 2), dtype=bool)) == 0.5


def _moving_square_screens(n, present=None):
    present = present or [True] * n
    out = []
    for i in range(n):
        s = _blank()
        if present[i]:
            x = 5 + 3 * i
            s[100:106, x:x + 6] = 12
        out.append(s)
    return out


def test_single_translating_object_is_one_class(zero_bg):
    model = discover_classes(extract_blobs(s, zero_bg) for s in _moving_square_screens(20))
    assert len(model) == 1
    assert model.classes[0].mask.shape == (6, 6)
    assert model.classes[0].frequency == 1.0


def test_rare_object_filtered(zero_bg):
    present = [i == 0 for i in range(10)] + [False] * 0
    screens = _moving_square_screens(10, present)
    # a moving object that is always present, for contrast
    for i, s in enumerate(screens):
        s[20:24, 10 + 4 * i:14 + 4 * i] = 30
    model = discover_classes(extract_blobs(s, zero_bg) for s in screens)
    assert len(model) == 1 and model.classes[0].mask.shape == (4, 4)


def test_static_object_filtered(zero_bg):
    screens = [_blank() for _ in range(5)]
    for s in screens:
        s[50:55, 50:55] = 9
    assert len(discover_classes(extract_blobs(s, zero_bg) for s in screens)) == 0


def test_similar_shapes_merge(zero_bg):
    big = np.ones((10, 10), dtype=bool)
    notched = big.copy()
    notched[0, :5] = False  # overlap 0.95
    assert mask_overlap(big, notched) == pytest.approx(0.95)
    screens = []
    for i in range(10):
        s = _blank()
        m = big if i % 2 else notched
        s[60:70, 10 + 5 * i:20 + 5 * i][m] = 40
        screens.append(s)
    model = discover_classes(extract_blobs(s, zero_bg) for s in screens)
    assert len(model) == 1 and model.classes[0].frequency == 1.0


def test_class_cap(zero_bg):
    screens = []
    for i in range(5):
        s = _blank()
        for k in range(12):
            s[5 + 15 * k:5 + 15 * k + 1 + k % 3, 3 + 10 * i:3 + 10 * i + k + 1] = 60 + k
        screens.append(s)
    model = discover_classes((extract_blobs(s, zero_bg) for s in screens), DiscoveryConfig(max_classes=10))
    assert len(model) <= 10


def test_class_model_roundtrip(tmp_path, zero_bg):
    model = discover_classes(extract_blobs(s, zero_bg) for s in _moving_square_screens(10))
    back = ClassModel.load(model.save(tmp_path / "c.arcm"))
    assert len(back) == len(model)
    assert np.array_equal(back.classes[0].mask, model.classes[0].mask)
    assert back.config == model.config and back.n_samples == 10


# ---------------------------------------------------------------- tracking and DISCO vectors
def test_track_velocity_per_frame():
    prev = [Instance(0, 10.0, 20.0)]
    cur = track([Instance(0, 20.0, 20.0)], prev, max_velocity=4, frames_elapsed=5)
    assert (cur[0].vx, cur[0].vy) == (2.0, 0.0)
    # out of reach, or another class: no velocity
    assert track([Instance(0, 50.0, 20.0)], prev, 4, 5)[0].vx == 0.0
    assert track([Instance(1, 20.0, 20.0)], prev, 4, 5)[0].vx == 0.0


def test_disco_dimension():
    for c in range(0, 11):
        assert DiscoLayout(c).dimension == 1024 * (c + c * (c - 1) // 2)


def test_disco_empty():
    assert len(disco_features([], DiscoLayout(3))) == 0


def _tile_oracle(point, low, high, grid=8, tilings=8):
    """Direct per-tiling tile computation."""
    out = []
    for t in range(tilings):
        idx = 0
        for d in range(len(point)):
            w = (high[d] - low[d]) / grid
            p = min(max(point[d], low[d]), high[d])
            c = int(np.floor((p - low[d] + t * w / tilings) / w))
            idx = idx * grid + min(max(c, 0), grid - 1)
        out.append(t * grid ** len(point) + idx)
    return out


def test_tile_coder_matches_oracle():
    tc = TileCoder([0, 0], [160, 210])
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = rng.uniform(-20, 230, size=2)
        assert tc.tiles(p).tolist() == _tile_oracle(p, [0, 0], [160, 210])


def test_disco_static_and_moving_instance():
    layout = DiscoLayout(1)
    static = disco_features([Instance(0, 40.0, 90.0)], layout)
    assert static == disco_features([Instance(0, 40.0, 90.0)], layout)
    assert len(static) == 16
    moving = disco_features([Instance(0, 40.0, 90.0, vx=2.0)], layout)
    vel_static = _tile_oracle([0.0, 0.0], [-8, -8], [8, 8])
    vel_moving = _tile_oracle([2.0, 0.0], [-8, -8], [8, 8])
    assert vel_static != vel_moving
    assert moving.active[8:].tolist() == [512 + v for v in vel_moving]
    assert static.active[8:].tolist() == [512 + v for v in vel_static]


def test_disco_pair_block():
    layout = DiscoLayout(3)
    f = disco_features([Instance(0, 10.0, 10.0), Instance(2, 30.0, 50.0)], layout)
    pair_lo = layout.pair_offset(0, 2)
    pair = f.active[f.active >= pair_lo]
    rel = _tile_oracle([20.0, 40.0], [-160, -210], [160, 210])
    assert pair.tolist() == [pair_lo + r for r in rel] + [pair_lo + 512 + r for r in _tile_oracle([0, 0], [-16, -16], [16, 16])]


def test_disco_encoder_on_game(zero_bg):
    env = make_env("crossing")
    bg = BackgroundModel(env.background(), 1)
    blobs = []
    for t in range(300):
        env.act(2 if t % 3 else 0)
        blobs.append(extract_blobs(env.screen(), bg))
    model = discover_classes(blobs)
    enc = make_encoder("disco", background=bg, class_model=model)
    env.reset()
    f0 = enc(env.observe())
    assert f0.dimension == enc.dimension == DiscoLayout(len(model)).dimension
    assert len(f0) > 0


# ---------------------------------------------------------------- model files
def test_model_roundtrip_and_errors(tmp_path):
    bg = BackgroundModel(make_env("dodger").background(), 3)
    p = bg.save(tmp_path / "bg.arcm")
    back = BackgroundModel.load(p)
    assert np.array_equal(back.modal, bg.modal) and back.sample_count == 3
    raw = p.read_bytes()
    with pytest.raises(ModelFormatError):
        modelio.loads(raw, b"LSHM")
    with pytest.raises(ModelFormatError):
        modelio.loads(raw[:-3], b"BGND")
    with pytest.raises(ModelFormatError):
        modelio.loads(b"XXXX" + raw[4:], b"BGND")


def test_make_encoder_requires_models():
    with pytest.raises(ValueError):
        make_encoder("basic")
    with pytest.raises(ValueError):
        make_encoder("nope")
    enc = make_encoder("ram")
    assert enc(ChainWorld().observe()).dimension == RAM_DIM
