"""Smoke tests for the python module: a miniature train/predict round trip."""

import numpy as np
import pytest

try:
    import simglyph as sg
except ImportError:
    import _simglyph as sg


def test_normalize_centers_and_scales():
    raw = np.zeros((40, 100), dtype=np.uint8)  # rows are y, columns x
    raw[10:30, 10:90] = 1  # an 80x20 foreground box
    out = sg.normalize(raw)
    assert out.shape == (64, 64)
    ys, xs = np.nonzero(out)
    assert xs.min() == 0 and xs.max() == 63
    assert ys.min() == 24 and ys.max() == 39


def test_normalize_rejects_empty():
    with pytest.raises(sg.SimglyphError):
        sg.normalize(np.zeros((8, 8), dtype=np.uint8))


def test_sobel_step_edge():
    img = np.zeros((16, 16), dtype=np.uint8)
    img[:, 8:] = 1
    gx, gy, mag = sg.sobel(img)
    assert abs(gx[8, 7]) == 4.0
    assert gy[8, 7] == 0.0
    assert mag[8, 7] == 4.0


def test_seed_extraction_on_a_square():
    img = np.zeros((12, 12), dtype=np.uint8)
    img[4:8, 4:8] = 1
    seeds = sg.extract_seeds(img)
    assert seeds.shape == (6, 2)  # 12-pixel contour, every second kept


def test_pair_training_round_trip():
    spec = sg.PairSpec.random_spec(7)
    spec.samples_per_class = 14
    pos, neg, truth = sg.generate_pair(spec)
    assert len(pos) == 14 and len(neg) == 14 and len(truth) == 14

    desc = np.vstack([sg.descriptors(img) for img in pos[:10] + neg[:10]])
    assert desc.shape[1] == 32
    cb = sg.build_codebook(desc, k=24, min_cluster_size=2, seed=7)
    assert 1 <= len(cb) <= 24

    grid = sg.WindowGrid.default_grid()
    assert grid.windows().shape == (541, 4)

    feats_pos = [sg.sample_features(img, cb, grid) for img in pos[:10]]
    feats_neg = [sg.sample_features(img, cb, grid) for img in neg[:10]]
    model, trace = sg.train(feats_pos, feats_neg, cb, grid, max_outer=8, max_inner=150)

    obj = trace["obj"]
    assert all(b <= a + 1e-9 for a, b in zip(obj, obj[1:]))
    assert all(v >= 0.0 for v in obj)

    correct = 0
    for img in pos[10:]:
        label, window, score = sg.predict(model, sg.sample_features(img, cb, grid))
        correct += label == 1
    for img in neg[10:]:
        label, window, score = sg.predict(model, sg.sample_features(img, cb, grid))
        correct += label == -1
    assert correct >= 6  # 8 held-out samples

    text = model.to_text()
    assert sg.SvmModel.from_text(text).to_text() == text


def test_gate_and_mining():
    t0, t1, t2 = sg.train_gate([(2.0, 0.0, 1), (0.0, 2.0, 0)] * 20, rate=0.5, iters=200)
    assert sg.gate_confidence(t0, t1, t2, 2.0, 0.0) > 0.5
    assert sg.gate_confidence(t0, t1, t2, 0.0, 2.0) < 0.5

    pairs = sg.mine_pairs([(1, 2), (2, 1), (1, 2), (3, 4)], 2)
    assert pairs == [(1, 2, 3)]
