import numpy as np
import pytest

import sithss


def halves(h, w):
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[:, w // 2 :] = 255
    gt = np.zeros((h, w), dtype=np.int32)
    gt[:, w // 2 :] = 1
    return img, gt


def test_rgb_to_lab_red():
    lab = sithss.rgb_to_lab(np.array([[[255, 0, 0]]], dtype=np.uint8))
    assert lab.shape == (1, 1, 3)
    assert lab[0, 0] == pytest.approx([53.24, 80.09, 67.20], abs=0.05)


def test_segment_recovers_halves():
    img, gt = halves(32, 32)
    out = sithss.segment(img, 2, levels=[2, 5, 40])
    labels = out["labels"]
    assert labels.shape == (32, 32)
    np.testing.assert_array_equal(labels, gt)
    assert sithss.asa(labels, gt) == 1.0
    assert sithss.undersegmentation_error(labels, gt) == 0.0
    assert sithss.boundary_recall(labels, gt, 2) == 1.0
    assert sithss.explained_variation(labels, img) == 1.0
    assert sorted(out["levels"]) == [2, 5, 40]
    assert len(np.unique(out["levels"][40])) == 40
    assert out["live_history"][-1] == 2


def test_exact_k_on_noise():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(20, 24, 3), dtype=np.uint8)
    for k in (1, 7, 60):
        labels = sithss.segment(img, k, threads=1)["labels"]
        assert len(np.unique(labels)) == k
    with pytest.raises(ValueError):
        sithss.segment(img, 0)


def test_radius_selection():
    flat = np.full((16, 16, 3), 77, dtype=np.uint8)
    assert sithss.select_radius(flat)["radius"] == 1
    rng = np.random.default_rng(1)
    noise = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    sel = sithss.select_radius(noise, tau=0.0)
    assert sel["radius"] == 5 and not sel["plateau_found"]


def test_graph_entropies():
    edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 0.01)]
    h1 = sithss.one_dim_se(6, edges)
    assert sithss.two_dim_se(6, edges, [0] * 6) == pytest.approx(h1)
    best, assignment = sithss.min_two_dim_se(6, edges, 2)
    assert assignment == [0, 0, 0, 1, 1, 1]
    assert best == pytest.approx(sithss.two_dim_se(6, edges, assignment))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        sithss.asa(np.zeros((3, 3), np.int32), np.zeros((3, 4), np.int32))
