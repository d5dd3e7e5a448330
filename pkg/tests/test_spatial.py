import numpy as np
import pytest

from geosat.spatial import (D_FALLBACK, KdTreeIndex, LinearScanIndex,
                            brute_force_k_nearest, build_index)

ALL_BACKENDS = ("kd", "linear")


def test_single_point_every_query_returns_it():
    pts = np.array([[0.3, 0.7]])
    for policy in ALL_BACKENDS:
        idx = build_index(pts, [5], policy)
        assert idx.k_nearest(np.array([0.9, 0.1]), 1) == [5]


def test_line_example_float64_semantics():
    # 1-0.9 < 0.1 in binary floating point, so label 4 is strictly nearer
    pts = np.array([[0.1], [0.45], [0.5], [0.9]])
    labels = [1, 2, 3, 4]
    oracle = brute_force_k_nearest(pts, labels, np.array([0.0]), 2)
    assert oracle == [4, 1]
    for policy in ALL_BACKENDS:
        idx = build_index(pts, labels, policy)
        assert idx.k_nearest(np.array([0.0]), 2) == oracle
        assert idx.k_nearest(np.array([0.6]), 1) == [3]


def test_exact_tie_broken_by_label():
    # 0.25 and 0.75 are both exactly 0.25 from 0.0 on the circle
    pts = np.array([[0.75], [0.25]])
    labels = [2, 1]
    assert brute_force_k_nearest(pts, labels, np.array([0.0]), 1) == [1]
    for policy in ALL_BACKENDS:
        assert build_index(pts, labels, policy).k_nearest(np.array([0.0]), 1) == [1]


def test_brute_force_wrap_example():
    pts = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]])
    got = brute_force_k_nearest(pts, [1, 2, 3], np.array([0.9, 0.9]), 2)
    assert got == [1, 2]  # labels 2 and 3 tie; smaller label wins


def test_k_equals_point_count_returns_all_sorted():
    rng = np.random.default_rng(0)
    pts = rng.random((20, 3))
    labels = (rng.permutation(20) + 1).tolist()
    full = brute_force_k_nearest(pts, labels, rng.random(3), 20)
    assert sorted(full) == sorted(labels)


def test_backend_equivalence_random():
    rng = np.random.default_rng(1)
    for d in (1, 2, 3, 10, 100):
        pts = rng.random((300, d))
        labels = rng.permutation(300) + 1
        kd = KdTreeIndex(pts, labels)
        lin = LinearScanIndex(pts, labels)
        for _ in range(25):
            q = rng.random(d)
            for k in (1, 3, 7):
                expect = brute_force_k_nearest(pts, labels, q, k)
                assert kd.k_nearest(q, k) == expect
                assert lin.k_nearest(q, k) == expect


def test_translation_invariance_mod_one():
    rng = np.random.default_rng(2)
    pts = rng.random((200, 2))
    labels = np.arange(1, 201)
    q = rng.random(2)
    base = build_index(pts, labels, "kd").k_nearest(q, 5)
    for _ in range(10):
        shift = rng.random(2)
        moved = (pts + shift) % 1.0
        mq = (q + shift) % 1.0
        assert build_index(moved, labels, "kd").k_nearest(mq, 5) == base


def test_auto_policy_dimension_split():
    rng = np.random.default_rng(3)
    labels = range(1, 11)
    assert build_index(rng.random((10, D_FALLBACK - 1)), labels).backend == "kd-tree"
    assert build_index(rng.random((10, D_FALLBACK)), labels).backend == "linear-scan"
    assert build_index(rng.random((10, 1000)), labels).backend == "linear-scan"


def test_construction_errors():
    with pytest.raises(ValueError):
        build_index(np.zeros((0, 2)), [])
    with pytest.raises(ValueError):
        build_index(np.array([[0.5], [0.5]]), [1, 1])  # duplicate labels
    with pytest.raises(ValueError):
        build_index(np.array([[1.5]]), [1])  # out of range


def test_query_errors():
    idx = build_index(np.array([[0.1, 0.1], [0.2, 0.2]]), [1, 2])
    with pytest.raises(ValueError):
        idx.k_nearest(np.array([0.1]), 1)  # dimension mismatch
    with pytest.raises(ValueError):
        idx.k_nearest(np.array([0.1, 0.1]), 3)  # k above point count
    with pytest.raises(ValueError):
        idx.k_nearest(np.array([0.1, 0.1]), 0)


def test_hundred_thousand_point_build_matches_oracle_sampled():
    rng = np.random.default_rng(4)
    pts = rng.random((100_000, 3))
    labels = np.arange(1, 100_001)
    kd = KdTreeIndex(pts, labels)
    for _ in range(100):
        q = rng.random(3)
        assert kd.k_nearest(q, 3) == brute_force_k_nearest(pts, labels, q, 3)
