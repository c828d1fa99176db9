import math

import numpy as np
import pytest

import mireg


@pytest.fixture(scope="module")
def pair():
    truth = (2.0, -1.0, 0.0, 0.0, 0.0, math.radians(6.0))
    return mireg.synth_pair(truth, seed=4, n_points=20000)


def test_pose_round_trip():
    pose = (1.0, 2.0, 3.0, 0.1, -0.2, 0.3)
    m = mireg.pose_to_matrix(pose)
    assert m.shape == (4, 4)
    assert np.allclose(mireg.matrix_to_pose(m), pose, atol=1e-12)
    quarter = mireg.pose_to_matrix((0, 0, 0, 0, 0, math.pi / 2))
    assert np.allclose(quarter[:3, :3] @ [1, 0, 0], [0, 1, 0], atol=1e-12)


def test_synth_scene_deterministic():
    a = mireg.synth_scene(seed=3, n_points=1000)
    b = mireg.synth_scene(seed=3, n_points=1000)
    assert a.shape == (1000, 3)
    assert np.array_equal(a, b)


def test_self_mi_equals_entropy():
    scan = mireg.synth_scene(seed=2, n_points=10000)
    r = mireg.mutual_information(scan, scan)
    assert r["mi"] == pytest.approx(r["h_x"], rel=1e-12)


def test_align_recovers_truth(pair):
    scan_a, scan_b, truth = pair
    report = mireg.align(scan_a, scan_b)
    assert report.converged
    assert np.linalg.norm(report.matrix[:3, 3] - truth[:3, 3]) < 0.5
    assert report.final_mi >= report.initial_mi


def test_sweep_peak(pair):
    scan_a, scan_b, truth = pair
    base = mireg.matrix_to_pose(truth)
    values, mi = mireg.sweep(scan_a, scan_b, "tx", base[0] - 3, base[0] + 3, 25, base=base)
    assert len(values) == 25
    assert abs(values[int(np.argmax(mi))] - base[0]) <= 0.25 + 1e-9


def test_errors(tmp_path):
    scan = mireg.synth_scene(seed=1, n_points=2000)
    with pytest.raises(mireg.NoOverlap):
        mireg.align(scan, scan + [5000.0, 0.0, 0.0])
    with pytest.raises(mireg.IoError):
        mireg.load_cloud(tmp_path / "missing.xyz")
    with pytest.raises(ValueError):
        mireg.AlignmentConfig(bins=1)


def test_cloud_io(tmp_path):
    pts = np.float32(np.random.default_rng(0).normal(size=(50, 3))).astype(np.float64)
    for name in ("c.xyz", "c.ply", "c.bin"):
        mireg.save_cloud(tmp_path / name, pts)
        assert np.array_equal(mireg.load_cloud(tmp_path / name), pts)
