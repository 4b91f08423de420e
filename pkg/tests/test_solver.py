import numpy as np
import pytest

from qdsmds.kernel import KernelMatrix, build_quat_gek, build_real_gek, exact_observation_table
from qdsmds.netgeom import (NetworkLayout, build_structure_matrix,
                            enumerate_edges, true_edges)
from qdsmds.noise import NoiseParams, TrialRng
from qdsmds.quatlin import hamilton_product, quat_outer
from qdsmds.solver import (DegenerateGaugeError, DegenerateReferenceError,
                           RankDeficientError, SingularSystemError,
                           error_metric, fix_quaternion_gauge,
                           procrustes_align, qdsmds_estimate, recover_coords,
                           scenario1_pipeline, scenario2_pipeline,
                           smds_estimate)

EXACT = NoiseParams(0.0, 0.0, np.inf)


def small_layout() -> NetworkLayout:
    anchors = np.array([
        [0.0, 0.0, 0.0],
        [4.0, 0.0, 0.0],
        [0.0, 4.0, 0.0],
        [0.0, 0.0, 4.0],
    ])
    targets = np.array([[1.0, 2.0, 3.0], [3.0, 1.0, 0.5]])
    return NetworkLayout(anchors, targets)


# --- error metric ---------------------------------------------------------

def test_error_metric_zero_on_equal():
    x = np.arange(12.0).reshape(4, 3)
    assert error_metric(x, x) == 0.0


def test_error_metric_single_row_displacement():
    x = np.zeros((5, 3))
    y = x.copy()
    y[2] = [3.0, 4.0, 0.0]
    assert error_metric(y, x) == pytest.approx(5.0 / 5.0)


def test_error_metric_homogeneous():
    gen = np.random.default_rng(21)
    x = gen.normal(size=(7, 3))
    delta = gen.normal(size=(7, 3))
    base = error_metric(x + delta, x)
    assert error_metric(x + 2.5 * delta, x) == pytest.approx(2.5 * base, rel=1e-12)


def test_error_metric_shape_check():
    with pytest.raises(ValueError):
        error_metric(np.zeros((3, 3)), np.zeros((4, 3)))
    with pytest.raises(ValueError):
        error_metric(np.zeros((3, 2)), np.zeros((3, 2)))


# --- anchored recovery ------------------------------------------------------

def test_recover_coords_exact():
    layout = small_layout()
    edges = enumerate_edges(layout.n_anchors, layout.n_targets)
    structure = build_structure_matrix(edges)
    v_true, _ = true_edges(layout, edges)
    x_hat = recover_coords(v_true, structure, layout.anchors)
    assert np.allclose(x_hat, layout.targets, atol=1e-10)


def test_recover_coords_singular():
    anchors = small_layout().anchors
    # zero incidence rows leave the lone target column unconstrained
    c = np.zeros((3, 5))
    with pytest.raises(SingularSystemError):
        recover_coords(np.zeros((3, 3)), c, anchors)


# --- gauge fixes ------------------------------------------------------------

def test_fix_quaternion_gauge_undoes_right_rotation(room_layout, room_edges):
    _, nu_true = true_edges(room_layout, room_edges)
    gen = np.random.default_rng(22)
    q = gen.normal(size=4)
    q /= np.linalg.norm(q)
    rotated = hamilton_product(nu_true, q)
    aa = room_edges.aa_indices
    fixed = fix_quaternion_gauge(rotated, nu_true[aa], aa)
    assert np.allclose(fixed, nu_true, atol=1e-10)


def test_fix_quaternion_gauge_degenerate(room_layout, room_edges):
    _, nu_true = true_edges(room_layout, room_edges)
    aa = room_edges.aa_indices
    with pytest.raises(DegenerateGaugeError):
        fix_quaternion_gauge(np.zeros_like(nu_true), nu_true[aa], aa)


def test_procrustes_align_inverts_similarity():
    gen = np.random.default_rng(23)
    x = gen.normal(size=(9, 3))
    for flip in (1.0, -1.0):
        q, _ = np.linalg.qr(gen.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1.0
        rot = q * np.array([flip, 1.0, 1.0])  # flip < 0 gives a reflection
        moved = 1.7 * x @ rot + np.array([3.0, -2.0, 0.5])
        back = procrustes_align(moved, x[:5], np.arange(5))
        assert np.allclose(back, x, atol=1e-9)


def test_procrustes_align_degenerate_cases():
    gen = np.random.default_rng(24)
    x = gen.normal(size=(6, 3))
    with pytest.raises(DegenerateReferenceError):
        procrustes_align(x, x[:3], np.arange(3))
    flat = x.copy()
    flat[:, 2] = 0.0
    with pytest.raises(DegenerateReferenceError):
        procrustes_align(x, flat[:4], np.arange(4))
    with pytest.raises(DegenerateReferenceError):
        procrustes_align(np.zeros((6, 3)), x[:4], np.arange(4))


# --- estimators on exact kernels ---------------------------------------------

def test_smds_estimate_exact(room_layout, room_edges):
    v, _ = true_edges(room_layout, room_edges)
    table = exact_observation_table(v)
    kern = build_real_gek(table.distances, table.adoa)
    res = smds_estimate(kern, room_layout, room_edges)
    assert res.xi < 1e-10
    assert res.gauge_residual < 1e-8
    assert np.all(np.diff(res.spectrum) <= 1e-9)


def test_qdsmds_estimate_exact(room_layout, room_edges):
    v, _ = true_edges(room_layout, room_edges)
    kern = build_quat_gek(exact_observation_table(v))
    res = qdsmds_estimate(kern, room_layout, room_edges)
    assert res.xi < 1e-10
    assert res.gauge_residual < 1e-8
    assert res.k_residual < 1e-12
    assert res.spectrum[0] == pytest.approx((v ** 2).sum(), rel=1e-9)


def test_estimators_reject_wrong_kernel_kind(room_layout, room_edges):
    v, _ = true_edges(room_layout, room_edges)
    table = exact_observation_table(v)
    real = build_real_gek(table.distances, table.adoa)
    quat = build_quat_gek(table)
    with pytest.raises(ValueError):
        smds_estimate(quat, room_layout, room_edges)
    with pytest.raises(ValueError):
        qdsmds_estimate(real, room_layout, room_edges)


def test_smds_rank_deficient():
    layout = NetworkLayout(small_layout().anchors, np.array([[1.0, 1.0, 1.0]]))
    edges = enumerate_edges(4, 1)
    data = np.zeros((edges.size, edges.size))
    data[0, 0] = data[1, 1] = 1.0
    with pytest.raises(RankDeficientError):
        smds_estimate(KernelMatrix("real", data), layout, edges)


def test_qdsmds_rank_deficient():
    layout = NetworkLayout(small_layout().anchors, np.array([[1.0, 1.0, 1.0]]))
    edges = enumerate_edges(4, 1)
    data = np.zeros((edges.size, edges.size, 4))
    data[np.arange(edges.size), np.arange(edges.size), 0] = -1.0
    with pytest.raises(RankDeficientError):
        qdsmds_estimate(KernelMatrix("quaternion", data), layout, edges)


def test_quat_kernel_invariant_under_right_gauge(room_layout, room_edges):
    # K = nu nu^H is blind to nu -> nu q, and the estimator must undo any q
    _, nu_true = true_edges(room_layout, room_edges)
    gen = np.random.default_rng(25)
    q = gen.normal(size=4)
    q /= np.linalg.norm(q)
    rotated = hamilton_product(nu_true, q)
    k_plain = quat_outer(nu_true)
    k_rotated = quat_outer(rotated)
    assert np.allclose(k_plain, k_rotated, atol=1e-12 * np.abs(k_plain).max())
    res = qdsmds_estimate(KernelMatrix("quaternion", k_rotated),
                          room_layout, room_edges)
    assert res.xi < 1e-9


# --- scenario pipelines -------------------------------------------------------

def test_scenario_pipelines_exact(room_layout):
    for pipeline in (scenario1_pipeline, scenario2_pipeline):
        out = pipeline(room_layout, EXACT, TrialRng(99, ("noise", 0, 0, 0)))
        assert out.xi_smds < 1e-6
        assert out.xi_qdsmds < 1e-6


def test_scenario_pipelines_deterministic(room_layout):
    noise = NoiseParams.from_epsilon(0.5, 40.0)
    for pipeline in (scenario1_pipeline, scenario2_pipeline):
        a = pipeline(room_layout, noise, TrialRng(7, ("noise", 1, 2, 3)))
        b = pipeline(room_layout, noise, TrialRng(7, ("noise", 1, 2, 3)))
        assert a.xi_smds == b.xi_smds
        assert a.xi_qdsmds == b.xi_qdsmds
        c = pipeline(room_layout, noise, TrialRng(7, ("noise", 1, 2, 4)))
        assert c.xi_smds != a.xi_smds


def test_scenarios_share_common_measurements(room_layout):
    # same trial scope: both scenarios see identical distance/ADoA draws,
    # so the first-stage estimate agrees bitwise
    noise = NoiseParams.from_epsilon(1.0, 40.0)
    s1 = scenario1_pipeline(room_layout, noise, TrialRng(7, ("noise", 8, 9, 10)))
    s2 = scenario2_pipeline(room_layout, noise, TrialRng(7, ("noise", 8, 9, 10)))
    assert s1.xi_smds == s2.xi_smds
    assert s1.xi_qdsmds != s2.xi_qdsmds


def test_scenario_redraw_option_runs(room_layout):
    noise = NoiseParams.from_epsilon(0.5, 30.0)
    base = scenario2_pipeline(room_layout, noise, TrialRng(7, ("noise", 1, 1, 1)))
    redraw = scenario2_pipeline(room_layout, noise, TrialRng(7, ("noise", 1, 1, 1)),
                                distance_redraw_per_pair=True)
    assert np.isfinite(redraw.xi_smds) and np.isfinite(redraw.xi_qdsmds)
    assert redraw.xi_smds != base.xi_smds


def test_procrustes_option_runs(room_layout):
    noise = NoiseParams.from_epsilon(0.5, 40.0)
    out = scenario1_pipeline(room_layout, noise, TrialRng(7, ("noise", 2, 2, 2)),
                             procrustes=True)
    assert np.isfinite(out.xi_smds) and np.isfinite(out.xi_qdsmds)
