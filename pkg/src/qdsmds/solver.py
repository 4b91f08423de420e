"""Coordinate estimators and end-to-end measurement scenarios.

Both estimators factor a Gram edge kernel into edge vectors, fix the
factorization's gauge freedom against the known anchor-anchor edges, and
then solve an anchored linear system for the target coordinates.

The real-kernel estimator keeps the top three eigenpairs (the noiseless
kernel has rank three) and fixes an orthogonal gauge by Procrustes on
the anchor-anchor rows.  The quaternion estimator keeps the single
dominant eigenpair (the noiseless quaternion kernel has rank one); its
gauge freedom is one right unit quaternion, fixed in closed form.

Scenario 1 measures distances and 3D ADoAs only; the plane quantities
the quaternion kernel needs are derived from a first-pass real-kernel
estimate.  Scenario 2 additionally measures each edge's elevation and
azimuth (fresh noisy draws per pair), so the quaternion kernel is built
from measurements alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .kernel import (KernelMatrix, ObservationTable, build_quat_gek,
                     build_real_gek, derive_plane_quantities_from_angles,
                     edge_frame)
from .netgeom import (EdgeSet, NetworkLayout, StructureMatrix,
                      build_structure_matrix, enumerate_edges, true_edges)
from .noise import NoiseParams, TrialRng, sample_gamma_distance, sample_tikhonov_angle
from .quatlin import (TOL, hamilton_product, hermitian_eig,
                      quat_conj, quat_hermitian_eigensystem)


class RankDeficientError(RuntimeError):
    """Kernel spectrum cannot support the required factorization rank."""


class DegenerateGaugeError(RuntimeError):
    """Gauge alignment against the anchor edges is numerically undefined."""


class SingularSystemError(RuntimeError):
    """The anchored coordinate system is rank deficient."""


class DegenerateReferenceError(ValueError):
    """Alignment reference points do not determine a similarity transform."""


@dataclass(frozen=True)
class EstimateResult:
    """One estimator's output for one trial."""

    x_hat: np.ndarray          # (n_targets, 3) estimated target coordinates
    v_hat: np.ndarray          # (m, 3) gauge-fixed edge vector estimates
    xi: float                  # Frobenius error / n_targets
    spectrum: np.ndarray       # kernel eigenvalue magnitudes, descending
    gauge_residual: float      # anchor-anchor edge mismatch after gauge fix
    k_residual: Optional[float] = None  # k-component energy fraction (quaternion only)


def error_metric(x_hat, x_true) -> float:
    """Frobenius norm of the coordinate error divided by the row count."""
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    if x_hat.shape != x_true.shape or x_hat.ndim != 2 or x_hat.shape[1] != 3:
        raise ValueError(f"shape mismatch {x_hat.shape} vs {x_true.shape}")
    return float(np.linalg.norm(x_hat - x_true) / x_hat.shape[0])


def _recover_all(v_hat, c, anchors):
    # anchored stack: identity rows pin anchors, incidence rows fit edges
    n_anchors = len(anchors)
    n = c.shape[1]
    top = np.zeros((n_anchors, n))
    top[:, :n_anchors] = np.eye(n_anchors)
    system = np.vstack([top, c])
    rhs = np.vstack([anchors, v_hat])
    sol, _, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
    if rank < n:
        raise SingularSystemError(f"anchored system has rank {rank} < {n}")
    return sol


def recover_coords(v_hat, structure, anchors) -> np.ndarray:
    """Target coordinates from estimated edge vectors and known anchors.

    Solves the least-squares stack of anchor constraints and edge
    equations; returns only the target rows.
    """
    c = structure.matrix if isinstance(structure, StructureMatrix) else np.asarray(structure, dtype=float)
    anchors = np.asarray(anchors, dtype=float)
    return _recover_all(np.asarray(v_hat, dtype=float), c, anchors)[len(anchors):]


def procrustes_align(x_hat, x_ref, ref_indices) -> np.ndarray:
    """Similarity alignment (rotation, scale, translation) onto reference points.

    Fits the transform on x_hat[ref_indices] -> x_ref and applies it to
    every row.  Needs at least 4 non-coplanar reference points.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    x_ref = np.asarray(x_ref, dtype=float)
    idx = np.asarray(ref_indices, dtype=int)
    if len(idx) < 4 or x_ref.shape != (len(idx), 3):
        raise DegenerateReferenceError("need at least 4 reference points")
    a = x_hat[idx]
    mu_a = a.mean(axis=0)
    mu_b = x_ref.mean(axis=0)
    a0 = a - mu_a
    b0 = x_ref - mu_b
    if np.linalg.matrix_rank(b0) < 3:
        raise DegenerateReferenceError("reference points are coplanar")
    denom = (a0 ** 2).sum()
    if denom <= 0.0:
        raise DegenerateReferenceError("source points are coincident")
    u, s, wt = np.linalg.svd(a0.T @ b0)
    rot = u @ wt
    scale = s.sum() / denom
    shift = mu_b - scale * mu_a @ rot
    return scale * x_hat @ rot + shift


def _finish(v_hat, layout, structure, procrustes):
    if procrustes:
        full = _recover_all(v_hat, structure.matrix, layout.anchors)
        aligned = procrustes_align(full, layout.anchors, np.arange(layout.n_anchors))
        x_hat = aligned[layout.n_anchors:]
    else:
        x_hat = recover_coords(v_hat, structure, layout.anchors)
    return x_hat, error_metric(x_hat, layout.targets)


def smds_estimate(kern: KernelMatrix, layout: NetworkLayout, edges: EdgeSet,
                  structure: Optional[StructureMatrix] = None,
                  procrustes: bool = False) -> EstimateResult:
    """Estimate target coordinates from a real Gram edge kernel.

    Keeps the top three eigenpairs (negative eigenvalues clamped to
    zero), fixes the orthogonal gauge by Procrustes on the anchor-anchor
    rows, and solves the anchored system.
    """
    if kern.kind != "real":
        raise ValueError("smds_estimate needs a real kernel")
    if structure is None:
        structure = build_structure_matrix(edges)
    eig = hermitian_eig(kern.data)
    evals = eig.eigenvalues
    if evals.size < 3 or evals[2] <= 0.0:
        raise RankDeficientError("real kernel has fewer than 3 positive eigenvalues")
    v_raw = eig.eigenvectors[:, :3] * np.sqrt(evals[:3])
    v_true, _ = true_edges(layout, edges)
    aa = edges.aa_indices
    u, _, wt = np.linalg.svd(v_raw[aa].T @ v_true[aa])
    v_hat = v_raw @ (u @ wt)
    gauge_residual = float(np.linalg.norm(v_hat[aa] - v_true[aa]))
    x_hat, xi = _finish(v_hat, layout, structure, procrustes)
    spectrum = np.sort(np.abs(evals))[::-1]
    return EstimateResult(x_hat, v_hat, xi, spectrum, gauge_residual)


def fix_quaternion_gauge(nu_hat, true_aa, aa_indices) -> np.ndarray:
    """Right-multiply nu_hat by the unit quaternion best matching the anchor edges.

    The dominant eigenvector is defined up to nu -> nu * q; the closed-form
    maximizer of the anchor-edge alignment is q = s / |s| with
    s = sum over anchor-anchor edges of conj(nu_hat_m) * nu_true_m.
    """
    nu_hat = np.asarray(nu_hat, dtype=float)
    true_aa = np.asarray(true_aa, dtype=float)
    aa_indices = np.asarray(aa_indices, dtype=int)
    s = hamilton_product(quat_conj(nu_hat[aa_indices]), true_aa).sum(axis=0)
    norm = float(np.linalg.norm(s))
    if norm < TOL.gauge_floor:
        raise DegenerateGaugeError("anchor-edge alignment has vanishing norm")
    return hamilton_product(nu_hat, s / norm)


def qdsmds_estimate(kern: KernelMatrix, layout: NetworkLayout, edges: EdgeSet,
                    structure: Optional[StructureMatrix] = None,
                    procrustes: bool = False) -> EstimateResult:
    """Estimate target coordinates from a quaternion Gram edge kernel.

    Keeps the dominant eigenpair, scales it to edge-vector length, fixes
    the right unit-quaternion gauge on the anchor-anchor edges, and
    solves the anchored system with the i, j components (w carries x,
    the k component is a noise diagnostic).
    """
    if kern.kind != "quaternion":
        raise ValueError("qdsmds_estimate needs a quaternion kernel")
    if structure is None:
        structure = build_structure_matrix(edges)
    values, vectors = quat_hermitian_eigensystem(kern.as_quat_matrix())
    mags = np.abs(values)
    top = int(np.argmax(mags))
    if values[top] <= 0.0:
        raise RankDeficientError("quaternion kernel has no positive dominant eigenvalue")
    nu_raw = np.sqrt(values[top]) * vectors[top]
    v_true, nu_true = true_edges(layout, edges)
    aa = edges.aa_indices
    nu_hat = fix_quaternion_gauge(nu_raw, nu_true[aa], aa)
    gauge_residual = float(np.linalg.norm(nu_hat[aa] - nu_true[aa]))
    total = float((nu_hat ** 2).sum())
    k_residual = float((nu_hat[:, 3] ** 2).sum() / total) if total > 0 else 0.0
    v_hat = nu_hat[:, :3].copy()
    x_hat, xi = _finish(v_hat, layout, structure, procrustes)
    spectrum = np.sort(mags)[::-1]
    return EstimateResult(x_hat, v_hat, xi, spectrum, gauge_residual, k_residual)


@dataclass(frozen=True)
class ScenarioOutcome:
    """Paired estimator results for one simulated trial."""

    smds: EstimateResult
    qdsmds: EstimateResult

    @property
    def xi_smds(self) -> float:
        return self.smds.xi

    @property
    def xi_qdsmds(self) -> float:
        return self.qdsmds.xi


def _measure_common(v_true, d_true, noise: NoiseParams, rng: TrialRng,
                    iu, ju, redraw: bool):
    d_meas = sample_gamma_distance(d_true, noise.sigma_d, rng.generator("distance"))
    cos_a = (v_true[iu] * v_true[ju]).sum(axis=1) / (d_true[iu] * d_true[ju])
    alpha_true = np.arccos(np.clip(cos_a, -1.0, 1.0))
    alpha_meas = sample_tikhonov_angle(alpha_true, noise.rho, rng.generator("adoa"))
    offdiag_m = offdiag_p = None
    if redraw:
        gen = rng.generator("distance-pair")
        offdiag_m = sample_gamma_distance(d_true[iu], noise.sigma_d, gen)
        offdiag_p = sample_gamma_distance(d_true[ju], noise.sigma_d, gen)
    return d_meas, alpha_meas, offdiag_m, offdiag_p


def scenario1_pipeline(layout: NetworkLayout, noise: NoiseParams, rng: TrialRng,
                       distance_redraw_per_pair: bool = False,
                       procrustes: bool = False,
                       edges: Optional[EdgeSet] = None) -> ScenarioOutcome:
    """One trial measuring distances and 3D ADoAs only.

    The real-kernel estimate runs first; its edge vectors supply the
    plane direction cosines and plane ADoAs the quaternion kernel needs,
    with the measured lengths scaling the plane distances.
    """
    if edges is None:
        edges = enumerate_edges(layout.n_anchors, layout.n_targets)
    structure = build_structure_matrix(edges)
    v_true, _ = true_edges(layout, edges)
    frame = edge_frame(v_true)
    iu, ju = np.triu_indices(edges.size, 1)
    d_meas, alpha_meas, off_m, off_p = _measure_common(
        v_true, frame.d, noise, rng, iu, ju, distance_redraw_per_pair)

    k_real = build_real_gek(d_meas, alpha_meas, off_m, off_p)
    smds = smds_estimate(k_real, layout, edges, structure, procrustes)

    # plane quantities estimated from the first-pass coordinates: the
    # estimate supplies each edge's direction (plane cosines and angles),
    # the measured length scales it back to a plane distance
    x_full = np.vstack([layout.anchors, smds.x_hat])
    v_first = structure.matrix @ x_full
    frame_first = edge_frame(v_first)
    plane_cos = frame_first.planes / frame_first.d[:, None]
    d_m = d_meas[iu] if off_m is None else off_m
    d_p = d_meas[ju] if off_p is None else off_p
    table = ObservationTable(
        distances=d_meas,
        adoa=alpha_meas,
        planes_m=d_m[:, None] * plane_cos[iu],
        planes_p=d_p[:, None] * plane_cos[ju],
        plane_adoa=frame_first.angles[ju] - frame_first.angles[iu],
        offdiag_m=off_m,
        offdiag_p=off_p,
    )
    qd = qdsmds_estimate(build_quat_gek(table), layout, edges, structure, procrustes)
    return ScenarioOutcome(smds, qd)


def scenario2_pipeline(layout: NetworkLayout, noise: NoiseParams, rng: TrialRng,
                       distance_redraw_per_pair: bool = False,
                       procrustes: bool = False,
                       edges: Optional[EdgeSet] = None) -> ScenarioOutcome:
    """One trial that also measures per-edge elevation and azimuth.

    Each pair gets fresh Tikhonov draws of both edges' elevation and
    azimuth; plane distances and plane ADoAs derive from those draws, so
    the quaternion kernel uses measurements end to end.
    """
    if edges is None:
        edges = enumerate_edges(layout.n_anchors, layout.n_targets)
    structure = build_structure_matrix(edges)
    v_true, _ = true_edges(layout, edges)
    frame = edge_frame(v_true)
    iu, ju = np.triu_indices(edges.size, 1)
    d_meas, alpha_meas, off_m, off_p = _measure_common(
        v_true, frame.d, noise, rng, iu, ju, distance_redraw_per_pair)

    k_real = build_real_gek(d_meas, alpha_meas, off_m, off_p)
    smds = smds_estimate(k_real, layout, edges, structure, procrustes)

    gen = rng.generator("plane")
    theta_m = sample_tikhonov_angle(frame.theta[iu], noise.rho, gen)
    phi_m = sample_tikhonov_angle(frame.phi[iu], noise.rho, gen)
    theta_p = sample_tikhonov_angle(frame.theta[ju], noise.rho, gen)
    phi_p = sample_tikhonov_angle(frame.phi[ju], noise.rho, gen)
    d_m = d_meas[iu] if off_m is None else off_m
    d_p = d_meas[ju] if off_p is None else off_p
    q_m = derive_plane_quantities_from_angles(d_m, theta_m, phi_m)
    q_p = derive_plane_quantities_from_angles(d_p, theta_p, phi_p)
    table = ObservationTable(
        distances=d_meas,
        adoa=alpha_meas,
        planes_m=np.stack([q_m.d_xy, q_m.d_xz, q_m.d_yz], axis=1),
        planes_p=np.stack([q_p.d_xy, q_p.d_xz, q_p.d_yz], axis=1),
        plane_adoa=np.stack([q_p.ang_xy - q_m.ang_xy,
                             q_p.ang_xz - q_m.ang_xz,
                             q_p.ang_yz - q_m.ang_yz], axis=1),
        offdiag_m=off_m,
        offdiag_p=off_p,
    )
    qd = qdsmds_estimate(build_quat_gek(table), layout, edges, structure, procrustes)
    return ScenarioOutcome(smds, qd)
