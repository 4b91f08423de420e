"""Edge observations and Gram edge kernel assembly.

For an edge vector v = (v1, v2, v3) the measurable quantities are its
length d, its elevation theta = arcsin(v3/d) and azimuth phi =
atan2(v2, v1), the lengths of its projections onto the xy, xz, yz
coordinate planes, and in-plane direction angles

    ang_xy = atan2(v2, v1),  ang_xz = atan2(v3, v1),  ang_yz = atan2(v3, v2).

Angle differences of arrival (ADoA) between two edges m, p are the 3D
angle alpha_mp between the vectors and, per plane, the signed difference
ang_p - ang_m.

The quaternion Gram edge kernel has rank one: K = nu nu^H for the
quaternion edge vector nu.  Entry (m, p) with m < p is

    w =  d_m d_p cos(alpha_mp)
    x = -dxy_m dxy_p sin(adoa_xy)
    y = -dxz_m dxz_p sin(adoa_xz)
    z = -dyz_m dyz_p sin(adoa_yz)

with d_m^2 on the diagonal and the conjugate below it.  The real kernel
keeps only the w part and has rank three.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .quatlin import Quaternion, QuatMatrix


class ZeroEdgeError(ValueError):
    """Edge length is zero or negative where a positive length is required."""


class MissingFieldError(ValueError):
    """An observation lacks a field the kernel entry needs."""


class EdgeProjection(NamedTuple):
    d: float
    d_xy: float
    d_xz: float
    d_yz: float
    theta: float  # elevation, in [-pi/2, pi/2]
    phi: float    # azimuth, in (-pi, pi]


class PlaneQuantities(NamedTuple):
    d_xy: np.ndarray
    d_xz: np.ndarray
    d_yz: np.ndarray
    ang_xy: np.ndarray
    ang_xz: np.ndarray
    ang_yz: np.ndarray


class EdgeFrame(NamedTuple):
    """Vectorized projection data for rows of edge vectors."""

    d: np.ndarray        # (m,)
    planes: np.ndarray   # (m, 3) projection lengths onto xy, xz, yz
    angles: np.ndarray   # (m, 3) in-plane angles for xy, xz, yz
    theta: np.ndarray    # (m,) elevations
    phi: np.ndarray      # (m,) azimuths


def edge_frame(v) -> EdgeFrame:
    """Projection lengths and angles for an (m, 3) array of edge vectors.

    Angles of zero-length projections follow the atan2(0, 0) = 0
    convention; the matching products vanish through the zero length.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError(f"expected (m, 3) edge vectors, got shape {v.shape}")
    d = np.linalg.norm(v, axis=1)
    if np.any(d <= 0.0):
        raise ZeroEdgeError("edge vectors must be nonzero")
    planes = np.stack([
        np.hypot(v[:, 0], v[:, 1]),
        np.hypot(v[:, 0], v[:, 2]),
        np.hypot(v[:, 1], v[:, 2]),
    ], axis=1)
    angles = np.stack([
        np.arctan2(v[:, 1], v[:, 0]),
        np.arctan2(v[:, 2], v[:, 0]),
        np.arctan2(v[:, 2], v[:, 1]),
    ], axis=1)
    theta = np.arcsin(np.clip(v[:, 2] / d, -1.0, 1.0))
    phi = angles[:, 0]
    return EdgeFrame(d, planes, angles, theta, phi)


def project_edge(v) -> EdgeProjection:
    """Length, plane projection lengths, elevation, and azimuth of one edge."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    frame = edge_frame(v[None, :])
    return EdgeProjection(
        float(frame.d[0]),
        float(frame.planes[0, 0]), float(frame.planes[0, 1]), float(frame.planes[0, 2]),
        float(frame.theta[0]), float(frame.phi[0]),
    )


def derive_plane_quantities_from_angles(d, theta, phi) -> PlaneQuantities:
    """Plane projection lengths and in-plane angles from (d, theta, phi).

    Reconstructs the edge vector d*(cos t cos p, cos t sin p, sin t) and
    projects it, which stays consistent when noisy elevations leave
    [-pi/2, pi/2].  Broadcasts over array inputs.
    """
    d = np.asarray(d, dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(d <= 0.0):
        raise ZeroEdgeError("edge lengths must be positive")
    ct = np.cos(theta)
    v1 = d * ct * np.cos(phi)
    v2 = d * ct * np.sin(phi)
    v3 = d * np.sin(theta)
    return PlaneQuantities(
        np.hypot(v1, v2), np.hypot(v1, v3), np.hypot(v2, v3),
        np.arctan2(v2, v1), np.arctan2(v3, v1), np.arctan2(v3, v2),
    )


@dataclass(frozen=True)
class EdgeObservation:
    """Observed quantities for one edge within an ordered pair (m, p).

    ADoA fields follow the row-edge convention: on the first edge of the
    pair they hold partner-minus-self angle differences.  None marks an
    absent field; provenance maps field names to "measured" or
    "estimated" for bookkeeping only.
    """

    d: float
    adoa: Optional[float] = None
    d_xy: Optional[float] = None
    d_xz: Optional[float] = None
    d_yz: Optional[float] = None
    adoa_xy: Optional[float] = None
    adoa_xz: Optional[float] = None
    adoa_yz: Optional[float] = None
    provenance: Optional[dict] = None


def pair_products(obs_m: EdgeObservation, obs_p: EdgeObservation) -> Quaternion:
    """Kernel entry (m, p) from two edge observations.

    Distances and plane lengths come from each edge's own observation;
    the ADoA fields are read from obs_m (row-edge convention).
    """
    needed = {
        "d (row)": obs_m.d, "d (col)": obs_p.d, "adoa": obs_m.adoa,
        "d_xy (row)": obs_m.d_xy, "d_xy (col)": obs_p.d_xy,
        "d_xz (row)": obs_m.d_xz, "d_xz (col)": obs_p.d_xz,
        "d_yz (row)": obs_m.d_yz, "d_yz (col)": obs_p.d_yz,
        "adoa_xy": obs_m.adoa_xy, "adoa_xz": obs_m.adoa_xz, "adoa_yz": obs_m.adoa_yz,
    }
    missing = [name for name, value in needed.items() if value is None]
    if missing:
        raise MissingFieldError(f"observation pair lacks: {', '.join(missing)}")
    return Quaternion(
        obs_m.d * obs_p.d * np.cos(obs_m.adoa),
        -obs_m.d_xy * obs_p.d_xy * np.sin(obs_m.adoa_xy),
        -obs_m.d_xz * obs_p.d_xz * np.sin(obs_m.adoa_xz),
        -obs_m.d_yz * obs_p.d_yz * np.sin(obs_m.adoa_yz),
    )


@dataclass(frozen=True)
class KernelMatrix:
    """A Gram edge kernel: kind "real" (m, m) or "quaternion" (m, m, 4)."""

    kind: str
    data: np.ndarray

    def __post_init__(self):
        if self.kind not in ("real", "quaternion"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        want = 3 if self.kind == "quaternion" else 2
        if self.data.ndim != want or self.data.shape[0] != self.data.shape[1]:
            raise ValueError(f"bad {self.kind} kernel shape {self.data.shape}")

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def as_quat_matrix(self) -> QuatMatrix:
        if self.kind != "quaternion":
            raise ValueError("not a quaternion kernel")
        return QuatMatrix(self.data)


@dataclass(frozen=True)
class ObservationTable:
    """Structure-of-arrays observations for all edge pairs of one trial.

    Pairs are enumerated in row-major upper-triangle order, matching
    np.triu_indices(m, 1).  planes_m / planes_p hold [xy, xz, yz]
    projection lengths for the first / second edge of each pair, and
    plane_adoa the signed per-plane angle differences (second minus
    first).  offdiag_m / offdiag_p optionally override the per-edge
    distances inside off-diagonal entries (independent per-pair redraws);
    the diagonal always uses `distances`.
    """

    distances: np.ndarray    # (m,)
    adoa: np.ndarray         # (pairs,)
    planes_m: np.ndarray     # (pairs, 3)
    planes_p: np.ndarray     # (pairs, 3)
    plane_adoa: np.ndarray   # (pairs, 3)
    offdiag_m: Optional[np.ndarray] = None
    offdiag_p: Optional[np.ndarray] = None

    def __post_init__(self):
        m = len(self.distances)
        pairs = m * (m - 1) // 2
        fields = {
            "adoa": (self.adoa, (pairs,)),
            "planes_m": (self.planes_m, (pairs, 3)),
            "planes_p": (self.planes_p, (pairs, 3)),
            "plane_adoa": (self.plane_adoa, (pairs, 3)),
        }
        if self.offdiag_m is not None:
            fields["offdiag_m"] = (self.offdiag_m, (pairs,))
        if self.offdiag_p is not None:
            fields["offdiag_p"] = (self.offdiag_p, (pairs,))
        for name, (arr, shape) in fields.items():
            if arr.shape != shape:
                raise MissingFieldError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.isfinite(arr).all():
                raise MissingFieldError(f"{name} contains non-finite values")
        if not np.isfinite(self.distances).all():
            raise MissingFieldError("distances contain non-finite values")
        if np.any(self.distances <= 0.0):
            raise ZeroEdgeError("measured distances must be positive")

    @property
    def n_edges(self) -> int:
        return len(self.distances)


def exact_observation_table(v) -> ObservationTable:
    """Noiseless observation table computed from true edge vectors."""
    v = np.asarray(v, dtype=float)
    frame = edge_frame(v)
    m = len(v)
    iu, ju = np.triu_indices(m, 1)
    dots = (v[iu] * v[ju]).sum(axis=1)
    cos_a = np.clip(dots / (frame.d[iu] * frame.d[ju]), -1.0, 1.0)
    return ObservationTable(
        distances=frame.d,
        adoa=np.arccos(cos_a),
        planes_m=frame.planes[iu],
        planes_p=frame.planes[ju],
        plane_adoa=frame.angles[ju] - frame.angles[iu],
    )


def build_quat_gek(table: ObservationTable) -> KernelMatrix:
    """Quaternion Gram edge kernel from an observation table."""
    m = table.n_edges
    iu, ju = np.triu_indices(m, 1)
    dm = table.distances[iu] if table.offdiag_m is None else table.offdiag_m
    dp = table.distances[ju] if table.offdiag_p is None else table.offdiag_p
    w = dm * dp * np.cos(table.adoa)
    xyz = -(table.planes_m * table.planes_p * np.sin(table.plane_adoa))
    data = np.zeros((m, m, 4))
    data[iu, ju, 0] = w
    data[iu, ju, 1:] = xyz
    data[ju, iu, 0] = w
    data[ju, iu, 1:] = -xyz
    data[np.arange(m), np.arange(m), 0] = table.distances ** 2
    return KernelMatrix("quaternion", data)


def build_real_gek(distances, adoa, offdiag_m=None, offdiag_p=None) -> KernelMatrix:
    """Real Gram edge kernel from distances and pairwise 3D ADoAs.

    adoa is in row-major upper-triangle order; offdiag overrides mirror
    :class:`ObservationTable`.
    """
    distances = np.asarray(distances, dtype=float)
    adoa = np.asarray(adoa, dtype=float)
    m = len(distances)
    iu, ju = np.triu_indices(m, 1)
    if adoa.shape != iu.shape:
        raise MissingFieldError(f"adoa has shape {adoa.shape}, expected {iu.shape}")
    if not (np.isfinite(distances).all() and np.isfinite(adoa).all()):
        raise MissingFieldError("distances and adoa must be finite")
    if np.any(distances <= 0.0):
        raise ZeroEdgeError("measured distances must be positive")
    dm = distances[iu] if offdiag_m is None else np.asarray(offdiag_m, dtype=float)
    dp = distances[ju] if offdiag_p is None else np.asarray(offdiag_p, dtype=float)
    w = dm * dp * np.cos(adoa)
    data = np.zeros((m, m))
    data[iu, ju] = w
    data[ju, iu] = w
    data[np.arange(m), np.arange(m)] = distances ** 2
    return KernelMatrix("real", data)
