"""Network layouts, edge enumeration, and the edge-to-node structure matrix.

Nodes are indexed with anchors first: 0 .. n_anchors-1 are anchors, the
rest are targets.  The edge set pairs every anchor with every other node
(anchor-anchor and anchor-target); target-target pairs carry no usable
measurements and are excluded.  Edges are enumerated ascending by
(i, j): (0,1), (0,2), ..., (0,N-1), (1,2), ...
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quatlin import Quaternion


class InvalidCountsError(ValueError):
    """Node counts cannot form a valid anchored edge set."""


class InvalidLayoutError(ValueError):
    """Coordinates do not satisfy the layout preconditions."""


@dataclass(frozen=True)
class NetworkLayout:
    """Anchor and target coordinates, each row one node position.

    Anchors must span 3D (at least 4 of them, not all coplanar) so that
    anchored alignment downstream is well posed.
    """

    anchors: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        targets = np.atleast_2d(np.asarray(self.targets, dtype=float))
        if anchors.ndim != 2 or anchors.shape[1] != 3:
            raise InvalidLayoutError(f"anchors must be (n, 3), got {anchors.shape}")
        if targets.ndim != 2 or targets.shape[1] != 3:
            raise InvalidLayoutError(f"targets must be (n, 3), got {targets.shape}")
        if len(anchors) < 4:
            raise InvalidLayoutError("need at least 4 anchors")
        if len(targets) < 1:
            raise InvalidLayoutError("need at least 1 target")
        if not (np.isfinite(anchors).all() and np.isfinite(targets).all()):
            raise InvalidLayoutError("coordinates must be finite")
        centered = anchors - anchors.mean(axis=0)
        if np.linalg.matrix_rank(centered) < 3:
            raise InvalidLayoutError("anchors are coplanar; they must span 3D")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "targets", targets)

    @property
    def n_anchors(self) -> int:
        return len(self.anchors)

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    @property
    def n_nodes(self) -> int:
        return len(self.anchors) + len(self.targets)

    @property
    def coords(self) -> np.ndarray:
        return np.vstack([self.anchors, self.targets])


@dataclass(frozen=True)
class EdgeSet:
    """Anchored node pairs in ascending enumeration order."""

    n_anchors: int
    n_targets: int
    pairs: np.ndarray  # (m, 2) int, each row (i, j) with i < j and i an anchor

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def n_nodes(self) -> int:
        return self.n_anchors + self.n_targets

    @property
    def aa_mask(self) -> np.ndarray:
        """True on anchor-anchor edges."""
        return self.pairs[:, 1] < self.n_anchors

    @property
    def aa_indices(self) -> np.ndarray:
        return np.flatnonzero(self.aa_mask)

    @property
    def at_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.aa_mask)


def enumerate_edges(n_anchors: int, n_targets: int) -> EdgeSet:
    """All anchor-anchor and anchor-target pairs, ascending by (i, j).

    Edge count is n_anchors*(n_anchors-1)/2 + n_anchors*n_targets.
    """
    if n_anchors < 2 or n_targets < 0:
        raise InvalidCountsError(
            f"need n_anchors >= 2 and n_targets >= 0, got {n_anchors}, {n_targets}")
    n = n_anchors + n_targets
    pairs = [(i, j) for i in range(n_anchors) for j in range(i + 1, n)]
    return EdgeSet(n_anchors, n_targets, np.array(pairs, dtype=int).reshape(-1, 2))


@dataclass(frozen=True)
class StructureMatrix:
    """Signed incidence matrix mapping node coordinates to edge vectors.

    Row m has +1 at column i and -1 at column j for edge (i, j), so
    matrix @ coords stacks the edge vectors x_i - x_j.  Rank is
    n_nodes - 1; anchoring restores the lost translation.
    """

    matrix: np.ndarray
    aa_mask: np.ndarray

    @property
    def c_aa(self) -> np.ndarray:
        return self.matrix[self.aa_mask]

    @property
    def c_at(self) -> np.ndarray:
        return self.matrix[~self.aa_mask]


def build_structure_matrix(edges: EdgeSet) -> StructureMatrix:
    m, n = edges.size, edges.n_nodes
    c = np.zeros((m, n))
    rows = np.arange(m)
    c[rows, edges.pairs[:, 0]] = 1.0
    c[rows, edges.pairs[:, 1]] = -1.0
    return StructureMatrix(c, edges.aa_mask.copy())


def coords_to_quat(point) -> Quaternion:
    """Embed a 3D point as the pure-position quaternion x + y*i + z*j + 0*k."""
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {p.shape}")
    return Quaternion(p[0], p[1], p[2], 0.0)


def quat_to_coords(q: Quaternion) -> np.ndarray:
    """Inverse of :func:`coords_to_quat`; the k component is discarded."""
    return np.array([q.w, q.x, q.y])


def coords_to_quat_array(points) -> np.ndarray:
    """Rows of 3D points -> (n, 4) quaternion array with zero k parts."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError(f"expected (n, 3) points, got shape {points.shape}")
    return np.concatenate([points, np.zeros((len(points), 1))], axis=1)


def quat_to_coords_array(q) -> np.ndarray:
    """(n, 4) quaternion array -> (n, 3) points, discarding k parts."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[1] != 4:
        raise ValueError(f"expected (n, 4) quaternions, got shape {q.shape}")
    return q[:, :3].copy()


def true_edges(layout: NetworkLayout, edges: EdgeSet):
    """Exact edge vectors and their quaternion embedding.

    Returns (v, nu): v is (m, 3) with rows x_i - x_j, nu is (m, 4).
    """
    if edges.n_anchors != layout.n_anchors or edges.n_targets != layout.n_targets:
        raise InvalidCountsError("edge set does not match the layout's node counts")
    coords = layout.coords
    v = coords[edges.pairs[:, 0]] - coords[edges.pairs[:, 1]]
    return v, coords_to_quat_array(v)
