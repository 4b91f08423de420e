"""Quaternion linear algebra on dense arrays.

Quaternions use the Hamilton convention (i*j = k, j*k = i, k*i = j) with
components ordered (w, x, y, z).  A matrix of quaternions is stored as a
real ndarray of shape (rows, cols, 4); a vector of quaternions as (n, 4).

Hermitian quaternion matrices are diagonalized through their complex
adjoint: writing each entry q = (w + x*i) + (y + z*i)*j = a + b*j, the
map

    chi(Q) = [[ A,        B       ],
              [-conj(B),  conj(A) ]]

is an algebra homomorphism into complex 2m x 2n matrices, and chi(Q) is
complex-Hermitian exactly when Q is quaternion-Hermitian.  Eigenvalues of
chi(Q) occur in duplicated pairs; each pair collapses to one quaternion
eigenvalue, and either adjoint eigenvector of the pair reassembles to a
quaternion eigenvector (the two differ by a right unit-quaternion factor,
which is the gauge freedom handled downstream).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class NotHermitianError(ValueError):
    """Input matrix failed the Hermitian symmetry check."""


class NoConvergenceError(RuntimeError):
    """The underlying eigensolver did not converge."""


@dataclass(frozen=True)
class Tolerances:
    """Central numeric tolerances shared across the package."""

    hermitian_rtol: float = 1e-9   # symmetry check before eigensolves
    pair_rtol: float = 1e-9        # adjoint eigenvalue pair agreement
    gauge_floor: float = 1e-12     # smallest usable gauge alignment norm


TOL = Tolerances()

_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    """Scalar quaternion q = w + x*i + y*j + z*k."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return Quaternion(self.w * other, self.x * other,
                          self.y * other, self.z * other)

    def __rmul__(self, other):
        # real scalars commute with quaternions
        return Quaternion(self.w * other, self.x * other,
                          self.y * other, self.z * other)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2))

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return (self - other).norm() <= atol


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product of two scalar quaternions."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def hamilton_product(a, b) -> np.ndarray:
    """Elementwise Hamilton product of (..., 4) quaternion arrays.

    Broadcasts like any numpy binary operation over the leading axes.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w1, x1, y1, z1 = np.moveaxis(a, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(b, -1, 0)
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def quat_conj(q) -> np.ndarray:
    """Conjugate of a (..., 4) quaternion array."""
    return np.asarray(q, dtype=float) * _CONJ_SIGNS


def quat_norm(q) -> np.ndarray:
    """Pointwise quaternion norms of a (..., 4) array."""
    q = np.asarray(q, dtype=float)
    return np.sqrt((q * q).sum(axis=-1))


def quat_outer(u, v=None) -> np.ndarray:
    """Outer product u v^H of quaternion vectors: (m, 4) x (n, 4) -> (m, n, 4)."""
    u = np.asarray(u, dtype=float)
    v = u if v is None else np.asarray(v, dtype=float)
    return hamilton_product(u[:, None, :], quat_conj(v)[None, :, :])


class QuatMatrix:
    """Dense quaternion matrix backed by a (rows, cols, 4) float array.

    The backing array is shared, not copied.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[-1] != 4:
            raise ValueError(f"expected shape (rows, cols, 4), got {data.shape}")
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QuatMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def identity(cls, n: int) -> "QuatMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data)

    @classmethod
    def from_real(cls, matrix) -> "QuatMatrix":
        matrix = np.asarray(matrix, dtype=float)
        data = np.zeros(matrix.shape + (4,))
        data[..., 0] = matrix
        return cls(data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape[:2]

    def component(self, k: int) -> np.ndarray:
        return self.data[..., k]

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_array(self.data[i, j])

    def conj_transpose(self) -> "QuatMatrix":
        return QuatMatrix(quat_conj(self.data.transpose(1, 0, 2)))

    def __matmul__(self, other: "QuatMatrix") -> "QuatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        a, b = self.data, other.data
        aw, ax, ay, az = (a[..., k] for k in range(4))
        bw, bx, by, bz = (b[..., k] for k in range(4))
        return QuatMatrix(np.stack([
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ], axis=-1))

    def frobenius_norm(self) -> float:
        return float(np.sqrt((self.data ** 2).sum()))

    def is_hermitian(self, rtol: float = TOL.hermitian_rtol) -> bool:
        diff = self.data - self.conj_transpose().data
        scale = np.abs(self.data).max()
        if scale == 0.0:
            return True
        return bool(np.abs(diff).max() <= rtol * scale)


def to_adjoint(q) -> np.ndarray:
    """Complex adjoint of a quaternion matrix: (m, n, 4) -> complex (2m, 2n)."""
    data = q.data if isinstance(q, QuatMatrix) else np.asarray(q, dtype=float)
    if data.ndim != 3 or data.shape[-1] != 4:
        raise ValueError(f"expected shape (rows, cols, 4), got {data.shape}")
    a = data[..., 0] + 1j * data[..., 1]
    b = data[..., 2] + 1j * data[..., 3]
    m, n = data.shape[:2]
    out = np.empty((2 * m, 2 * n), dtype=complex)
    out[:m, :n] = a
    out[:m, n:] = b
    out[m:, :n] = -b.conj()
    out[m:, n:] = a.conj()
    return out


def from_adjoint(c) -> QuatMatrix:
    """Inverse of :func:`to_adjoint`; reads the top block row of a (2m, 2n) array."""
    c = np.asarray(c)
    if c.ndim != 2 or c.shape[0] % 2 or c.shape[1] % 2:
        raise ValueError(f"expected even-sided 2D array, got shape {c.shape}")
    m, n = c.shape[0] // 2, c.shape[1] // 2
    a = c[:m, :n]
    b = c[:m, n:]
    return QuatMatrix(np.stack([a.real, a.imag, b.real, b.imag], axis=-1))


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues (descending) and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(a, *, rtol: float = TOL.hermitian_rtol) -> EigenResult:
    """Full eigendecomposition of a real-symmetric or complex-Hermitian matrix.

    Raises NotHermitianError when the asymmetry exceeds rtol relative to the
    largest entry magnitude, NoConvergenceError when the solver fails.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.abs(a).max() if a.size else 0.0
    if scale > 0.0 and np.abs(a - a.conj().T).max() > rtol * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    try:
        evals, evecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    return EigenResult(evals[::-1].copy(), evecs[:, ::-1].copy())


def _reassemble_column(column: np.ndarray, m: int) -> np.ndarray:
    # adjoint eigenvector (top, bot) -> quaternion vector a + b*j with
    # a = top, b = -conj(bot); unit complex norm maps to unit quaternion norm
    a = column[:m]
    b = -np.conj(column[m:])
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


def quat_hermitian_eigensystem(k, *, check_hermitian: bool = True,
                               rtol: float = TOL.hermitian_rtol):
    """All eigenpairs of a Hermitian quaternion matrix.

    Returns (values, vectors): values is (m,) real descending, vectors is
    (m, m, 4) with vectors[t] the unit quaternion eigenvector for values[t].
    Each pair of duplicated adjoint eigenvalues contributes one entry; the
    reported value is the pair mean.
    """
    if not isinstance(k, QuatMatrix):
        k = QuatMatrix(k)
    if k.rows != k.cols:
        raise ValueError(f"expected a square matrix, got shape {k.shape}")
    if check_hermitian and not k.is_hermitian(rtol):
        raise NotHermitianError("quaternion matrix is not Hermitian within tolerance")
    m = k.rows
    if m == 0:
        return np.empty(0), np.empty((0, 0, 4))
    chi = to_adjoint(k)
    try:
        evals, evecs = np.linalg.eigh(chi)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    values = np.empty(m)
    vectors = np.empty((m, m, 4))
    for t in range(m):
        lo, hi = 2 * t, 2 * t + 1
        values[t] = 0.5 * (evals[lo] + evals[hi])
        pick = lo if abs(evecs[0, lo]) >= abs(evecs[0, hi]) else hi
        vectors[t] = _reassemble_column(evecs[:, pick], m)
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[order]


class QsvdResult(NamedTuple):
    lambda1: float
    u1: np.ndarray          # (m, 4) unit quaternion vector
    spectrum: np.ndarray    # all m singular values, descending


def qsvd_dominant(k, *, check_hermitian: bool = True,
                  rtol: float = TOL.hermitian_rtol) -> QsvdResult:
    """Dominant singular triple of a Hermitian quaternion matrix.

    Singular values are the eigenvalue magnitudes.  The dominant vector is
    defined up to a right unit-quaternion factor; callers fix that gauge
    against known reference entries.
    """
    values, vectors = quat_hermitian_eigensystem(
        k, check_hermitian=check_hermitian, rtol=rtol)
    mags = np.abs(values)
    order = np.argsort(-mags, kind="stable")
    spectrum = mags[order]
    top = order[0]
    return QsvdResult(float(mags[top]), vectors[top], spectrum)
