"""Measurement noise models and reproducible random streams.

Distances are corrupted multiplicatively by a Gamma law whose first two
moments match the true distance d and a chosen spread sigma_d:

    shape = d**2 / sigma_d**2,  scale = sigma_d**2 / d

Angles are corrupted additively by Tikhonov (von Mises) noise with
density exp(rho*cos(t)) / (2*pi*I0(rho)) on (-pi, pi].  Instead of rho,
experiments are parameterized by the concentration angle epsilon: the
half-width of the symmetric interval around the true angle that holds
90% of the probability mass.  calibrate_rho inverts that definition.

Every random quantity is drawn from a named substream derived from a
single master seed, so results are bit-identical regardless of how
trials are scheduled across workers.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats


class ZeroDistanceError(ValueError):
    """A distance to corrupt must be strictly positive."""


class OutOfRangeError(ValueError):
    """Parameter outside its valid domain."""


CENTRAL_MASS = 0.9
# above this half-width even a uniform angle (rho -> 0) holds 90% mass
EPSILON_MAX_DEG = CENTRAL_MASS * 180.0

_LOG10_RHO_LO = -9.0
_LOG10_RHO_HI = 9.0


def tikhonov_pdf(t, rho: float):
    """Density of the zero-mean Tikhonov law on (-pi, pi].

    Computed as exp(rho*(cos t - 1)) / (2*pi*i0e(rho)) to stay finite for
    large rho.
    """
    if rho < 0:
        raise OutOfRangeError("rho must be nonnegative")
    t = np.asarray(t, dtype=float)
    return np.exp(rho * (np.cos(t) - 1.0)) / (2.0 * np.pi * special.i0e(rho))


def _central_mass(rho: float, eps_rad: float) -> float:
    # probability of |angle error| <= eps_rad under concentration rho
    dist = stats.vonmises(kappa=rho)
    return float(dist.cdf(eps_rad) - dist.cdf(-eps_rad))


def calibrate_rho(epsilon_deg: float) -> float:
    """Concentration rho whose central 90% mass spans +/- epsilon degrees.

    Monotone decreasing in epsilon.  Valid for 0 < epsilon < 162 degrees;
    at 162 the calibration degenerates to the uniform limit rho -> 0.
    """
    if not np.isfinite(epsilon_deg) or epsilon_deg <= 0.0:
        raise OutOfRangeError("epsilon must be positive")
    if epsilon_deg >= EPSILON_MAX_DEG:
        raise OutOfRangeError(
            f"epsilon must be below {EPSILON_MAX_DEG} degrees (uniform limit)")
    eps_rad = np.radians(epsilon_deg)

    def objective(log10_rho: float) -> float:
        return _central_mass(10.0 ** log10_rho, eps_rad) - CENTRAL_MASS

    lo, hi = _LOG10_RHO_LO, _LOG10_RHO_HI
    # tiny epsilon needs very large rho; widen until the bracket straddles
    while objective(hi) < 0.0 and hi < 30.0:
        hi += 3.0
    root = optimize.brentq(objective, lo, hi, xtol=1e-12, rtol=8.9e-16)
    return float(10.0 ** root)


RHO_EXACT = np.inf  # sentinel: angle measurements carry no noise


@dataclass(frozen=True)
class NoiseParams:
    """Distance spread and angle concentration for one sweep point.

    rho is stored alongside epsilon_deg so trial workers never repeat the
    calibration.  epsilon_deg == 0 encodes exact angles (rho infinite).
    """

    sigma_d: float
    epsilon_deg: float
    rho: float

    def __post_init__(self):
        if self.sigma_d < 0:
            raise OutOfRangeError("sigma_d must be nonnegative")
        if self.epsilon_deg < 0:
            raise OutOfRangeError("epsilon_deg must be nonnegative")
        if not (self.rho >= 0):
            raise OutOfRangeError("rho must be nonnegative")

    @classmethod
    def from_epsilon(cls, sigma_d: float, epsilon_deg: float) -> "NoiseParams":
        rho = RHO_EXACT if epsilon_deg == 0.0 else calibrate_rho(epsilon_deg)
        return cls(sigma_d, epsilon_deg, rho)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    raise TypeError(f"expected a Generator or RngStream, got {type(rng).__name__}")


def sample_gamma_distance(d, sigma_d: float, rng, size=None):
    """Noisy distances with mean d and standard deviation sigma_d.

    d may be a scalar or array; sigma_d == 0 returns d unchanged.
    """
    gen = _as_generator(rng)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise ZeroDistanceError("true distances must be strictly positive")
    if sigma_d < 0.0:
        raise OutOfRangeError("sigma_d must be nonnegative")
    if sigma_d == 0.0:
        return d.copy() if size is None else np.broadcast_to(d, size).copy()
    shape = d ** 2 / sigma_d ** 2
    scale = sigma_d ** 2 / d
    return gen.gamma(shape, scale, size=size)


def sample_tikhonov_angle(theta, rho: float, rng, size=None):
    """Angles theta plus zero-mean Tikhonov noise, wrapped to (theta-pi, theta+pi].

    rho == inf returns theta exactly; rho == 0 gives uniform wrap-around noise.
    """
    theta = np.asarray(theta, dtype=float)
    if np.isinf(rho):
        return theta.copy() if size is None else np.broadcast_to(theta, size).copy()
    if rho < 0:
        raise OutOfRangeError("rho must be nonnegative")
    gen = _as_generator(rng)
    if size is None:
        size = theta.shape
    delta = gen.vonmises(0.0, rho, size=size)
    # numpy returns values in [-pi, pi]; fold -pi onto +pi for a half-open wrap
    delta = np.where(delta <= -np.pi, delta + 2.0 * np.pi, delta)
    return theta + delta


def _hash_part(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    raise TypeError(f"stream key parts must be str or int, got {type(part).__name__}")


@dataclass(frozen=True)
class RngStream:
    """One named, reproducible random substream.

    The generator is seeded from (master_seed, key) through SeedSequence
    spawn keys, so distinct keys give statistically independent streams
    and the mapping is stable across runs, platforms, and worker counts.
    """

    master_seed: int
    key: tuple

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(seq))

    @classmethod
    def for_purpose(cls, master_seed: int, *parts) -> "RngStream":
        return cls(master_seed, tuple(_hash_part(p) for p in parts))


class TrialRng:
    """Purpose-keyed generators for one (epsilon, sigma, trial) cell.

    Each purpose ("distance", "adoa", "plane", ...) gets an independent
    substream; repeated requests for the same purpose return the same
    generator instance so draws continue the sequence.
    """

    def __init__(self, master_seed: int, scope: tuple = ()):
        self.master_seed = int(master_seed)
        self.scope = tuple(_hash_part(p) for p in scope)
        self._cache: dict = {}

    def stream(self, purpose: str) -> RngStream:
        return RngStream(self.master_seed, self.scope + (_hash_part(purpose),))

    def generator(self, purpose: str) -> np.random.Generator:
        if purpose not in self._cache:
            self._cache[purpose] = self.stream(purpose).generator()
        return self._cache[purpose]
