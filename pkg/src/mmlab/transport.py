"""Radial transport maps from Gaussian spaces onto (solid) ellipsoids.

With ``L = diag(a_1, ..., a_n)`` and the gauge ``r(x) = |L^{-1} x|``:

* ``PhiE(x) = R(r) / r * x`` pushes ``N(0, diag(a^2))`` onto the uniform
  measure of the solid ellipsoid with semiaxes ``sqrt(n-1) a_i``;
* ``PhiS(x) = sqrt(n-1) / r * x`` pushes it onto the linear image of the
  round measure on the surface;
* ``Psi`` is the same construction between the measures restricted to the
  gauge annulus ``[theta sqrt(n-1), sqrt(n-1) / theta]``.

``R`` matches the radial CDF of the standard Gaussian with that of the ball of
radius ``sqrt(n-1)``:  ``R(r) = sqrt(n-1) * P(n/2, r^2/2)^(1/n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgument
from .measures import PointCloud
from .special import _log_pq, log_reg_lower_gamma, reg_lower_gamma

__all__ = [
    "OpNormEstimate",
    "RadialProfile",
    "TransportMapSpec",
    "annulus_profile",
    "apply_transport",
    "jacobian_fd",
    "opnorm_at",
    "reg_lower_gamma",
    "transport_points",
]


class RadialProfile:
    """The radius-matching function ``R`` in dimension ``n``."""

    def __init__(self, n: int):
        if int(n) != n or n < 2:
            raise InvalidArgument("radial profile needs n >= 2")
        self.n = int(n)
        self.radius = math.sqrt(self.n - 1)
        # log I_{n-1} = log int_0^inf t^{n-1} e^{-t^2/2} dt
        self._log_moment = 0.5 * (self.n - 2) * math.log(2.0) + math.lgamma(0.5 * self.n)

    def _checked(self, r):
        arr = np.asarray(r, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument("radius must be finite")
        if np.any(arr < 0):
            raise InvalidArgument("radius must be nonnegative")
        return arr

    def gaussian_ball_mass(self, r):
        """Standard Gaussian mass of the centered ball of radius ``r``."""
        arr = self._checked(r)
        return reg_lower_gamma(0.5 * self.n, 0.5 * arr**2)

    def uniform_ball_mass(self, R):
        """Mass of ``B_R`` under the uniform measure on ``B_{sqrt(n-1)}``."""
        arr = np.minimum(self._checked(R) / self.radius, 1.0)
        return arr**self.n

    def __call__(self, r):
        arr = self._checked(r)
        lp, lq = _log_pq(0.5 * self.n, 0.5 * arr**2)
        # log P via log1p(-Q) once P is close to one, so R saturates smoothly.
        with np.errstate(divide="ignore"):
            log_p = np.where(lp < math.log(0.5), lp, np.log1p(-np.exp(np.minimum(lq, 0.0))))
        out = self.radius * np.exp(log_p / self.n)
        return float(out) if np.ndim(r) == 0 else out

    def derivative(self, r):
        """``dR/dr`` in closed form."""
        arr = self._checked(r)
        n = self.n
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = np.asarray(log_reg_lower_gamma(0.5 * n, 0.5 * arr**2))
            log_r = np.log(arr)
            log_d = (
                math.log(self.radius)
                - math.log(n)
                + (1.0 / n - 1.0) * log_p
                + (n - 1) * log_r
                - 0.5 * arr**2
                - self._log_moment
            )
        # r -> 0: R ~ c r, derivative tends to the finite slope.
        slope0 = self.radius * math.exp((-(math.log(n)) - self._log_moment) / n)
        out = np.where(arr > 0, np.exp(np.where(arr > 0, log_d, 0.0)), slope0)
        return float(out) if np.ndim(r) == 0 else out


def annulus_profile(theta: float, n: int, r):
    """Radius map ``R~`` between the Gaussian and ball measures on the gauge annulus.

    The Gaussian is restricted to ``[theta sqrt(n-1), sqrt(n-1)/theta]``, the
    uniform ball measure to ``[theta sqrt(n-1), sqrt(n-1)]``; both normalized.
    """
    if not 0 < theta < 1:
        raise InvalidArgument("theta must lie in (0, 1)")
    if int(n) != n or n < 2:
        raise InvalidArgument("n must be an integer >= 2")
    arr = np.asarray(r, dtype=float)
    rho = math.sqrt(n - 1)
    lo, hi = theta * rho, rho / theta
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument("radius must be finite")
    slack = 1e-12 * hi
    if np.any(arr < lo - slack) or np.any(arr > hi + slack):
        raise InvalidArgument(f"radius outside the annulus [{lo}, {hi}]")
    arr = np.clip(arr, lo, hi)
    s = 0.5 * n
    p_r = reg_lower_gamma(s, 0.5 * arr**2)
    p_lo = reg_lower_gamma(s, 0.5 * lo**2)
    p_hi = reg_lower_gamma(s, 0.5 * hi**2)
    t = np.clip((p_r - p_lo) / (p_hi - p_lo), 0.0, 1.0)
    floor = theta**n
    out = rho * (floor + t * (1.0 - floor)) ** (1.0 / n)
    out = np.clip(out, lo, rho)
    return float(out) if np.ndim(r) == 0 else out


@dataclass(frozen=True)
class TransportMapSpec:
    """One of ``PhiE``, ``PhiS``, ``Psi`` (needs ``theta``) or the plain ``Linear`` map."""

    variant: str
    semiaxes: tuple[float, ...]
    theta: float | None = None

    def __post_init__(self):
        if self.variant not in ("PhiE", "PhiS", "Psi", "Linear"):
            raise InvalidArgument(f"unknown transport variant {self.variant!r}")
        axes = np.asarray(self.semiaxes, dtype=float)
        if axes.ndim != 1 or axes.size < 1 or np.any(~np.isfinite(axes)) or np.any(axes <= 0):
            raise InvalidArgument("semiaxes must be positive and finite")
        if self.variant != "Linear" and axes.size < 2:
            raise InvalidArgument("radial transport needs n >= 2")
        if self.variant == "Psi" and (self.theta is None or not 0 < self.theta < 1):
            raise InvalidArgument("Psi needs theta in (0, 1)")
        object.__setattr__(self, "semiaxes", tuple(float(a) for a in axes))

    @property
    def dim(self) -> int:
        return len(self.semiaxes)


def transport_points(spec: TransportMapSpec, points: np.ndarray, profile: RadialProfile | None = None):
    """Apply the map to the rows of ``points``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != spec.dim:
        raise InvalidArgument(f"points must have shape (m, {spec.dim})")
    axes = np.asarray(spec.semiaxes)
    if spec.variant == "Linear":
        return pts * axes
    n = spec.dim
    gauge = np.linalg.norm(pts / axes, axis=1)
    zero = gauge == 0.0
    if spec.variant == "PhiE":
        profile = profile or RadialProfile(n)
        safe = np.where(zero, 1.0, gauge)
        factor = np.where(zero, 0.0, profile(safe) / safe)
    elif spec.variant == "PhiS":
        if zero.any():
            raise InvalidArgument("PhiS is undefined at the origin")
        factor = math.sqrt(n - 1) / gauge
    else:
        if zero.any():
            raise InvalidArgument("Psi is undefined at the origin")
        factor = annulus_profile(spec.theta, n, gauge) / gauge
    return pts * factor[:, None]


def apply_transport(spec: TransportMapSpec, cloud: PointCloud) -> PointCloud:
    return cloud.with_points(transport_points(spec, cloud.points))


class OpNormEstimate(NamedTuple):
    value: float
    iterations: int
    degenerate: bool


def jacobian_fd(func, x: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Jacobian of a map acting on rows, ``J[i, j] = d f_i / d x_j``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    steps = h * np.eye(n)
    forward = func(x[None, :] + steps)
    backward = func(x[None, :] - steps)
    return ((forward - backward) / (2.0 * h)).T


def opnorm_at(
    spec: TransportMapSpec,
    x,
    h: float | None = None,
    max_iter: int = 30,
    tol: float = 1e-10,
) -> OpNormEstimate:
    """Operator norm of the differential at ``x`` (finite differences + power iteration)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != spec.dim:
        raise InvalidArgument(f"point must have {spec.dim} coordinates")
    if h is None:
        h = 1e-5 * max(1.0, float(np.linalg.norm(x)))
    if not h > 0:
        raise InvalidArgument("finite-difference step must be positive")
    profile = RadialProfile(spec.dim) if spec.variant in ("PhiE",) else None
    jac = jacobian_fd(lambda p: transport_points(spec, p, profile), x, h)
    if not np.any(jac):
        return OpNormEstimate(0.0, 0, True)

    gram = jac.T @ jac
    v = np.random.default_rng(0).standard_normal(x.size)
    v /= np.linalg.norm(v)
    sigma = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        w = gram @ v
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return OpNormEstimate(0.0, it, True)
        v = w / norm_w
        sigma = math.sqrt(max(float(v @ gram @ v), 0.0))
        if residual <= tol * max(1.0, lam):
            break
    return OpNormEstimate(sigma, it, False)
