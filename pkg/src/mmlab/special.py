"""Regularized incomplete gamma functions, evaluated in the log domain.

Power series for ``x < s + 1`` and a modified-Lentz continued fraction for the
upper function otherwise.  Both are vectorized over ``x`` for a fixed shape
parameter ``s``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgument

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


def _validate(s, x):
    if not (np.isscalar(s) and math.isfinite(s) and s > 0):
        raise InvalidArgument(f"shape parameter must be a positive finite scalar, got {s!r}")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument("incomplete gamma argument must be finite")
    if np.any(arr < 0):
        raise InvalidArgument("incomplete gamma argument must be nonnegative")
    return float(s), arr


def _log_p_series(s: float, x: np.ndarray) -> np.ndarray:
    # log P(s, x) = s log x - x - lgamma(s + 1) + log sum_k x^k / ((s+1)...(s+k))
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        if k > _MAX_ITER:
            raise RuntimeError("incomplete gamma series failed to converge")
        term = np.where(active, term * x / (s + k), term)
        total = np.where(active, total + term, total)
        active &= term > _EPS * total
    return s * np.log(x) - x - math.lgamma(s + 1.0) + np.log(total)


def _log_q_fraction(s: float, x: np.ndarray) -> np.ndarray:
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / np.where(np.abs(b) < _TINY, _TINY, b)
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    i = 0
    while active.any():
        i += 1
        if i > _MAX_ITER:
            raise RuntimeError("incomplete gamma continued fraction failed to converge")
        an = -i * (i - s)
        b = b + 2.0
        d_new = an * d + b
        d_new = np.where(np.abs(d_new) < _TINY, _TINY, d_new)
        c_new = b + an / c
        c_new = np.where(np.abs(c_new) < _TINY, _TINY, c_new)
        d_new = 1.0 / d_new
        delta = d_new * c_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _EPS
    return s * np.log(x) - x - math.lgamma(s) + np.log(h)


def _log_pq(s: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(log P, log Q)`` elementwise."""
    flat = np.atleast_1d(x).astype(float).ravel()
    log_p = np.empty_like(flat)
    log_q = np.empty_like(flat)

    zero = flat == 0.0
    log_p[zero] = -np.inf
    log_q[zero] = 0.0

    low = (~zero) & (flat < s + 1.0)
    if low.any():
        lp = _log_p_series(s, flat[low])
        log_p[low] = lp
        log_q[low] = np.log1p(-np.exp(np.minimum(lp, 0.0)))

    high = (~zero) & ~low
    if high.any():
        lq = _log_q_fraction(s, flat[high])
        log_q[high] = lq
        log_p[high] = np.log1p(-np.exp(np.minimum(lq, 0.0)))

    shape = np.shape(x)
    return log_p.reshape(shape), log_q.reshape(shape)


def log_reg_lower_gamma(s, x):
    """``log P(s, x)``; ``-inf`` at ``x = 0``."""
    s, arr = _validate(s, x)
    lp, _ = _log_pq(s, arr)
    return float(lp) if np.ndim(x) == 0 else lp


def log_reg_upper_gamma(s, x):
    """``log Q(s, x) = log(1 - P(s, x))``."""
    s, arr = _validate(s, x)
    _, lq = _log_pq(s, arr)
    return float(lq) if np.ndim(x) == 0 else lq


def reg_lower_gamma(s, x):
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``."""
    s, arr = _validate(s, x)
    lp, lq = _log_pq(s, arr)
    # Take whichever side is better conditioned.
    out = np.where(lp < math.log(0.5), np.exp(lp), -np.expm1(lq))
    return float(out) if np.ndim(x) == 0 else out


def reg_upper_gamma(s, x):
    s, arr = _validate(s, x)
    lp, lq = _log_pq(s, arr)
    out = np.where(lq < math.log(0.5), np.exp(lq), -np.expm1(lp))
    return float(out) if np.ndim(x) == 0 else out
