"""Double sequences ``a_ij`` of normalized semiaxes and their convergence diagnostics.

Index conventions: ``j`` counts sequence members from 1, ``i`` counts axes from
1; arrays returned here are 0-based in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.stats import spearmanr

from .errors import InvalidArgument

__all__ = ["CriteriaReport", "SequenceFamily", "check_criteria", "check_conditions"]

GENERATORS = ("explicit", "round", "geometric", "custom-limit")
SCHEDULES = ("zero", "inverse-index", "inverse-dim")


@dataclass(frozen=True)
class SequenceFamily:
    """``a_ij`` for ``i <= n(j)``.

    * ``explicit``: ``table[j]`` lists ``a_1j .. a_n(j)j``.
    * ``round``: ``a_ij = a``.
    * ``geometric``: ``a_ij = scale * ratio**(i-1)``.
    * ``custom-limit``: ``a_ij = limit_i + delta_j`` with ``limit`` zero-padded
      and ``delta_j`` from ``perturbation`` (a schedule name or explicit list).
    """

    generator: str
    dims: tuple[int, ...]
    table: tuple[tuple[float, ...], ...] = ()
    a: float = 1.0
    scale: float = 1.0
    ratio: float = 0.5
    limit: tuple[float, ...] = ()
    perturbation: str | tuple[float, ...] = "zero"
    _rows: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InvalidArgument(f"unknown generator {self.generator!r}")
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 1 for n in dims):
            raise InvalidArgument("dims must be a non-empty list of positive integers")
        object.__setattr__(self, "dims", dims)
        rows = tuple(self._build_row(j) for j in range(len(dims)))
        for row in rows:
            if not np.all(np.isfinite(row)) or np.any(row <= 0):
                raise InvalidArgument("every a_ij must be positive and finite")
        object.__setattr__(self, "_rows", rows)

    def _delta(self, j: int) -> float:
        p = self.perturbation
        if isinstance(p, str):
            if p == "zero":
                return 0.0
            if p == "inverse-index":
                return 1.0 / (j + 1)
            if p == "inverse-dim":
                return 1.0 / self.dims[j]
            raise InvalidArgument(f"unknown perturbation schedule {p!r}")
        if len(p) != len(self.dims):
            raise InvalidArgument("explicit perturbation needs one entry per j")
        return float(p[j])

    def _build_row(self, j: int) -> np.ndarray:
        n = self.dims[j]
        if self.generator == "explicit":
            if len(self.table) != len(self.dims):
                raise InvalidArgument("explicit table needs one row per j")
            row = np.asarray(self.table[j], dtype=float)
            if row.size != n:
                raise InvalidArgument(f"table row {j} has {row.size} entries, expected {n}")
            return row
        if self.generator == "round":
            return np.full(n, float(self.a))
        if self.generator == "geometric":
            return self.scale * self.ratio ** np.arange(n, dtype=float)
        return self.limit_values(n) + self._delta(j)

    def limit_values(self, n: int) -> np.ndarray:
        """The limit sequence ``a_1..a_n`` (zero beyond what is specified)."""
        if self.generator == "round":
            return np.full(n, float(self.a))
        if self.generator == "geometric":
            return self.scale * self.ratio ** np.arange(n, dtype=float)
        out = np.zeros(n)
        lim = np.asarray(self.limit, dtype=float)[:n]
        out[: lim.size] = lim
        return out

    def __len__(self) -> int:
        return len(self.dims)

    def axes(self, j: int) -> np.ndarray:
        """Normalized semiaxes of the ``j``-th member (0-based)."""
        return self._rows[j].copy()


def check_conditions(fam: SequenceFamily, tol: float = 1e-6) -> dict:
    """Finite-horizon checks of the standing assumptions on ``a_ij``.

    ``A0``: dimensions grow over the horizon and ``a_ij`` is bounded.
    ``A1``: ``n(j)`` nondecreasing.  ``A2``: ``a_ij`` nonincreasing in ``i``.
    ``A3``: Cauchy test between the last two members on their shared axes.
    """
    dims = np.array(fam.dims)
    sup = max(float(fam.axes(j).max()) for j in range(len(fam)))
    a1 = bool(np.all(np.diff(dims) >= 0))
    a2 = all(bool(np.all(np.diff(fam.axes(j)) <= 0)) for j in range(len(fam)))
    if len(fam) >= 2:
        shared = min(fam.dims[-1], fam.dims[-2])
        gap = float(np.max(np.abs(fam.axes(len(fam) - 1)[:shared] - fam.axes(len(fam) - 2)[:shared])))
    else:
        gap = math.inf
    return {
        "A0": bool(dims[-1] > dims[0] and math.isfinite(sup)),
        "A1": a1,
        "A2": a2,
        "A3": bool(gap <= tol),
        "sup_a": sup,
        "cauchy_gap": gap,
    }


class CriteriaReport(NamedTuple):
    l2_limit_sum: tuple[float, ...]
    deviation_series: tuple[float, ...]
    hints: tuple[str, ...]
    conditions: dict


HINT_BOX = "box-candidate"
HINT_CONC = "concentration-candidate"
HINT_ASYMP = "asymptotic-concentration-candidate"
HINT_WEAK = "weak-only"


def check_criteria(fam: SequenceFamily, limit=None) -> CriteriaReport:
    """Partial sums of ``a_i^2``, the deviations ``sum_i (a_ij - a_i)^2`` and convergence hints.

    Hints are heuristics from finite data, never proofs:

    * ``concentration-candidate`` when the partial sums of ``a_i^2`` have settled;
    * ``box-candidate`` when additionally the deviation series falls towards 0;
    * ``asymptotic-concentration-candidate`` when the limit decays to 0;
    * ``weak-only`` when the limit is not square summable.
    """
    n_max = max(fam.dims)
    if limit is None:
        lim = fam.limit_values(n_max)
    else:
        lim = np.zeros(n_max)
        given = np.asarray(limit, dtype=float)[:n_max]
        lim[: given.size] = given
        if np.any(lim < 0) or not np.all(np.isfinite(lim)):
            raise InvalidArgument("limit must be nonnegative and finite")

    sq_cumsum = np.cumsum(lim**2)
    partial = tuple(float(sq_cumsum[n - 1]) for n in fam.dims)
    deviation = tuple(
        float(np.sum((fam.axes(j) - lim[: fam.dims[j]]) ** 2)) for j in range(len(fam))
    )

    settled = len(partial) >= 2 and (partial[-1] - partial[-2]) <= 1e-3 * max(partial[-1], 1e-300)
    dev = np.array(deviation)
    if dev.max() == 0.0:
        falling = True
    elif dev.size >= 2:
        rho = spearmanr(np.arange(dev.size), dev)[0] if np.ptp(dev) > 0 else 0.0
        falling = bool(rho <= -0.8 and dev[-1] <= 0.5 * dev.max())
    else:
        falling = False
    horizon = lim[: fam.dims[-1]]
    decays = bool(horizon[-1] <= 1e-3 * horizon.max()) if horizon.max() > 0 else True

    hints = []
    if settled and falling:
        hints.append(HINT_BOX)
    if settled:
        hints.append(HINT_CONC)
    else:
        hints.append(HINT_WEAK)
    if decays:
        hints.append(HINT_ASYMP)
    return CriteriaReport(partial, deviation, tuple(hints), check_conditions(fam))
