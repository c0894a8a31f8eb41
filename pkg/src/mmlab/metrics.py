"""Distances between probability measures represented by point clouds.

Prokhorov distances of empirical measures are computed through the coupling
characterization: ``d_P(mu, nu) <= eps`` iff some coupling puts mass at most
``eps`` on pairs farther apart than ``eps``.  For a threshold ``eps`` the best
coupling mass on near pairs is a maximum flow on the bipartite graph of pairs
with ``d(x_i, y_j) <= eps``; the distance is located by bisection over the
sorted pair distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog
from scipy.sparse.csgraph import maximum_bipartite_matching, maximum_flow
from scipy.spatial.distance import cdist

from ._seeding import make_rng
from .errors import InvalidArgument
from .measures import GaussianSpec, PointCloud

__all__ = [
    "ASSIGNMENT_LIMIT",
    "BoxBound",
    "CouplingFeasibility",
    "DiscretePair",
    "box_upper_bound",
    "box_upper_bound_details",
    "coupling_feasibility",
    "equalize",
    "gelbrich_w2",
    "kyfan_pairs",
    "prokhorov_discrete",
    "prokhorov_empirical",
    "tv_discrete",
    "wasserstein_1d",
    "wasserstein_assignment",
    "wasserstein_to_point",
]

ASSIGNMENT_LIMIT = 4096
_DIRECT_LIMIT = 4_000_000
_CHUNK = 2_000_000


@dataclass(frozen=True, eq=False)
class DiscretePair:
    """Two weight vectors on a shared finite support."""

    support: np.ndarray
    weights_mu: np.ndarray
    weights_nu: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=float)
        if support.ndim == 1:
            support = support[:, None]
        mu = np.asarray(self.weights_mu, dtype=float)
        nu = np.asarray(self.weights_nu, dtype=float)
        k = support.shape[0]
        if mu.shape != (k,) or nu.shape != (k,):
            raise InvalidArgument("weights must have one entry per support atom")
        for w in (mu, nu):
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise InvalidArgument("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights_mu", mu)
        object.__setattr__(self, "weights_nu", nu)


def tv_discrete(pair: DiscretePair) -> float:
    return 0.5 * float(np.abs(pair.weights_mu - pair.weights_nu).sum())


def kyfan_pairs(distances) -> float:
    """Ky Fan distance of two maps on a uniform ``m``-point space.

    Entry ``i`` is ``d(f(w_i), g(w_i))``.  Returns the least ``eps`` with
    ``#{d_i > eps} / m <= eps``.
    """
    d = np.sort(np.asarray(distances, dtype=float).ravel())
    m = d.size
    if m == 0:
        raise InvalidArgument("need at least one distance")
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise InvalidArgument("distances must be finite and nonnegative")
    # On [d_(k), d_(k+1)) at most m - k entries exceed eps.
    lower = np.concatenate(([0.0], d))
    tail = (m - np.arange(m + 1)) / m
    return float(np.min(np.maximum(lower, tail)))


# -- Prokhorov -------------------------------------------------------------


def _near_pairs(x: np.ndarray, y: np.ndarray, radius: float):
    """All index pairs with ``|x_i - y_j| <= radius`` and their exact distances."""
    mx, my = x.shape[0], y.shape[0]
    if mx * my * x.shape[1] <= _DIRECT_LIMIT:
        dist = cdist(x, y)
        rows, cols = np.nonzero(dist <= radius)
        return rows, cols, dist[rows, cols]

    rows_out, cols_out, d_out = [], [], []
    y_sq = np.einsum("ij,ij->i", y, y)
    step = max(1, _CHUNK // my)
    for start in range(0, mx, step):
        block = x[start : start + step]
        b_sq = np.einsum("ij,ij->i", block, block)
        approx = b_sq[:, None] + y_sq[None, :] - 2.0 * block @ y.T
        slack = 1e-9 * (b_sq[:, None] + y_sq[None, :]) + 1e-12
        r, c = np.nonzero(approx <= radius * radius + slack)
        if r.size == 0:
            continue
        exact = np.linalg.norm(block[r] - y[c], axis=1)
        keep = exact <= radius
        rows_out.append(r[keep] + start)
        cols_out.append(c[keep])
        d_out.append(exact[keep])
    if not rows_out:
        empty = np.array([], dtype=np.intp)
        return empty, empty, np.array([], dtype=float)
    return np.concatenate(rows_out), np.concatenate(cols_out), np.concatenate(d_out)


def _near_pairs_1d(x: np.ndarray, y: np.ndarray, radius: float) -> np.ndarray:
    """Distances of all pairs within ``radius`` on the line (indices not needed)."""
    ys = np.sort(y)
    lo = np.searchsorted(ys, x - radius, side="left")
    hi = np.searchsorted(ys, x + radius, side="right")
    counts = hi - lo
    if counts.sum() == 0:
        return np.array([], dtype=float)
    owner = np.repeat(np.arange(x.size), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    d = np.abs(x[owner] - ys[np.repeat(lo, counts) + offsets])
    return d[d <= radius]


def _greedy_line_matching(xs: np.ndarray, ys: np.ndarray, eps: float) -> int:
    # Two-pointer matching on sorted lines; optimal for equal-width windows.
    i = j = count = 0
    mx, my = len(xs), len(ys)
    while i < mx and j < my:
        diff = xs[i] - ys[j]
        if diff > eps:
            j += 1
        elif -diff > eps:
            i += 1
        else:
            count += 1
            i += 1
            j += 1
    return count


class _MatchingOracle:
    """Largest coupling mass carried by pairs at distance ``<= eps``."""

    def __init__(self, x: np.ndarray, y: np.ndarray, radius: float):
        self.mx, self.my = x.shape[0], y.shape[0]
        self.line = x.shape[1] == 1 and self.mx == self.my
        if self.line:
            self.xs = np.sort(x[:, 0]).tolist()
            self.ys = np.sort(y[:, 0]).tolist()
            self.distances = _near_pairs_1d(x[:, 0], y[:, 0], radius)
        else:
            rows, cols, dist = _near_pairs(x, y, radius)
            order = np.argsort(dist, kind="stable")
            self.rows, self.cols, self.distances = rows[order], cols[order], dist[order]

    def mass(self, eps: float) -> float:
        if self.line:
            return _greedy_line_matching(self.xs, self.ys, eps) / self.mx
        k = int(np.searchsorted(self.distances, eps, side="right"))
        if k == 0:
            return 0.0
        rows, cols = self.rows[:k], self.cols[:k]
        if self.mx == self.my:
            graph = sparse.csr_matrix(
                (np.ones(k, dtype=np.int8), (rows, cols)), shape=(self.mx, self.my)
            )
            match = maximum_bipartite_matching(graph, perm_type="column")
            return float(np.count_nonzero(match >= 0)) / self.mx
        return _flow_mass(rows, cols, self.mx, self.my)


def _flow_mass(rows, cols, mx: int, my: int) -> float:
    # Integer capacities: x-atoms carry my units each, y-atoms mx units each.
    total = mx * my
    if total >= 2**31:
        raise InvalidArgument("clouds too large for the integer flow network")
    source, sink = mx + my, mx + my + 1
    heads = np.concatenate([np.full(mx, source), rows, mx + np.arange(my)])
    tails = np.concatenate([np.arange(mx), mx + cols, np.full(my, sink)])
    caps = np.concatenate(
        [np.full(mx, my), np.full(rows.size, total), np.full(my, mx)]
    ).astype(np.int32)
    graph = sparse.csr_matrix((caps, (heads, tails)), shape=(mx + my + 2, mx + my + 2))
    flow = maximum_flow(graph, source, sink)
    return flow.flow_value / total


class CouplingFeasibility(NamedTuple):
    eps: float
    flow_value: float
    feasible: bool


def coupling_feasibility(X: PointCloud, Y: PointCloud, eps: float) -> CouplingFeasibility:
    """Whether some coupling leaves at most ``eps`` mass on pairs farther than ``eps``."""
    _check_same_dim(X, Y)
    oracle = _MatchingOracle(X.points, Y.points, max(float(eps), 0.0))
    mass = oracle.mass(eps)
    return CouplingFeasibility(float(eps), mass, mass >= 1.0 - eps - 1e-15)


def _check_same_dim(X: PointCloud, Y: PointCloud) -> None:
    if X.dim != Y.dim:
        raise InvalidArgument(f"dimension mismatch: {X.dim} vs {Y.dim}")


def prokhorov_empirical(X: PointCloud, Y: PointCloud, tol: float = 1e-3) -> float:
    """Prokhorov distance between the empirical measures of two clouds.

    Bisects over the sorted pair distances until the bracket is narrower than
    ``tol`` (``tol=0`` gives the exact value) and returns its upper end.
    """
    _check_same_dim(X, Y)
    if tol < 0:
        raise InvalidArgument("tol must be nonnegative")
    x, y = X.points, Y.points
    upper = 1.0
    if X.m == Y.m:
        # Any pairing is a coupling, so its Ky Fan distance bounds d_P.
        upper = min(upper, kyfan_pairs(np.linalg.norm(x - y, axis=1)))
    if upper == 0.0:
        return 0.0

    oracle = _MatchingOracle(x, y, upper)
    return _bisect(oracle.distances, oracle.mass, upper, tol)


def _bisect(distances: np.ndarray, mass, upper: float, tol: float) -> float:
    """Locate the least ``eps`` with ``1 - mass(eps) <= eps`` among the pair distances.

    ``mass(eps)`` is the largest coupling mass on pairs at distance ``<= eps``;
    it is a step function jumping only at pair distances, so on a bracket
    ``[grid[k-1], grid[k])`` the answer is ``min(grid[k], 1 - mass(grid[k-1]))``.
    """
    grid = np.unique(np.concatenate(([0.0], distances, [upper])))
    grid = grid[grid <= upper]

    def gap(i: int) -> float:
        return 1.0 - mass(float(grid[i]))

    g_lo = gap(0)
    if g_lo <= 0.0:
        return 0.0
    lo, hi = 0, grid.size - 1
    while hi - lo > 1 and grid[hi] - grid[lo] > tol:
        mid = (lo + hi) // 2
        g_mid = gap(mid)
        if g_mid <= grid[mid]:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    if hi - lo == 1:
        return float(min(grid[hi], g_lo))
    return float(grid[hi])


def _lp_near_mass(dist: np.ndarray, mu: np.ndarray, nu: np.ndarray, eps: float) -> float:
    """Largest coupling mass on pairs with ``dist <= eps`` (transport LP)."""
    rows, cols = np.nonzero(dist <= eps)
    if rows.size == 0:
        return 0.0
    k = mu.size
    n_edges = rows.size
    # Each edge carries flow; row sums <= mu, column sums <= nu.
    a_ub = np.zeros((2 * k, n_edges))
    a_ub[rows, np.arange(n_edges)] = 1.0
    a_ub[k + cols, np.arange(n_edges)] = 1.0
    res = linprog(-np.ones(n_edges), A_ub=a_ub, b_ub=np.concatenate([mu, nu]), bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"coupling LP failed: {res.message}")
    return float(min(-res.fun, 1.0))


def prokhorov_discrete(pair: DiscretePair, tol: float = 0.0) -> float:
    """Prokhorov distance between two weighted measures on a shared finite support."""
    if tol < 0:
        raise InvalidArgument("tol must be nonnegative")
    dist = cdist(pair.support, pair.support)
    mu, nu = pair.weights_mu, pair.weights_nu
    if np.array_equal(mu, nu):
        return 0.0
    cand = dist[(dist > 0) & (dist <= 1.0)]
    return _bisect(cand, lambda eps: _lp_near_mass(dist, mu, nu, eps), 1.0, tol)


# -- Wasserstein -------------------------------------------------------------


def _check_p(p: float) -> None:
    if not p >= 1:
        raise InvalidArgument("Wasserstein order p must be >= 1")


def wasserstein_1d(xs, ys, p: float = 1.0) -> float:
    """``W_p`` between two uniform measures on the line with equally many atoms."""
    _check_p(p)
    a = np.sort(np.asarray(xs, dtype=float).ravel())
    b = np.sort(np.asarray(ys, dtype=float).ravel())
    if a.size != b.size or a.size == 0:
        raise InvalidArgument("1-D Wasserstein needs two non-empty lists of equal length")
    return float(np.mean(np.abs(a - b) ** p) ** (1.0 / p))


def equalize(X: PointCloud, Y: PointCloud, seed: int) -> tuple[PointCloud, PointCloud]:
    """Subsample the larger cloud, without replacement, to the smaller size."""
    if X.m == Y.m:
        return X, Y
    rng = make_rng(seed, "equalize")
    m = min(X.m, Y.m)
    if X.m > m:
        X = X.with_points(X.points[np.sort(rng.choice(X.m, m, replace=False))])
    else:
        Y = Y.with_points(Y.points[np.sort(rng.choice(Y.m, m, replace=False))])
    return X, Y


def _assignment(X: PointCloud, Y: PointCloud, p: float):
    _check_same_dim(X, Y)
    _check_p(p)
    if X.m != Y.m:
        raise InvalidArgument("assignment needs clouds of equal size; see equalize()")
    if X.m > ASSIGNMENT_LIMIT:
        raise InvalidArgument(f"assignment limited to m <= {ASSIGNMENT_LIMIT}")
    cost = cdist(X.points, Y.points) ** p
    rows, cols = linear_sum_assignment(cost)
    return cols[np.argsort(rows)], float(cost[rows, cols].mean())


def wasserstein_assignment(X: PointCloud, Y: PointCloud, p: float = 2.0) -> float:
    """Exact ``W_p`` between equal-size empirical measures via optimal assignment."""
    _, mean_cost = _assignment(X, Y, p)
    return mean_cost ** (1.0 / p)


def wasserstein_to_point(X: PointCloud, point=None, p: float = 2.0) -> float:
    """``W_p`` between an empirical measure and a Dirac mass (origin by default)."""
    _check_p(p)
    c = np.zeros(X.dim) if point is None else np.asarray(point, dtype=float)
    return float(np.mean(np.linalg.norm(X.points - c, axis=1) ** p) ** (1.0 / p))


def gelbrich_w2(A: GaussianSpec, B: GaussianSpec) -> float:
    """``W_2`` between centered axis-aligned Gaussians (shorter spec padded with zeros)."""
    n = max(A.dim, B.dim)
    return float(np.linalg.norm(A.padded(n) - B.padded(n)))


# -- box distance ------------------------------------------------------------


class BoxBound(NamedTuple):
    value: float
    distortion: float
    removed_fraction: float
    prokhorov: float
    assignment: np.ndarray


def box_upper_bound_details(X: PointCloud, Y: PointCloud, trim: float = 0.1) -> BoxBound:
    """Upper bound on the box distance from an explicit near-isomorphism.

    The map sends ``x_i`` to its ``W_2``-optimal partner in ``Y``.  Points with
    the largest distance distortion are discarded greedily (up to ``trim * m``)
    and the bound is ``3 * max(distortion, discarded mass, d_P(f_* mu_X, mu_Y))``
    at the best stopping point.
    """
    if not 0 <= trim < 0.5:
        raise InvalidArgument("trim must lie in [0, 0.5)")
    if X.m != Y.m:
        raise InvalidArgument("box bound needs clouds of equal size")
    perm, _ = _assignment(X, Y, 2.0)
    image = Y.points[perm]
    dP = prokhorov_empirical(Y.with_points(image), Y, tol=0.0)

    distortion = np.abs(cdist(X.points, X.points) - cdist(image, image))
    m = X.m
    active = np.ones(m, dtype=bool)
    best = (math.inf, 0.0, 0.0)
    for removed in range(int(math.floor(trim * m)) + 1):
        sub = distortion[np.ix_(active, active)]
        row_max = sub.max(axis=1)
        worst = float(row_max.max())
        score = max(worst, removed / m, dP)
        if score < best[0]:
            best = (score, worst, removed / m)
        if worst == 0.0 or removed == int(math.floor(trim * m)):
            break
        idx = np.flatnonzero(active)[int(np.argmax(row_max))]
        active[idx] = False
    return BoxBound(3.0 * best[0], best[1], best[2], dP, perm)


def box_upper_bound(X: PointCloud, Y: PointCloud, trim: float = 0.1) -> float:
    return box_upper_bound_details(X, Y, trim).value
