"""Partial and observable diameters, domination checks and dissipation trends.

The observable diameter is a supremum over all 1-Lipschitz functions and is not
computable; everything here evaluates explicit 1-Lipschitz witnesses
(coordinates, unit-vector projections, distances to anchor points), so the
reported values are certified lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._seeding import make_rng
from .errors import InvalidArgument
from .measures import PointCloud
from .metrics import prokhorov_empirical

__all__ = [
    "DissipationSeries",
    "DominationReport",
    "ObsDiamEstimate",
    "Projection",
    "Scale",
    "check_domination",
    "dissipation_series",
    "obs_diameter_lower",
    "partial_diameter_1d",
    "trend_statistics",
]

Witness = Callable[[np.ndarray], np.ndarray]


def _window(m: int, kappa: float) -> int:
    if not 0 < kappa < 1:
        raise InvalidArgument("kappa must lie in (0, 1)")
    # Guard against (1 - kappa) * m landing a rounding error above an integer.
    return max(1, math.ceil((1.0 - kappa) * m - 1e-9))


def _partial_diameters(values: np.ndarray, kappa: float) -> np.ndarray:
    """Column-wise partial diameters of an ``(m, c)`` array of samples."""
    m = values.shape[0]
    w = _window(m, kappa)
    s = np.sort(values, axis=0)
    return np.min(s[w - 1 :] - s[: m - w + 1], axis=0)


def partial_diameter_1d(samples, kappa: float) -> float:
    """Smallest length of an interval holding at least ``1 - kappa`` of the samples."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidArgument("need at least one sample")
    return float(_partial_diameters(arr[:, None], kappa)[0])


class ObsDiamEstimate(NamedTuple):
    kappa: float
    lower_bound: float
    witness: str


def obs_diameter_lower(
    cloud: PointCloud,
    kappa: float,
    n_directions: int | None = None,
    seed: int = 0,
    n_anchors: int | None = None,
    extra_witnesses: Sequence[tuple[str, Witness]] = (),
) -> ObsDiamEstimate:
    """Lower bound on the ``kappa``-observable diameter from a witness family.

    Candidates, in index order: every coordinate, ``n_directions`` random unit
    vectors, ``n_anchors`` distance-to-sample-point functions, then
    ``extra_witnesses`` (name, function) pairs, which the caller asserts are
    1-Lipschitz.  Ties go to the lowest candidate index.
    """
    pts = cloud.points
    n_directions = cloud.dim if n_directions is None else int(n_directions)
    n_anchors = min(cloud.m, 8) if n_anchors is None else int(n_anchors)
    rng = make_rng(seed, "obs-diameter")

    names: list[str] = [f"coordinate[{i}]" for i in range(cloud.dim)]
    scores = [_partial_diameters(pts, kappa)]

    if n_directions > 0:
        dirs = rng.standard_normal((n_directions, cloud.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        scores.append(_partial_diameters(pts @ dirs.T, kappa))
        names += [f"direction[{i}]" for i in range(n_directions)]

    if n_anchors > 0:
        anchors = rng.choice(cloud.m, size=min(n_anchors, cloud.m), replace=False)
        dist = np.stack([np.linalg.norm(pts - pts[a], axis=1) for a in anchors], axis=1)
        scores.append(_partial_diameters(dist, kappa))
        names += [f"anchor[{int(a)}]" for a in anchors]

    for name, fn in extra_witnesses:
        values = np.asarray(fn(pts), dtype=float).reshape(cloud.m, 1)
        scores.append(_partial_diameters(values, kappa))
        names.append(str(name))

    flat = np.concatenate(scores)
    best = int(np.argmax(flat))
    return ObsDiamEstimate(float(kappa), float(flat[best]), names[best])


# -- domination ----------------------------------------------------------------


@dataclass(frozen=True)
class Projection:
    k: int


@dataclass(frozen=True)
class Scale:
    ratios: tuple[float, ...]


class DominationReport(NamedTuple):
    lip_violation: float
    dP_pushforward: float
    dP_marginal: float


def _embedded_image(map_kind, pts: np.ndarray) -> np.ndarray:
    # Images are kept in R^dim (projection zero-fills the dropped axes) so the
    # distance sums run over identically shaped arrays and compare monotonically.
    if isinstance(map_kind, Projection):
        if not 1 <= map_kind.k <= pts.shape[1]:
            raise InvalidArgument("projection rank out of range")
        out = pts.copy()
        out[:, map_kind.k :] = 0.0
        return out
    if isinstance(map_kind, Scale):
        ratios = np.asarray(map_kind.ratios, dtype=float)
        if ratios.shape != (pts.shape[1],):
            raise InvalidArgument("scale ratios must match the cloud dimension")
        return pts * ratios
    raise InvalidArgument(f"unsupported map {map_kind!r}")


def _image_cloud(map_kind, X: PointCloud, image: np.ndarray) -> PointCloud:
    if isinstance(map_kind, Projection):
        return X.with_points(image[:, : map_kind.k])
    return X.with_points(image)


def check_domination(
    map_kind,
    X: PointCloud,
    y_sampler: Callable[[int, int], PointCloud],
    seed: int,
    n_pairs: int = 2000,
) -> DominationReport:
    """Test whether ``map_kind`` is a 1-Lipschitz, measure-preserving map ``X -> Y``.

    ``y_sampler(m, seed)`` draws the target measure.  ``dP_marginal`` compares
    first coordinates only, which stays informative in high dimension where
    independent clouds are far apart in full Prokhorov distance.
    """
    image = _embedded_image(map_kind, X.points)
    rng = make_rng(seed, "domination-pairs")
    i = rng.integers(0, X.m, size=n_pairs)
    j = rng.integers(0, X.m, size=n_pairs)
    keep = i != j
    src = np.sqrt(np.sum((X.points[i[keep]] - X.points[j[keep]]) ** 2, axis=1))
    dst = np.sqrt(np.sum((image[i[keep]] - image[j[keep]]) ** 2, axis=1))
    nz = src > 0
    violation = float(np.max(dst[nz] / src[nz] - 1.0, initial=0.0))
    violation = max(violation, 0.0)

    fX = _image_cloud(map_kind, X, image)
    Y = y_sampler(X.m, seed)
    if Y.dim != fX.dim:
        raise InvalidArgument("target sampler dimension does not match the map image")
    dP = prokhorov_empirical(fX, Y)
    dP_marg = prokhorov_empirical(fX.with_points(fX.points[:, :1]), Y.with_points(Y.points[:, :1]))
    return DominationReport(violation, dP, dP_marg)


# -- dissipation ---------------------------------------------------------------


class DissipationSeries(NamedTuple):
    lower_bounds: tuple[float, ...]
    witnesses: tuple[str, ...]
    slope: float
    ratio: float


def trend_statistics(values) -> tuple[float, float]:
    """Least-squares slope against the index ``1..len`` and the final/initial ratio."""
    values = np.asarray(values, dtype=float)
    idx = np.arange(1, values.size + 1, dtype=float)
    slope = float(np.polyfit(idx, values, 1)[0]) if values.size > 1 else 0.0
    if values[0] > 0:
        ratio = float(values[-1] / values[0])
    else:
        ratio = 1.0 if values[-1] == 0 else math.inf
    return slope, ratio


def dissipation_series(
    clouds: Sequence[PointCloud],
    kappa: float,
    n_directions: int | None = None,
    seed: int = 0,
) -> DissipationSeries:
    """Observable-diameter lower bounds along a sequence plus a least-squares slope."""
    if not clouds:
        raise InvalidArgument("need at least one cloud")
    estimates = [
        obs_diameter_lower(c, kappa, n_directions=n_directions, seed=seed) for c in clouds
    ]
    values = np.array([e.lower_bound for e in estimates])
    slope, ratio = trend_statistics(values)
    return DissipationSeries(
        tuple(float(v) for v in values), tuple(e.witness for e in estimates), slope, ratio
    )
