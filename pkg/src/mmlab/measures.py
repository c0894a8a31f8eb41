"""Probability measures on ellipsoids and Gaussian spaces, as point clouds.

The uniform measure on a (solid) ellipsoid is obtained as the linear
push-forward of the round measure on the unit sphere or ball under
``x -> (alpha_1 x_1, ..., alpha_n x_n)``.  For the surface this is *not* the
induced surface-area measure.
"""

from __future__ import annotations

import csv
import enum
import io
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._seeding import make_rng
from .errors import InvalidArgument

__all__ = [
    "EllipsoidKind",
    "EllipsoidSpec",
    "GaussianSpec",
    "PointCloud",
    "RegionSpec",
    "linear_scale",
    "project",
    "region_mask",
    "sample_ball",
    "sample_ellipsoid",
    "sample_gaussian",
    "sample_sphere",
]

_HEADER = struct.Struct("<IQ")


class EllipsoidKind(str, enum.Enum):
    SOLID = "solid"
    SURFACE = "surface"


def _as_positive_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgument(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidArgument(f"{name} must be strictly positive and finite")
    return arr


@dataclass(frozen=True)
class EllipsoidSpec:
    """The (solid) ellipsoid with semiaxes ``alpha_1..alpha_n``."""

    kind: EllipsoidKind
    semiaxes: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", EllipsoidKind(self.kind))
        axes = _as_positive_vector(self.semiaxes, "semiaxes")
        if axes.size < 2:
            raise InvalidArgument("an ellipsoid needs dimension n >= 2")
        object.__setattr__(self, "semiaxes", tuple(float(a) for a in axes))

    @classmethod
    def from_normalized(cls, kind, normalized_axes: Sequence[float]) -> "EllipsoidSpec":
        """Ellipsoid with semiaxes ``sqrt(n - 1) * a_i``."""
        a = np.asarray(normalized_axes, dtype=float)
        return cls(kind, tuple(np.sqrt(a.size - 1) * a))

    @property
    def dim(self) -> int:
        return len(self.semiaxes)

    def normalized_axes(self) -> np.ndarray:
        return np.asarray(self.semiaxes) / np.sqrt(self.dim - 1)

    def contains(self, points: np.ndarray, atol: float = 1e-12) -> np.ndarray:
        """Membership test: ``sum x_i^2 / alpha_i^2 <= 1`` (solid) or ``== 1`` (surface)."""
        gauge = np.sum((np.asarray(points) / np.asarray(self.semiaxes)) ** 2, axis=1)
        if self.kind is EllipsoidKind.SOLID:
            return gauge <= 1.0 + atol
        return np.abs(gauge - 1.0) <= atol


@dataclass(frozen=True)
class GaussianSpec:
    """Centered axis-aligned Gaussian with standard deviations ``a_i``.

    Zero entries are allowed and stand for a Dirac mass on that axis.
    """

    stddevs: tuple[float, ...]

    def __post_init__(self):
        arr = np.asarray(self.stddevs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidArgument("stddevs must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidArgument("stddevs must be nonnegative and finite")
        object.__setattr__(self, "stddevs", tuple(float(a) for a in arr))

    @property
    def dim(self) -> int:
        return len(self.stddevs)

    def second_moment(self) -> float:
        return float(np.sum(np.square(self.stddevs)))

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.dim))
        out[: self.dim] = self.stddevs
        return out


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``m`` equally weighted points in ``R^dim``; an empirical probability measure."""

    points: np.ndarray
    seed: int | None = None
    stream: str = ""
    dim: int = field(init=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgument("a point cloud needs m >= 1 points of dim >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", pts.shape[1])

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.m

    def with_points(self, points: np.ndarray) -> "PointCloud":
        return PointCloud(points, seed=self.seed, stream=self.stream)

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    # -- serialization -------------------------------------------------

    def to_bytes(self) -> bytes:
        return _HEADER.pack(self.dim, self.m) + self.points.astype("<f8").tobytes(order="C")

    @classmethod
    def from_bytes(cls, blob: bytes) -> "PointCloud":
        if len(blob) < _HEADER.size:
            raise InvalidArgument("truncated point-cloud header")
        dim, m = _HEADER.unpack_from(blob)
        expected = _HEADER.size + 8 * dim * m
        if len(blob) != expected:
            raise InvalidArgument(f"expected {expected} bytes for {m}x{dim} cloud, got {len(blob)}")
        pts = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(m, dim)
        return cls(pts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.points:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointCloud":
        rows = [[float(v) for v in row] for row in csv.reader(io.StringIO(text)) if row]
        if not rows or len({len(r) for r in rows}) != 1:
            raise InvalidArgument("CSV cloud must have at least one row and a constant width")
        return cls(np.array(rows))

    def save(self, path, fmt: str = "bin") -> None:
        path = Path(path)
        if fmt == "bin":
            path.write_bytes(self.to_bytes())
        elif fmt == "csv":
            path.write_text(self.to_csv())
        else:
            raise InvalidArgument(f"unknown point-cloud format {fmt!r}")

    @classmethod
    def load(cls, path, fmt: str = "bin") -> "PointCloud":
        path = Path(path)
        if fmt == "bin":
            return cls.from_bytes(path.read_bytes())
        if fmt == "csv":
            return cls.from_csv(path.read_text())
        raise InvalidArgument(f"unknown point-cloud format {fmt!r}")


# -- sampling ------------------------------------------------------------


def _check_count(m: int) -> None:
    if int(m) != m or m < 1:
        raise InvalidArgument("sample count m must be a positive integer")


def _unit_directions(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    z = rng.standard_normal((m, n))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    return z / norms


def sample_sphere(n: int, m: int, seed: int, stream: str = "sample") -> PointCloud:
    """Uniform samples on the unit sphere ``S^{n-1}`` (normalized Gaussian vectors)."""
    if int(n) != n or n < 2:
        raise InvalidArgument("sphere dimension n must be >= 2")
    _check_count(m)
    rng = make_rng(seed, stream)
    return PointCloud(_unit_directions(rng, int(n), int(m)), seed=seed, stream=stream)


def sample_ball(n: int, m: int, seed: int, stream: str = "sample") -> PointCloud:
    """Uniform samples in the closed unit ball ``B^n(1)``; radius drawn as ``U**(1/n)``."""
    if int(n) != n or n < 1:
        raise InvalidArgument("ball dimension n must be >= 1")
    _check_count(m)
    rng = make_rng(seed, stream)
    directions = _unit_directions(rng, int(n), int(m))
    radii = rng.random(int(m)) ** (1.0 / n)
    return PointCloud(directions * radii[:, None], seed=seed, stream=stream)


def sample_gaussian(spec: GaussianSpec, m: int, seed: int, stream: str = "sample") -> PointCloud:
    """Samples of the product Gaussian with the given axis standard deviations.

    Uses the same underlying standard normals as :func:`sample_sphere` with an
    equal seed, so the two can be coupled through the radial transport maps.
    """
    _check_count(m)
    rng = make_rng(seed, stream)
    z = rng.standard_normal((int(m), spec.dim))
    pts = z * np.asarray(spec.stddevs)
    pts[:, np.asarray(spec.stddevs) == 0.0] = 0.0
    return PointCloud(pts, seed=seed, stream=stream)


def linear_scale(cloud: PointCloud, semiaxes) -> PointCloud:
    """Apply ``L(x) = (alpha_1 x_1, ..., alpha_n x_n)`` to every point."""
    axes = np.asarray(semiaxes, dtype=float)
    if axes.shape != (cloud.dim,):
        raise InvalidArgument(f"need {cloud.dim} scale factors, got shape {axes.shape}")
    return cloud.with_points(cloud.points * axes)


def sample_ellipsoid(spec: EllipsoidSpec, m: int, seed: int, stream: str = "sample") -> PointCloud:
    if spec.kind is EllipsoidKind.SURFACE:
        base = sample_sphere(spec.dim, m, seed, stream)
    else:
        base = sample_ball(spec.dim, m, seed, stream)
    return linear_scale(base, spec.semiaxes)


def project(cloud: PointCloud, k: int) -> PointCloud:
    """Keep the first ``k`` coordinates."""
    if int(k) != k or not 1 <= k <= cloud.dim:
        raise InvalidArgument(f"projection rank k={k} outside [1, {cloud.dim}]")
    return cloud.with_points(cloud.points[:, : int(k)])


# -- regions ---------------------------------------------------------------


@dataclass(frozen=True)
class RegionSpec:
    """The cone region ``D_{N,eps}``, the shell ``F_theta`` or their intersection.

    ``D_{N,eps}``: nonzero ``x`` with ``|x_j| / |x| < eps`` for ``j = 1..N-1``.
    ``F_theta``: ``|L^{-1} x| >= theta * sqrt(n)`` with ``L`` the diagonal map of
    ``semiaxes``.
    """

    kind: str
    N: int | None = None
    eps: float | None = None
    theta: float | None = None
    semiaxes: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("D", "F", "DcapF"):
            raise InvalidArgument(f"unknown region kind {self.kind!r}")
        if self.kind in ("D", "DcapF"):
            if self.N is None or int(self.N) != self.N or self.N < 1:
                raise InvalidArgument("N must be a positive integer")
            if self.eps is None or not self.eps > 0:
                raise InvalidArgument("eps must be positive")
        if self.kind in ("F", "DcapF"):
            if self.theta is None or not 0 < self.theta < 1:
                raise InvalidArgument("theta must lie in (0, 1)")
            axes = _as_positive_vector(self.semiaxes, "semiaxes")
            object.__setattr__(self, "semiaxes", tuple(float(a) for a in axes))

    @classmethod
    def D(cls, N: int, eps: float) -> "RegionSpec":
        return cls("D", N=N, eps=eps)

    @classmethod
    def F(cls, theta: float, semiaxes) -> "RegionSpec":
        return cls("F", theta=theta, semiaxes=tuple(semiaxes))

    @classmethod
    def DcapF(cls, N: int, eps: float, theta: float, semiaxes) -> "RegionSpec":
        return cls("DcapF", N=N, eps=eps, theta=theta, semiaxes=tuple(semiaxes))


def _cone_mask(points: np.ndarray, N: int, eps: float) -> np.ndarray:
    norms = np.linalg.norm(points, axis=1)
    mask = norms > 0
    if N > 1:
        head = np.abs(points[:, : N - 1])
        mask &= np.all(head < eps * norms[:, None], axis=1)
    return mask


def _shell_mask(points: np.ndarray, theta: float, semiaxes) -> np.ndarray:
    n = points.shape[1]
    gauge = np.linalg.norm(points / np.asarray(semiaxes), axis=1)
    return gauge >= theta * np.sqrt(n)


def region_mask(cloud: PointCloud, region: RegionSpec) -> tuple[np.ndarray, float]:
    """Boolean membership mask and the retained fraction of the cloud."""
    pts = cloud.points
    mask = np.ones(cloud.m, dtype=bool)
    if region.kind in ("D", "DcapF"):
        if region.N > cloud.dim:
            raise InvalidArgument(f"N={region.N} exceeds dimension {cloud.dim}")
        mask &= _cone_mask(pts, int(region.N), float(region.eps))
    if region.kind in ("F", "DcapF"):
        if len(region.semiaxes) != cloud.dim:
            raise InvalidArgument("region semiaxes do not match the cloud dimension")
        mask &= _shell_mask(pts, float(region.theta), region.semiaxes)
    return mask, float(np.count_nonzero(mask)) / cloud.m
