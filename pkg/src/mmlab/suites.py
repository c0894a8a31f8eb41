"""Experiment suites: one per quantitative statement being probed.

Every suite fans its (j, trial) tasks out to a thread pool.  Task seeds are
derived from ``(master seed, suite name, j, trial)`` and results are reduced in
index order, so the report does not depend on the worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import spearmanr

from ._seeding import derive_seed
from .config import config_to_dict, parse_config
from .errors import ConfigError
from .families import SequenceFamily, check_criteria
from .measures import (
    EllipsoidKind,
    EllipsoidSpec,
    GaussianSpec,
    RegionSpec,
    project,
    region_mask,
    sample_ellipsoid,
    sample_gaussian,
)
from .metrics import (
    box_upper_bound_details,
    prokhorov_empirical,
    wasserstein_assignment,
    wasserstein_to_point,
)
from .observables import obs_diameter_lower, trend_statistics
from .transport import TransportMapSpec, apply_transport, opnorm_at

__all__ = ["ExperimentReport", "SUITES", "run_suite"]

# Largest sample block drawn at once by the mass-counting suites.
_BLOCK = 2500


@dataclass
class ExperimentReport:
    suite: str
    config: dict
    columns: tuple[str, ...]
    rows: list[tuple]
    aggregates: dict
    seed: int
    notes: tuple[str, ...] = ()
    anchor: str = ""
    wall_clock: float = field(default=0.0, compare=False)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


@dataclass(frozen=True)
class SuiteInfo:
    anchor: str
    runner: Callable


def _fan_out(fn, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _spearman(x, y) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return 0.0
    return float(spearmanr(x, y)[0])


def _profile_axes(profile: str, n: int, scale: float, ratio: float) -> np.ndarray:
    if profile == "round":
        return np.full(n, float(scale))
    return scale * ratio ** np.arange(n, dtype=float)


def _head_axes(head, a: float, n: int) -> np.ndarray:
    axes = np.full(n, float(a))
    axes[: len(head)] = head
    return axes


def _coupled_pair(kind: str, axes: np.ndarray, m: int, seed: int, coupling: str):
    """Ellipsoid samples ``X`` (semiaxes ``sqrt(n-1) axes``) and Gaussian samples ``Y``.

    With ``transport`` coupling ``X`` is the radial transport image of ``Y``, so
    both keep their exact laws while sharing randomness.
    """
    Y = sample_gaussian(GaussianSpec(tuple(axes)), m, seed, "gaussian")
    if coupling == "transport":
        variant = "PhiS" if kind == "surface" else "PhiE"
        X = apply_transport(TransportMapSpec(variant, tuple(axes)), Y)
    else:
        X = sample_ellipsoid(EllipsoidSpec.from_normalized(kind, axes), m, seed, "ellipsoid")
    return X, Y


def _row_seeds(master: int, suite: str, count: int) -> list[int]:
    return [derive_seed(master, suite, j) for j in range(count)]


def _trial_tasks(row_seeds, trials):
    return [(j, t, derive_seed(s, t)) for j, s in enumerate(row_seeds) for t in range(trials)]


def _mean_by_row(results, n_rows, trials) -> list[float]:
    arr = np.asarray(results, dtype=float).reshape(n_rows, trials)
    return [float(v) for v in arr.mean(axis=1)]


# -- suites --------------------------------------------------------------------


def _mb_law(cfg, workers):
    seeds = _row_seeds(cfg.seed, "mb-law", len(cfg.dims))

    def task(item):
        j, _, s = item
        axes = _profile_axes(cfg.profile, cfg.dims[j], cfg.scale, cfg.ratio)
        X, Y = _coupled_pair(cfg.kind, axes, cfg.m, s, cfg.coupling)
        return prokhorov_empirical(project(X, cfg.k), project(Y, cfg.k), tol=cfg.tol)

    dP = _mean_by_row(_fan_out(task, _trial_tasks(seeds, cfg.trials), workers), len(cfg.dims), cfg.trials)
    rows = [(j + 1, n, cfg.k, cfg.m, dP[j], seeds[j]) for j, n in enumerate(cfg.dims)]
    aggregates = {"spearman": _spearman(cfg.dims, dP), "final": dP[-1]}
    notes = (f"coupling={cfg.coupling}; dP averaged over {cfg.trials} trials",)
    return ("j", "n", "k", "m", "dP", "seed"), rows, aggregates, notes


def _sphere_w2(cfg, workers):
    seeds = _row_seeds(cfg.seed, "sphere-w2", len(cfg.dims))

    def task(item):
        j, _, s = item
        axes = _profile_axes(cfg.profile, cfg.dims[j], cfg.scale, cfg.ratio)
        X, Y = _coupled_pair("surface", axes, cfg.m, s, cfg.coupling)
        return wasserstein_assignment(X, Y, p=2) ** 2

    w2 = _mean_by_row(_fan_out(task, _trial_tasks(seeds, cfg.trials), workers), len(cfg.dims), cfg.trials)
    rows = []
    for j, n in enumerate(cfg.dims):
        tail = _profile_axes(cfg.profile, n, cfg.scale, cfg.ratio)[cfg.k :]
        bound = math.sqrt(2.0) / math.e * float(np.sum(tail**2))
        rows.append((j + 1, n, cfg.k, cfg.m, w2[j], bound, seeds[j]))
    excess = max(r[4] - r[5] for r in rows)
    aggregates = {"max_excess": excess}
    notes = ("bound uses the squared tail sum beyond k, truncated at n",)
    return ("j", "n", "k", "m", "w2_sq", "bound", "seed"), rows, aggregates, notes


def _solid_prokhorov(cfg, workers):
    seeds = _row_seeds(cfg.seed, "solid-prokhorov", len(cfg.dims))

    def task(item):
        j, _, s = item
        axes = _profile_axes(cfg.profile, cfg.dims[j], cfg.scale, cfg.ratio)
        X, Y = _coupled_pair("solid", axes, cfg.m, s, cfg.coupling)
        return prokhorov_empirical(X, Y, tol=cfg.tol)

    dP = _mean_by_row(_fan_out(task, _trial_tasks(seeds, cfg.trials), workers), len(cfg.dims), cfg.trials)
    rows = [(j + 1, n, cfg.m, dP[j], seeds[j]) for j, n in enumerate(cfg.dims)]
    aggregates = {"spearman": _spearman(cfg.dims, dP), "final": dP[-1]}
    notes = (f"coupling={cfg.coupling}; dP averaged over {cfg.trials} trials",)
    return ("j", "n", "m", "dP", "seed"), rows, aggregates, notes


def _blocked_fraction(sampler, region, m, seed, stream) -> float:
    hits = 0
    for b, start in enumerate(range(0, m, _BLOCK)):
        cloud = sampler(min(_BLOCK, m - start), seed, f"{stream}-{b}")
        mask, _ = region_mask(cloud, region)
        hits += int(np.count_nonzero(mask))
    return hits / m


def _region_mass(cfg, workers):
    seeds = _row_seeds(cfg.seed, "region-mass", len(cfg.dims))
    D = RegionSpec.D(cfg.N, cfg.eps)

    def task(j):
        n, s = cfg.dims[j], seeds[j]
        axes = _head_axes(cfg.head, cfg.a, n)
        DF = RegionSpec.DcapF(cfg.N, cfg.eps, cfg.theta, tuple(axes))
        gauss = GaussianSpec(tuple(axes))

        def g(m, seed, stream):
            return sample_gaussian(gauss, m, seed, stream)

        def e(kind):
            spec = EllipsoidSpec.from_normalized(kind, axes)
            return lambda m, seed, stream: sample_ellipsoid(spec, m, seed, stream)

        return (
            _blocked_fraction(g, D, cfg.m, s, "gaussian"),
            _blocked_fraction(g, DF, cfg.m, s, "gaussian"),
            _blocked_fraction(e("surface"), D, cfg.m, s, "surface"),
            _blocked_fraction(e("solid"), D, cfg.m, s, "solid"),
        )

    out = _fan_out(task, list(range(len(cfg.dims))), workers)
    rows = [(j + 1, n, cfg.m, *out[j], seeds[j]) for j, n in enumerate(cfg.dims)]
    aggregates = {
        "final_gaussian_DF": out[-1][1],
        "final_surface_D": out[-1][2],
        "final_solid_D": out[-1][3],
    }
    cols = ("j", "n", "m", "gaussian_D", "gaussian_DF", "surface_D", "solid_D", "seed")
    return cols, rows, aggregates, ()


def _lip_points(axes, cfg, seed) -> np.ndarray:
    region = RegionSpec.DcapF(cfg.N, cfg.eps, cfg.theta, tuple(axes))
    gauss = GaussianSpec(tuple(axes))
    found = []
    total = 0
    for b in range(1000):
        cloud = sample_gaussian(gauss, _BLOCK, seed, f"lip-{b}")
        mask, _ = region_mask(cloud, region)
        found.append(cloud.points[mask])
        total += int(mask.sum())
        if total >= cfg.points:
            return np.concatenate(found)[: cfg.points]
    raise RuntimeError("could not collect enough points in the region D and F")


def _lip_check(cfg, workers):
    seeds = _row_seeds(cfg.seed, "lip-check", len(cfg.dims))
    bound = cfg.theta**-2 * (1.0 + cfg.slack)
    chunk = 100
    tasks = []
    points = {}
    for j, n in enumerate(cfg.dims):
        axes = _head_axes(cfg.head, cfg.a, n)
        points[j] = (axes, _lip_points(axes, cfg, seeds[j]))
        tasks += [(j, start) for start in range(0, cfg.points, chunk)]

    def task(item):
        j, start = item
        axes, pts = points[j]
        maps = [TransportMapSpec(v, tuple(axes)) for v in ("PhiE", "PhiS")]
        block = pts[start : start + chunk]
        return [max(opnorm_at(spec, x).value for x in block) for spec in maps]

    out = _fan_out(task, tasks, workers)
    rows = []
    for j, n in enumerate(cfg.dims):
        mine = [o for (jj, _), o in zip(tasks, out) if jj == j]
        op_e = max(o[0] for o in mine)
        op_s = max(o[1] for o in mine)
        worst = max(op_e, op_s)
        c_fit = max((cfg.theta**2 * worst**2 - 1.0) / (cfg.N * cfg.eps), 0.0)
        rows.append((j + 1, n, cfg.points, op_e, op_s, bound, c_fit, seeds[j]))
    aggregates = {
        "max_opnorm": max(max(r[3], r[4]) for r in rows),
        "bound": bound,
        "fitted_C": max(r[6] for r in rows),
    }
    notes = ("fitted_C is the smallest C with opnorm <= sqrt(1 + C N eps) / theta on the sample",)
    cols = ("j", "n", "points", "opnorm_E", "opnorm_S", "bound", "fitted_C", "seed")
    return cols, rows, aggregates, notes


def _dissipation(cfg, workers):
    seeds = _row_seeds(cfg.seed, "dissipation", cfg.steps)

    def task(j):
        axes = np.full(cfg.n, float(cfg.a))
        axes[0] = cfg.base ** (j + 1)
        spec = EllipsoidSpec.from_normalized(cfg.kind, axes)
        cloud = sample_ellipsoid(spec, cfg.m, seeds[j], "ellipsoid")
        est = obs_diameter_lower(cloud, cfg.kappa, n_directions=cfg.n_directions, seed=seeds[j])
        return float(axes[0]), est

    out = _fan_out(task, list(range(cfg.steps)), workers)
    values = [est.lower_bound for _, est in out]
    slope, ratio = trend_statistics(values)
    rows = [
        (j + 1, cfg.n, a1, cfg.m, est.lower_bound, est.witness, seeds[j])
        for j, (a1, est) in enumerate(out)
    ]
    aggregates = {
        "slope": slope,
        "ratio": ratio,
        "strictly_increasing": bool(np.all(np.diff(values) > 0)),
    }
    notes = ("obs_lower is a certified lower bound from explicit 1-Lipschitz witnesses",)
    cols = ("j", "n", "a1", "m", "obs_lower", "witness", "seed")
    return cols, rows, aggregates, notes


def _dirac_w2(cfg, workers):
    seeds = _row_seeds(cfg.seed, "dirac-w2", len(cfg.dims))

    def task(j):
        n = cfg.dims[j]
        axes = np.full(n, math.sqrt(cfg.total / n))
        cloud = sample_ellipsoid(EllipsoidSpec.from_normalized(cfg.kind, axes), cfg.m, seeds[j], "ellipsoid")
        return wasserstein_to_point(cloud, p=2) ** 2

    w2 = _fan_out(task, list(range(len(cfg.dims))), workers)
    rows = [(j + 1, n, cfg.m, w2[j], cfg.total, seeds[j]) for j, n in enumerate(cfg.dims)]
    aggregates = {"final_error": abs(w2[-1] - cfg.total)}
    return ("j", "n", "m", "w2_sq", "limit", "seed"), rows, aggregates, ()


def family_from_config(cfg) -> SequenceFamily:
    limit = tuple(cfg.limit)
    if cfg.generator == "custom-limit" and not limit:
        limit = tuple(cfg.scale * cfg.ratio ** np.arange(max(cfg.dims), dtype=float))
    return SequenceFamily(
        cfg.generator,
        tuple(cfg.dims),
        a=cfg.a,
        scale=cfg.scale,
        ratio=cfg.ratio,
        limit=limit,
        perturbation=cfg.perturbation,
    )


def _box_trend(cfg, workers):
    fam = family_from_config(cfg)
    crit = check_criteria(fam)
    seeds = _row_seeds(cfg.seed, "box-trend", len(fam))

    def task(j):
        n = fam.dims[j]
        X = sample_ellipsoid(EllipsoidSpec.from_normalized(cfg.kind, fam.axes(j)), cfg.m, seeds[j], "ellipsoid")
        Y = sample_gaussian(GaussianSpec(tuple(fam.limit_values(n))), cfg.m, seeds[j], "gaussian")
        return box_upper_bound_details(X, Y, trim=cfg.trim)

    out = _fan_out(task, list(range(len(fam))), workers)
    rows = [
        (j + 1, n, cfg.m, crit.deviation_series[j], b.value, b.distortion, b.removed_fraction, b.prokhorov, seeds[j])
        for j, (n, b) in enumerate(zip(fam.dims, out))
    ]
    aggregates = {"spearman": _spearman(range(len(out)), [b.value for b in out]), "hints": list(crit.hints)}
    notes = (
        "box_bound is an upper bound from a trimmed assignment map; never tight",
        "a non-decreasing trend does not certify non-convergence: upper bounds cannot prove the converse direction",
    )
    cols = ("j", "n", "m", "deviation", "box_bound", "distortion", "removed", "dP", "seed")
    return cols, rows, aggregates, notes


def _criteria(cfg, workers):
    fam = family_from_config(cfg)
    crit = check_criteria(fam)
    rows = [
        (j + 1, n, crit.l2_limit_sum[j], crit.deviation_series[j]) for j, n in enumerate(fam.dims)
    ]
    conditions = {k: (float(v) if isinstance(v, float) else v) for k, v in crit.conditions.items()}
    aggregates = {"hints": list(crit.hints), "conditions": conditions}
    notes = (
        "hints follow the box / concentration / weak trichotomy for ellipsoids approaching Gaussians; heuristics, not proofs",
    )
    return ("j", "n", "l2_limit_sum", "deviation"), rows, aggregates, notes


SUITES: dict[str, SuiteInfo] = {
    "mb-law": SuiteInfo("Maxwell-Boltzmann law: low-dimensional projections of ellipsoids approach Gaussians", _mb_law),
    "sphere-w2": SuiteInfo("W2 between ellipsoid surfaces and Gaussians is controlled by the tail sum of a_i^2", _sphere_w2),
    "solid-prokhorov": SuiteInfo("Prokhorov distance from solid ellipsoids to Gaussians tends to 0", _solid_prokhorov),
    "region-mass": SuiteInfo("the cone region D and the shell F carry almost all mass", _region_mass),
    "lip-check": SuiteInfo("radial transport maps are almost 1/theta^2-Lipschitz on D and F", _lip_check),
    "dissipation": SuiteInfo("unbounded semiaxes make observable diameters diverge", _dissipation),
    "dirac-w2": SuiteInfo("W2 from scaled sphere measures to the Dirac mass tends to the sum of b_i^2", _dirac_w2),
    "box-trend": SuiteInfo("box distance along a square-summable family (upper bound only)", _box_trend),
    "criteria": SuiteInfo("box / concentration / weak convergence trichotomy hints", _criteria),
}


def run_suite(name: str, config=None, workers: int = 1) -> ExperimentReport:
    """Run suite ``name`` with a typed config (or defaults when ``None``)."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    if config is None:
        config = parse_config(name)
    if int(workers) < 1:
        raise ConfigError("workers must be >= 1")
    start = time.perf_counter()
    columns, rows, aggregates, notes = SUITES[name].runner(config, int(workers))
    return ExperimentReport(
        suite=name,
        config=config_to_dict(config),
        columns=tuple(columns),
        rows=[tuple(r) for r in rows],
        aggregates=aggregates,
        seed=int(config.seed),
        notes=tuple(notes),
        anchor=SUITES[name].anchor,
        wall_clock=time.perf_counter() - start,
    )
