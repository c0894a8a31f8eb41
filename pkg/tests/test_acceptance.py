"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line.

Tolerances are fixed constants below; they are not to be loosened to make a
run pass.
"""

from __future__ import annotations

import functools
import math
import time

import numpy as np
import pytest
from scipy.stats import norm

from mmlab.config import parse_config
from mmlab.measures import GaussianSpec, PointCloud, sample_ball, sample_gaussian, sample_sphere
from mmlab.metrics import (
    DiscretePair,
    gelbrich_w2,
    kyfan_pairs,
    prokhorov_discrete,
    prokhorov_empirical,
    tv_discrete,
    wasserstein_assignment,
)
from mmlab.observables import partial_diameter_1d
from mmlab.report import render_report
from mmlab.suites import SUITES, run_suite
from mmlab.transport import RadialProfile

from oracles import kyfan_by_scan, prokhorov_by_subsets, wasserstein_by_permutations

MB_SPEARMAN_MAX = -0.8
MB_FINAL_MAX = 0.05
MB_SECONDS = 60.0
SPHERE_MOMENT_TOL = 0.02
GELBRICH_REL_TOL = 0.05
GELBRICH_SECONDS = 300.0
RADIAL_TOL = 0.01
W2_MARGIN = 0.02
REGION_MIN = 0.95
LIP_SLACK = 1.05
METRIC_TOL = 1e-9
METRIC_INSTANCES = 200
PARTIAL_DIAM_TOL = 0.02
DISSIPATION_RATIO_MIN = 3.0


def verdict(capsys, label: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, detail


@functools.lru_cache(maxsize=None)
def default_run(suite: str):
    start = time.perf_counter()
    report = run_suite(suite, parse_config(suite), workers=1)
    return report, time.perf_counter() - start


def test_ac01_maxwell_boltzmann_trend(capsys):
    report, seconds = default_run("mb-law")
    cfg = report.config
    assert cfg["dims"] == [50, 200, 1000] and cfg["k"] == 1 and cfg["m"] == 5000
    assert cfg["profile"] == "round" and cfg["scale"] == 1.0 and cfg["kind"] == "surface"
    dP = report.column("dP")
    rho = report.aggregates["spearman"]
    ok = rho <= MB_SPEARMAN_MAX and dP[-1] <= MB_FINAL_MAX and seconds <= MB_SECONDS
    detail = (
        f"dP={[round(v, 4) for v in dP]} spearman={rho:.2f} (<= {MB_SPEARMAN_MAX}) "
        f"final={dP[-1]:.4f} (<= {MB_FINAL_MAX}) time={seconds:.1f}s (<= {MB_SECONDS:.0f}s)"
    )
    verdict(capsys, "AC1 Maxwell-Boltzmann projection trend", ok, detail)


def test_ac02_sphere_second_moment(capsys):
    n = 1000
    x1 = sample_sphere(n, 10**5, seed=2024).points[:, 0]
    value = (n - 1) * float(np.mean(x1**2))
    ok = abs(value - 1.0) <= SPHERE_MOMENT_TOL
    verdict(capsys, "AC2 sphere second moment", ok, f"(n-1)*mean(x1^2)={value:.4f} (1 +- {SPHERE_MOMENT_TOL})")


def test_ac03_gelbrich_cross_check(capsys):
    A, B = GaussianSpec((1.0, 1.0)), GaussianSpec((0.0, 0.0))
    m = 3000
    start = time.perf_counter()
    X = sample_gaussian(A, m, seed=31)
    Y = sample_gaussian(B, m, seed=32)
    empirical = wasserstein_assignment(X, Y, p=2)
    seconds = time.perf_counter() - start
    exact = gelbrich_w2(A, B)
    rel = abs(empirical - exact) / exact
    ok = abs(exact - math.sqrt(2)) <= 1e-15 and rel <= GELBRICH_REL_TOL and seconds <= GELBRICH_SECONDS
    detail = f"W2={empirical:.4f} vs sqrt(2)={exact:.4f} rel={rel:.4f} (<= {GELBRICH_REL_TOL}) time={seconds:.1f}s"
    verdict(capsys, "AC3 Gelbrich formula vs assignment", ok, detail)


def test_ac04_radial_profile_defining_property(capsys):
    n, m = 50, 10**5
    prof = RadialProfile(n)
    gauss = np.linalg.norm(sample_gaussian(GaussianSpec((1.0,) * n), m, seed=41).points, axis=1)
    ball = math.sqrt(n - 1) * sample_ball(n, m, seed=42).norms()
    gaps = []
    for r in (5.0, 7.0, 9.0):
        gaps.append(abs(float(np.mean(gauss <= r)) - float(np.mean(ball <= prof(r)))))
    ok = max(gaps) <= RADIAL_TOL
    verdict(capsys, "AC4 radial profile mass matching", ok, f"|gaps| at r=5,7,9: {[round(g, 4) for g in gaps]} (<= {RADIAL_TOL})")


def test_ac05_surface_w2_tail_bound(capsys):
    report, _ = default_run("sphere-w2")
    cfg = report.config
    assert cfg["dims"] == [500] and cfg["k"] == 3 and cfg["m"] == 2000
    assert cfg["profile"] == "geometric" and cfg["scale"] == 0.5 and cfg["ratio"] == 0.5
    limit = math.sqrt(2) / math.e * 4.0**-3 / 3 + W2_MARGIN
    w2 = report.column("w2_sq")[0]
    verdict(capsys, "AC5 surface-to-Gaussian W2 tail bound", w2 <= limit, f"W2^2={w2:.5f} (<= {limit:.5f})")


def test_ac06_region_masses(capsys):
    report, _ = default_run("region-mass")
    cfg = report.config
    assert (cfg["N"], cfg["eps"], cfg["theta"]) == (3, 0.1, 0.9) and cfg["dims"][-1] == 2000
    # (a2): every axis from index N onward equals a.
    assert len(cfg["head"]) == cfg["N"] - 1
    df = report.column("gaussian_DF")[-1]
    d_surface = report.column("surface_D")[-1]
    ok = df >= REGION_MIN and d_surface >= REGION_MIN
    verdict(capsys, "AC6 cone and shell masses at n=2000", ok, f"gaussian D&F={df:.4f}, surface D={d_surface:.4f} (>= {REGION_MIN})")


def test_ac07_transport_lipschitz_bound(capsys):
    report, _ = default_run("lip-check")
    cfg = report.config
    assert (cfg["N"], cfg["eps"], cfg["theta"], cfg["points"]) == (3, 0.05, 0.9, 1000)
    assert cfg["head"] == [] and cfg["a"] == 1.0
    bound = cfg["theta"] ** -2 * LIP_SLACK
    worst = report.aggregates["max_opnorm"]
    detail = f"max opnorm={worst:.4f} (<= {bound:.4f}) fitted C={report.aggregates['fitted_C']:.4f}"
    verdict(capsys, "AC7 transport operator norms on D&F", worst <= bound, detail)


def _metric_instance(rng: np.random.Generator) -> list[str]:
    bad = []
    # Shared-support discrete pair (plus a third measure for the TV triangle).
    k = int(rng.integers(1, 6))
    support = rng.normal(size=(k, int(rng.integers(1, 3))))
    mu, nu, la = (rng.dirichlet(np.ones(k)) for _ in range(3))
    pair = DiscretePair(support, mu, nu)
    if prokhorov_discrete(pair) > tv_discrete(pair) + METRIC_TOL:
        bad.append("dP > dTV")
    tv = lambda a, b: tv_discrete(DiscretePair(support, a, b))  # noqa: E731
    if tv(mu, nu) > tv(mu, la) + tv(la, nu) + METRIC_TOL:
        bad.append("TV triangle")

    # Equal-size clouds, m <= 5.
    m, dim = int(rng.integers(1, 6)), int(rng.integers(1, 3))
    X, Y, Z = (PointCloud(rng.normal(size=(m, dim))) for _ in range(3))
    dP = lambda a, b: prokhorov_empirical(a, b, tol=0)  # noqa: E731
    dxy = dP(X, Y)
    if abs(dxy - prokhorov_by_subsets(X.points, Y.points)) > METRIC_TOL:
        bad.append("Prokhorov vs subset oracle")
    if dxy != dP(Y, X):
        bad.append("Prokhorov symmetry")
    if dxy > dP(X, Z) + dP(Z, Y) + METRIC_TOL:
        bad.append("Prokhorov triangle")
    w1 = wasserstein_assignment(X, Y, 1)
    w2 = wasserstein_assignment(X, Y, 2)
    if dxy**2 > w1 + METRIC_TOL or w1 > w2 + METRIC_TOL:
        bad.append("dP^2 <= W1 <= W2")
    for p in (1, 2):
        if wasserstein_assignment(X, Y, p) > wasserstein_assignment(X, Z, p) + wasserstein_assignment(Z, Y, p) + METRIC_TOL:
            bad.append(f"W{p} triangle")
    if dP(X, X) != 0.0 or wasserstein_assignment(X, X, 2) != 0.0:
        bad.append("identity of indiscernibles")

    # Assignment vs permutations, m <= 8.
    m8 = int(rng.integers(1, 9))
    p = float(rng.choice([1.0, 2.0, 3.0]))
    A, B = rng.normal(size=(m8, 2)), rng.normal(size=(m8, 2))
    if abs(wasserstein_assignment(PointCloud(A), PointCloud(B), p) - wasserstein_by_permutations(A, B, p)) > METRIC_TOL:
        bad.append("assignment vs permutations")

    # Ky Fan vs exhaustive scan (with ties from rounding).
    d = np.round(rng.exponential(size=int(rng.integers(1, 12))), 1)
    if kyfan_pairs(d) != kyfan_by_scan(d):
        bad.append("Ky Fan vs scan")
    return bad


def test_ac08_metric_property_suite(capsys):
    rng = np.random.default_rng(8_2024)
    violations = []
    for i in range(METRIC_INSTANCES):
        violations += [f"#{i}: {v}" for v in _metric_instance(rng)]
    detail = f"{METRIC_INSTANCES} instances, {len(violations)} violations" + (f" {violations[:5]}" if violations else "")
    verdict(capsys, "AC8 metric property suite", not violations, detail)


def test_ac09_partial_diameter_gaussian(capsys):
    x = sample_gaussian(GaussianSpec((1.0,)), 10**5, seed=9).points[:, 0]
    value = partial_diameter_1d(x, 0.5)
    target = 2 * norm.ppf(0.75)
    ok = abs(value - target) <= PARTIAL_DIAM_TOL
    verdict(capsys, "AC9 partial diameter of N(0,1)", ok, f"{value:.4f} vs {target:.4f} (+- {PARTIAL_DIAM_TOL})")


def test_ac10_dissipation(capsys):
    report, _ = default_run("dissipation")
    cfg = report.config
    assert cfg["base"] == 2.0 and cfg["steps"] == 5
    series = report.column("obs_lower")
    increasing = bool(np.all(np.diff(series) > 0))
    ratio = series[-1] / series[0]
    ok = increasing and ratio > DISSIPATION_RATIO_MIN
    detail = f"series={[round(v, 3) for v in series]} strictly increasing={increasing} ratio={ratio:.2f} (> {DISSIPATION_RATIO_MIN})"
    verdict(capsys, "AC10 dissipation of divergent semiaxes", ok, detail)


@pytest.mark.parametrize("suite", list(SUITES))
def test_ac11_determinism(capsys, suite):
    cfg = parse_config(suite)
    first, _ = default_run(suite)
    texts = {render_report(first, fmt) for fmt in ("csv", "json")}
    for workers in (1, 8):
        again = run_suite(suite, cfg, workers=workers)
        for fmt in ("csv", "json"):
            if render_report(again, fmt) != render_report(first, fmt):
                texts.add(f"{fmt}-w{workers}-differs")
    ok = len(texts) == 2
    verdict(capsys, f"AC11 determinism [{suite}]", ok, "byte-identical csv/json at workers 1 and 8" if ok else str(texts))
