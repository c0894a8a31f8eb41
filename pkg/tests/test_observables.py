import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import norm

from mmlab.errors import InvalidArgument
from mmlab.measures import (
    EllipsoidSpec,
    GaussianSpec,
    PointCloud,
    linear_scale,
    sample_ellipsoid,
    sample_gaussian,
    sample_sphere,
)
from mmlab.observables import (
    Projection,
    Scale,
    check_domination,
    dissipation_series,
    obs_diameter_lower,
    partial_diameter_1d,
    trend_statistics,
)

from oracles import partial_diameter_by_pairs


def test_partial_diameter_examples():
    assert partial_diameter_1d([2.0] * 7, 0.3) == 0.0
    assert partial_diameter_1d([0, 1, 2, 3], 0.5) == 1.0


@given(arrays(np.float64, st.integers(1, 25), elements=st.floats(-10, 10)), st.floats(0.01, 0.99))
@settings(max_examples=200, deadline=None)
def test_partial_diameter_matches_pair_oracle(samples, kappa):
    assert partial_diameter_1d(samples, kappa) == partial_diameter_by_pairs(samples, kappa)


@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-10, 10)), st.floats(0.01, 0.98), st.floats(0.0, 0.01))
@settings(max_examples=100, deadline=None)
def test_partial_diameter_nonincreasing_in_kappa(samples, kappa, step):
    assert partial_diameter_1d(samples, min(kappa + step, 0.99)) <= partial_diameter_1d(samples, kappa)


def test_partial_diameter_rejects_kappa():
    with pytest.raises(InvalidArgument):
        partial_diameter_1d([1.0], 1.0)


def test_one_point_cloud_has_zero_diameter():
    est = obs_diameter_lower(PointCloud(np.ones((1, 3))), 0.2)
    assert est.lower_bound == 0.0


def test_one_dimensional_gaussian_scaling():
    a = 3.0
    est = obs_diameter_lower(sample_gaussian(GaussianSpec((a,)), 20000, seed=1), 0.5)
    assert est.lower_bound == pytest.approx(a * 2 * norm.ppf(0.75), rel=0.03)


def test_round_sphere_matches_gaussian_projection():
    n = 1000
    sphere = sample_sphere(n, 5000, seed=2)
    sphere = sphere.with_points(sphere.points * math.sqrt(n - 1))
    est = obs_diameter_lower(sphere, 0.1, n_directions=32, n_anchors=0, seed=3)
    assert est.lower_bound == pytest.approx(2 * norm.ppf(0.95), rel=0.10)


def test_lower_bound_below_full_diameter_and_equals_witness():
    X = sample_gaussian(GaussianSpec((2.0, 1.0, 0.5)), 300, seed=4)
    est = obs_diameter_lower(X, 0.2, n_directions=10, seed=5)
    full = np.max(np.linalg.norm(X.points[:, None] - X.points[None], axis=2))
    assert est.lower_bound <= full
    if est.witness.startswith("coordinate"):
        i = int(est.witness[len("coordinate[") : -1])
        assert est.lower_bound == partial_diameter_1d(X.points[:, i], 0.2)


def test_monotone_under_lipschitz_image_with_composed_witnesses():
    X = sample_gaussian(GaussianSpec((2.0, 1.0, 1.0)), 400, seed=6)
    ratios = np.array([0.5, 0.9, 0.3])
    Y = linear_scale(X, ratios)
    est_y = obs_diameter_lower(Y, 0.3, n_directions=8, n_anchors=4, seed=7)
    # Every witness g on Y composed with the map is a 1-Lipschitz witness on X.
    rng = np.random.default_rng(8)
    composed = [(f"coord{i}", (lambda p, i=i: (p * ratios)[:, i])) for i in range(3)]
    dirs = rng.normal(size=(8, 3))
    composed += [(f"dir{i}", (lambda p, d=d / np.linalg.norm(d): (p * ratios) @ d)) for i, d in enumerate(dirs)]
    composed += [(f"w{est_y.witness}", _witness_fn(est_y.witness, Y, ratios, seed=7, n_dirs=8))]
    est_x = obs_diameter_lower(X, 0.3, n_directions=8, n_anchors=4, seed=9, extra_witnesses=composed)
    assert est_y.lower_bound <= est_x.lower_bound + 1e-12


def _witness_fn(name, Y, ratios, seed, n_dirs):
    # Rebuild the best Y-witness exactly and compose it with the scaling map.
    from mmlab._seeding import make_rng

    rng = make_rng(seed, "obs-diameter")
    dirs = rng.standard_normal((n_dirs, Y.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    kind, idx = name[:-1].split("[")
    idx = int(idx)
    if kind == "coordinate":
        return lambda p: (p * ratios)[:, idx]
    if kind == "direction":
        return lambda p: (p * ratios) @ dirs[idx]
    anchor = Y.points[idx]
    return lambda p: np.linalg.norm(p * ratios - anchor, axis=1)


def test_domination_projection():
    X = sample_gaussian(GaussianSpec((1.0, 1.0, 1.0)), 500, seed=10)
    rep = check_domination(Projection(2), X, lambda m, s: sample_gaussian(GaussianSpec((1.0, 1.0)), m, s + 1), seed=0)
    assert rep.lip_violation == 0.0
    assert rep.dP_marginal < 0.1


def test_domination_by_coordinate_shrinking():
    n, m = 50, 5000
    beta = np.ones(n)
    alpha = np.full(n, 0.7)
    alpha[:3] = (0.9, 0.8, 0.5)
    X = sample_ellipsoid(EllipsoidSpec("solid", tuple(beta)), m, seed=11)

    def target(size, seed):
        return sample_ellipsoid(EllipsoidSpec("solid", tuple(alpha)), size, seed + 1)

    rep = check_domination(Scale(tuple(alpha / beta)), X, target, seed=12)
    assert rep.lip_violation == 0.0
    assert rep.dP_marginal <= 0.05


def test_domination_detects_expansion():
    X = sample_gaussian(GaussianSpec((1.0, 1.0)), 200, seed=13)
    rep = check_domination(Scale((2.0, 1.0)), X, lambda m, s: sample_gaussian(GaussianSpec((2.0, 1.0)), m, s), seed=0)
    assert rep.lip_violation > 0.0


def test_dissipation_flat_for_identical_clouds():
    X = sample_gaussian(GaussianSpec((1.0, 1.0)), 300, seed=14)
    series = dissipation_series([X, X, X], 0.5, seed=0)
    assert series.slope == pytest.approx(0.0, abs=1e-12)
    assert series.ratio == 1.0


def test_dissipation_linear_growth_in_one_dimension():
    clouds = [sample_gaussian(GaussianSpec((float(j),)), 20000, seed=15 + j) for j in range(1, 6)]
    series = dissipation_series(clouds, 0.5)
    expected = 2 * norm.ppf(0.75) * np.arange(1, 6)
    np.testing.assert_allclose(series.lower_bounds, expected, rtol=0.10)


def test_dissipation_divergent_family():
    n = 50
    clouds = []
    for j in range(1, 6):
        axes = np.ones(n)
        axes[0] = 2.0**j
        clouds.append(sample_ellipsoid(EllipsoidSpec.from_normalized("surface", axes), 2000, seed=20 + j))
    series = dissipation_series(clouds, 0.5, n_directions=16)
    assert np.all(np.diff(series.lower_bounds) > 0)
    assert series.ratio > 3


def test_trend_statistics_zero_start():
    assert trend_statistics([0.0, 0.0]) == (0.0, 1.0)
    assert trend_statistics([0.0, 1.0])[1] == math.inf


@pytest.mark.xfail(
    strict=True,
    reason="two independent 5000-point clouds in R^50 are ~0.7 apart in full Prokhorov distance "
    "whatever the map; the marginal check above carries the measure-preservation test",
)
def test_domination_scaling_full_dimensional_prokhorov():
    n, m = 50, 5000
    alpha = np.full(n, 0.7)
    alpha[:3] = (0.9, 0.8, 0.5)
    X = sample_ellipsoid(EllipsoidSpec("solid", (1.0,) * n), m, seed=11)

    def target(size, seed):
        return sample_ellipsoid(EllipsoidSpec("solid", tuple(alpha)), size, seed + 1)

    assert check_domination(Scale(tuple(alpha)), X, target, seed=12).dP_pushforward <= 0.05
