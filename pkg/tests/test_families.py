import numpy as np
import pytest

from mmlab.errors import InvalidArgument
from mmlab.families import SequenceFamily, check_conditions, check_criteria


def test_constant_family_has_zero_deviation():
    fam = SequenceFamily("geometric", (5, 10, 20), scale=0.5, ratio=0.5)
    rep = check_criteria(fam)
    assert rep.deviation_series == (0.0, 0.0, 0.0)
    assert "box-candidate" in rep.hints


def test_inverse_index_perturbation_closed_form():
    # a_i = 2^-i, a_ij = a_i + 1/j on i <= n(j) = j: deviation n(j) / j^2 = 1/j.
    dims = tuple(range(1, 41))
    limit = tuple(0.5 ** np.arange(1, 41))
    fam = SequenceFamily("custom-limit", dims, limit=limit, perturbation="inverse-index")
    rep = check_criteria(fam)
    np.testing.assert_allclose(rep.deviation_series, 1.0 / np.arange(1, 41), rtol=1e-12)
    assert "box-candidate" in rep.hints
    assert "concentration-candidate" in rep.hints


def test_round_family_is_weak_only():
    fam = SequenceFamily("round", (10, 100, 1000), a=1.0)
    rep = check_criteria(fam, limit=np.ones(1000))
    assert rep.l2_limit_sum == (10.0, 100.0, 1000.0)
    assert "weak-only" in rep.hints
    assert "box-candidate" not in rep.hints
    assert "asymptotic-concentration-candidate" not in rep.hints


def test_partial_sums_exact():
    fam = SequenceFamily("geometric", (1, 2, 3), scale=1.0, ratio=0.5)
    assert check_criteria(fam).l2_limit_sum == (1.0, 1.25, 1.3125)


def test_explicit_table_and_conditions():
    fam = SequenceFamily("explicit", (2, 3, 3), table=((2.0, 1.0), (2.0, 1.0, 0.5), (2.0, 1.0, 0.5)))
    cond = check_conditions(fam)
    assert cond["A0"] and cond["A1"] and cond["A2"] and cond["A3"]
    assert cond["sup_a"] == 2.0


def test_conditions_detect_violations():
    fam = SequenceFamily("explicit", (3, 2), table=((1.0, 2.0, 0.5), (1.0, 0.9)))
    cond = check_conditions(fam)
    assert not cond["A1"]
    assert not cond["A2"]
    assert cond["cauchy_gap"] == pytest.approx(1.1)
    assert not cond["A3"]


def test_explicit_perturbation_list():
    fam = SequenceFamily("custom-limit", (2, 2), limit=(1.0, 0.5), perturbation=(0.1, 0.0))
    np.testing.assert_allclose(fam.axes(0), [1.1, 0.6])
    np.testing.assert_allclose(fam.axes(1), [1.0, 0.5])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"generator": "nope", "dims": (2,)},
        {"generator": "round", "dims": ()},
        {"generator": "round", "dims": (2,), "a": 0.0},
        {"generator": "explicit", "dims": (2,), "table": ((1.0,),)},
        {"generator": "custom-limit", "dims": (2,), "limit": (1.0, 0.0)},
    ],
)
def test_family_validation(kwargs):
    with pytest.raises(InvalidArgument):
        SequenceFamily(**kwargs)
