import numpy as np
import pytest
from hypothesis import given, strategies as st

from kirchhoff_gs.coefficient import (Affine, Constant, CustomCoeff, coeff_from_dict, coeff_to_dict, eval_M,
                                      eval_Mhat, inf_M, polynomial_coeff, validate_M)


def test_point_values():
    assert eval_M(Affine(1.0, 0.5), 4.0) == 3.0
    assert eval_M(Constant(1.0), 123.0) == 1.0
    assert eval_M(Affine(2.0, 0.0), 10.0) == 2.0
    assert eval_Mhat(Affine(1.0, 0.5), 4.0) == 8.0
    for c in (Affine(1.0, 0.5), Constant(2.0), CustomCoeff(lambda t: 1 + t * t)):
        assert eval_Mhat(c, 0.0) == 0.0


def test_custom_primitive_by_quadrature():
    c = CustomCoeff(lambda t: 1.0 + t * t)
    assert abs(eval_Mhat(c, 1.0) - 4.0 / 3.0) <= 1e-10


def test_negative_t_rejected():
    with pytest.raises(ValueError):
        eval_M(Affine(), -1.0)
    with pytest.raises(ValueError):
        eval_Mhat(Constant(), -0.1)


@given(st.floats(0.01, 100.0), st.floats(0.0, 100.0))
def test_affine_passes_all_for_n3(a, b):
    rep = validate_M(Affine(a, b), 3)
    assert rep.ok, rep.passes


@given(st.floats(0.01, 100.0), st.floats(0.0, 100.0))
def test_affine_n4_ratio_nonincreasing(a, b):
    # (a + b t)/t = a/t + b
    rep = validate_M(Affine(a, b), 4)
    assert rep.passes["M1"] and rep.passes["M4"] and rep.passes["M5"]


def test_affine_n5_ratio_grows():
    # (a + b t)/t^(2/3) ~ b t^(1/3) for b > 0
    assert not validate_M(Affine(1.0, 1.0), 5).passes["M5"]


def test_quadratic_coefficient():
    rep = validate_M(polynomial_coeff([1.0, 0.0, 1.0]), 3)
    assert not rep.passes["M3"]
    # (1 + t^2)/t^2 = 1 + 1/t^2 is nonincreasing, so M5 genuinely holds
    assert rep.passes["M5"]
    assert rep.failed() == ["M3"]


def test_n2_checks_only_m1():
    rep = validate_M(Affine(1.0, 1.0), 2)
    assert rep.ok and set(rep.passes) == {"M1"}


def test_validate_rejects_bad_dimension():
    with pytest.raises(ValueError):
        validate_M(Affine(), 1)


@given(st.floats(0.01, 10.0), st.floats(0.0, 10.0))
def test_primitive_monotone_and_derivative(a, b):
    for c in (Affine(a, b), polynomial_coeff([a, b, 0.1])):
        ts = np.logspace(-3, 3, 200)
        Mh = eval_Mhat(c, ts)
        assert np.all(np.diff(Mh) > 0)
        h = 1e-5 * ts
        d = (eval_Mhat(c, ts + h) - eval_Mhat(c, ts - h)) / (2 * h)
        assert np.all(np.abs(d - eval_M(c, ts)) <= 1e-6 * eval_M(c, ts))


def test_inf_M():
    assert inf_M(Affine(0.7, 3.0)) == 0.7
    assert inf_M(polynomial_coeff([2.0, -1.0, 1.0])) == pytest.approx(1.75, rel=1e-3)


@pytest.mark.parametrize("d", [{"family": "affine", "a": 1.0, "b": 0.5}, {"family": "constant", "a": 2.0},
                               {"family": "polynomial", "coeffs": [1.0, 0.0, 1.0]}])
def test_dict_round_trip(d):
    assert coeff_to_dict(coeff_from_dict(d)) == d


def test_dict_rejects_unknown():
    with pytest.raises(ValueError):
        coeff_from_dict({"family": "affine", "a": 1.0, "c": 2.0})
    with pytest.raises(ValueError):
        coeff_from_dict({"family": "cubic"})


@given(st.floats(0.1, 10.0), st.floats(0.0, 10.0), st.sampled_from([3, 4]),
       st.floats(1e-3, 1e3), st.floats(1.0, 1e3))
def test_m5_makes_nehari_gap_nondecreasing(a, b, N, t1, factor):
    # g(t) = Mhat(t) - (1 - 2/N) M(t) t has g' = (2/N) M - (1 - 2/N) M' t >= 0 under (M5)
    c = Affine(a, b)
    t2 = t1 * factor
    g = lambda t: eval_Mhat(c, t) - (1.0 - 2.0 / N) * eval_M(c, t) * t
    assert g(t2) >= g(t1) - 1e-12 * max(1.0, abs(g(t1)))
