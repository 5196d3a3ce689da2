import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.core import catalog
from src.core.errors import UnboundParameterError
from src.core.evaluate import (
    STATUS_FINITE, STATUS_OVERFLOW, STATUS_POLE, Finite, Overflow, PoleHit,
    evaluate, evaluate_array, evaluate_real, int_power,
)
from src.core.expr import parse


def test_finite_value():
    assert evaluate(parse("z^2+1"), 2.0) == Finite(5.0)


def test_pole_hit_reports_magnitude():
    e = parse("1/z")
    assert isinstance(evaluate(e, 0.0), PoleHit)
    hit = evaluate(e, 1e-13)
    assert isinstance(hit, PoleHit)
    assert hit.magnitude == pytest.approx(1e-13)
    assert evaluate(e, 1e-11).value == pytest.approx(1e11)


def test_custom_pole_eps():
    assert isinstance(evaluate(parse("1/z"), 1e-4, pole_eps=1e-3), PoleHit)


def test_negative_power_is_a_division():
    assert isinstance(evaluate(parse("z^-3"), 0.0), PoleHit)


def test_overflow_guard():
    assert isinstance(evaluate(parse("z^200"), 10.0), Overflow)
    assert isinstance(evaluate(parse("exp(z)"), 1000.0), Overflow)


def test_pole_takes_precedence_over_overflow():
    assert isinstance(evaluate(parse("exp(z+1000)*(1/z)"), 0.0), PoleHit)


def test_exp_of_large_negative_argument_underflows_quietly():
    assert evaluate(parse("exp(z)"), -1000.0) == Finite(0j)


def test_unbound_parameter_named():
    with pytest.raises(UnboundParameterError) as info:
        evaluate(parse("lambda/(exp(z)+z)"), 0.5)
    assert info.value.name == "lambda"
    assert isinstance(info.value, KeyError)


def test_real_helper_returns_nan_at_pole():
    f = catalog.f()
    x0 = -0.5671432904097838
    assert np.isnan(evaluate_real(parse("1/z"), 0.0))
    assert evaluate_real(f, 0.0) == 1.0
    assert abs(evaluate_real(catalog.exp_plus_z(), x0)) < 1e-15


def test_int_power_matches_python():
    assert int_power(2.0, 10) == 1024.0
    assert int_power(3.0, 1) == 3.0
    assert int_power(1.5 + 0.5j, 5) == pytest.approx((1.5 + 0.5j) ** 5, rel=1e-15)


def test_array_statuses():
    values, status, magnitude = evaluate_array(parse("1/z"), np.array([0.0, 2.0, 1e-300]))
    assert list(status) == [STATUS_POLE, STATUS_FINITE, STATUS_POLE]
    assert values[1] == 0.5
    assert values[0] == 0 and values[2] == 0
    assert magnitude[0] == 0.0


def test_constant_map_broadcasts():
    values, status, _ = evaluate_array(parse("0.3"), np.zeros((2, 3), dtype=complex))
    assert values.shape == (2, 3)
    assert np.all(values == 0.3)
    assert np.all(status == STATUS_FINITE)


def test_overflow_status_in_array():
    _, status, _ = evaluate_array(parse("exp(z)"), np.array([1.0, 800.0]))
    assert list(status) == [STATUS_FINITE, STATUS_OVERFLOW]


@given(st.lists(st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=16))
def test_array_matches_scalar(points):
    e = catalog.f_lambda(0.7)
    values, status, _ = evaluate_array(e, np.array(points, dtype=complex))
    for z, v, s in zip(points, values, status):
        outcome = evaluate(e, z)
        if s == STATUS_FINITE:
            assert isinstance(outcome, Finite)
            assert outcome.value == pytest.approx(complex(v), rel=1e-12, abs=1e-300)
        elif s == STATUS_POLE:
            assert isinstance(outcome, PoleHit)
        else:
            assert isinstance(outcome, Overflow)
