import cmath
import math

import pytest

from src.core import catalog
from src.core.analysis import (
    FixedPointRecord, PointClass, analyze_fixed_point, classify_multiplier,
    critical_set_closed_form, find_critical_points_newton, find_poles_newton, find_real_roots,
    find_two_cycle,
    real_fixed_points, real_line_summary,
)
from src.core.errors import ConvergenceError
from src.core.expr import parse
from src.core.interval import Interval

CRITICAL_MAX_MODULUS = 0.04 / math.sqrt(1.0 + math.pi ** 2)


@pytest.mark.parametrize("m, expected, q", [
    (0.0, PointClass.SUPERATTRACTING, None),
    (0.5, PointClass.ATTRACTING, None),
    (-0.0705, PointClass.ATTRACTING, None),
    (2.0, PointClass.REPELLING, None),
    (1.0, PointClass.PARABOLIC, 1),
    (-1.0, PointClass.PARABOLIC, 2),
    (cmath.exp(2j * math.pi / 3), PointClass.PARABOLIC, 3),
    (cmath.exp(2j * math.pi * catalog.GOLDEN_ROTATION), PointClass.IRRATIONALLY_INDIFFERENT, None),
])
def test_classify_multiplier(m, expected, q):
    assert classify_multiplier(m) == (expected, q)


def test_real_roots_of_polynomial():
    roots = find_real_roots(parse("(z-1)*(z+2)*(z-0.5)"), Interval(-3.0, 3.0))
    assert roots == pytest.approx([-2.0, 0.5, 1.0], abs=1e-12)


def test_poles_are_not_roots():
    assert find_real_roots(parse("1/z"), Interval(-1.0, 1.3)) == []


def test_real_fixed_point_near_origin():
    assert real_fixed_points(catalog.f_lambda(0.04), Interval(0.0, 1.0)) == pytest.approx([0.0372], abs=1e-3)


def test_real_line_summary():
    summary = real_line_summary()
    assert summary["pole"] == pytest.approx(-0.5671432904, abs=1e-9)
    assert summary["p"] == pytest.approx(0.4782, abs=0.02)
    assert summary["q"] == pytest.approx(-1.1676, abs=1e-3)
    assert summary["pole_preimage"] == pytest.approx(-1.911, abs=1e-3)
    assert summary["pole"] == pytest.approx(catalog.POLE_APPROX, abs=0.02)
    assert summary["q"] == pytest.approx(catalog.Q_APPROX, abs=0.02)


def test_attracting_fixed_point_record():
    record = analyze_fixed_point(catalog.f_lambda(0.04), 0.04)
    assert record.kind is PointClass.ATTRACTING
    assert record.attracting
    assert record.location.real == pytest.approx(0.0372, abs=1e-4)
    assert record.multiplier.real == pytest.approx(-0.0705, abs=1e-3)
    assert record.residual < 1e-12
    assert record.period == 1


def test_record_dict_round_trip():
    record = analyze_fixed_point(catalog.f_lambda(0.04), 0.04, provenance="test")
    data = record.to_dict()
    assert data["class"] == "Attracting"
    assert data["provenance"] == "test"
    assert FixedPointRecord.from_dict(data) == record


def test_two_cycle_for_large_lambda():
    record = find_two_cycle(catalog.f_lambda(4.0), Interval(0.0, 5.0))
    assert record is not None
    assert record.period == 2
    assert record.location.real == pytest.approx(0.2313385440, abs=1e-8)
    assert record.residual < 1e-10
    partner = record.cycle[1].real
    assert partner == pytest.approx(2.6816402783, abs=1e-8)
    assert abs(record.multiplier) == pytest.approx(0.84863, abs=1e-4)
    assert record.kind is PointClass.ATTRACTING


def test_no_two_cycle_for_small_lambda():
    assert find_two_cycle(catalog.f_lambda(0.04), Interval(0.0, 1.0)) is None


def test_parabolic_fixed_point():
    record = analyze_fixed_point(catalog.f4(catalog.PARABOLIC_LAMBDA), 0.0)
    assert record.kind is PointClass.PARABOLIC
    assert record.parabolic_q == 2
    assert record.multiplier == pytest.approx(-1.0)


def test_siegel_fixed_point():
    record = analyze_fixed_point(catalog.f4(catalog.siegel_lambda()), 0.0)
    assert record.kind is PointClass.IRRATIONALLY_INDIFFERENT
    assert abs(abs(record.multiplier) - 1.0) < 1e-12


def test_newton_failure_raises_with_best_iterate():
    with pytest.raises(ConvergenceError) as info:
        analyze_fixed_point(parse("z+1"), 0.0)
    assert info.value.best_iterate is not None


def test_period_validation():
    with pytest.raises(ValueError):
        analyze_fixed_point(parse("z/2"), 0.0, period=0)


def test_closed_form_critical_set():
    critical = critical_set_closed_form(0.04, (-5, 4))
    assert len(critical) == 10
    assert max(critical.residuals) < 1e-12
    assert max(critical.moduli()) == pytest.approx(CRITICAL_MAX_MODULUS, rel=1e-9)
    assert critical.points[5] == pytest.approx(1j * math.pi)


def test_closed_form_rejects_empty_range():
    with pytest.raises(ValueError):
        critical_set_closed_form(0.04, (3, 2))


def test_newton_critical_search_matches_closed_form():
    critical = find_critical_points_newton(catalog.f_lambda(1.0), (-1.0, 1.0, 0.0, 10.0), 32)
    found = sorted(critical.points, key=lambda z: z.imag)
    assert len(found) == 2
    assert found[0] == pytest.approx(1j * math.pi, abs=1e-8)
    assert found[1] == pytest.approx(3j * math.pi, abs=1e-8)
    assert max(critical.residuals) < 1e-8


def test_newton_grid_validation():
    with pytest.raises(ValueError):
        find_critical_points_newton(catalog.f(), (-1.0, 1.0, 0.0, 1.0), 2)


def test_newton_critical_search_single_real_root():
    critical = find_critical_points_newton(parse("1/(z^2+exp(z))"), (-2.0, 0.0, -1.0, 1.0), 32)
    assert len(critical) == 1
    assert critical.points[0].real == pytest.approx(-0.3517, abs=1e-4)
    assert abs(critical.points[0].imag) < 1e-9


def test_newton_critical_search_without_critical_points():
    assert len(find_critical_points_newton(parse("z"), (-1.0, 1.0, -1.0, 1.0), 8)) == 0


def test_simple_real_pole():
    poles = find_poles_newton(catalog.f_lambda(0.04), (-1.0, 0.0, -0.5, 0.5), 8)
    assert len(poles) == 1
    pole, order = poles[0]
    assert pole.real == pytest.approx(-0.5671432904, abs=1e-9)
    assert abs(pole.imag) < 1e-9
    assert order == pytest.approx(1.0, abs=0.01)


def test_double_pole_order():
    poles = find_poles_newton(parse("1/z^2"), (-1.0, 1.0, -1.0, 1.0), 8)
    assert len(poles) == 1
    pole, order = poles[0]
    assert abs(pole) < 1e-5
    assert order == pytest.approx(2.0, abs=0.01)


def test_map_without_poles():
    assert find_poles_newton(parse("z^2+1"), (-1.0, 1.0, -1.0, 1.0), 8) == []
