import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from src.core import catalog
from src.core.config import OrbitConfig
from src.core.evaluate import Finite, Overflow, PoleHit
from src.core.expr import parse
from src.core.orbit import (
    INFINITY, Fate, chordal_distance, iterate_orbit, iterate_orbits, iterate_point, orbit_prefix,
)

finite = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_chordal_distance_symmetric_and_bounded(a, b):
    d = chordal_distance(a, b)
    assert d == pytest.approx(chordal_distance(b, a))
    assert 0.0 <= d <= 2.0 + 1e-12


@given(finite)
def test_chordal_distance_to_infinity(a):
    assert chordal_distance(a, INFINITY) == pytest.approx(2.0 / math.sqrt(1.0 + abs(a) ** 2))
    assert chordal_distance(INFINITY, a) == chordal_distance(a, INFINITY)


def test_chordal_distance_special_values():
    assert chordal_distance(INFINITY, INFINITY) == 0.0
    assert chordal_distance(0, 0) == 0.0
    assert chordal_distance(0, INFINITY) == pytest.approx(2.0)


def test_constant_map_converges():
    result = iterate_orbit(parse("0.3"), 5.0)
    assert result.fate is Fate.CONVERGED
    assert result.period == 1
    assert result.final_point == pytest.approx(0.3)
    assert result.cycle == pytest.approx((0.3,))


def test_escape_index():
    result = iterate_orbit(parse("z^2"), 10.0)
    assert result.fate is Fate.ESCAPED
    assert result.index == 3


def test_seed_at_infinity_escapes_immediately():
    result = iterate_orbit(parse("z^2"), 1e12)
    assert result.fate is Fate.ESCAPED
    assert result.index == 0


def test_overflow_counts_as_escape():
    result = iterate_orbit(parse("exp(z)"), 700.0)
    assert result.fate is Fate.ESCAPED
    assert result.index == 1


def test_pole_hit():
    result = iterate_orbit(parse("1/z"), 0.0)
    assert result.fate is Fate.POLE_HIT
    assert result.index == 0


def test_pole_hit_after_one_step():
    # 2 -> 1 -> 1/(1-1)
    result = iterate_orbit(parse("1/(z-1)"), 2.0)
    assert result.fate is Fate.POLE_HIT
    assert result.index == 1
    assert result.final_point == 1


def test_irrational_rotation_stays_undecided():
    rotation = cmath.exp(2j * math.pi * catalog.GOLDEN_ROTATION)
    e = parse("m*z", {"m": rotation})
    result = iterate_orbit(e, 0.5, OrbitConfig(max_iter=500))
    assert result.fate is Fate.UNDECIDED
    assert result.index is None
    assert result.iterations_used == 499


def test_attracting_fixed_point_of_f_lambda():
    result = iterate_orbit(catalog.f_lambda(0.04), 1.0)
    assert result.fate is Fate.CONVERGED
    assert result.period == 1
    assert result.final_point.real == pytest.approx(0.0372, abs=1e-3)


def test_two_cycle_for_large_lambda():
    result = iterate_orbit(catalog.f_lambda(4.0), 0.3)
    assert result.fate is Fate.CONVERGED
    assert result.period == 2
    low, high = sorted(z.real for z in result.cycle)
    assert 0.2 < low < 0.3
    assert high == pytest.approx(2.68164, abs=1e-4)


def test_batch_matches_single_seeds():
    e = catalog.f_lambda(0.04)
    seeds = [1.0, 2 + 1j, 0.0, -0.5671432904097838, 3 - 4j, 50.0]
    batch = iterate_orbits(e, seeds)
    assert len(batch) == len(seeds)
    for i, seed in enumerate(seeds):
        single = iterate_orbit(e, seed)
        batched = batch.result(i)
        assert (batched.fate, batched.index, batched.period) == (single.fate, single.index, single.period)
        assert batched.final_point == pytest.approx(single.final_point, rel=1e-12)


def test_result_dict():
    data = iterate_orbit(parse("0.3"), 0.0).to_dict()
    assert data["fate"] == "ConvergedToCycle"
    assert data["period"] == 1
    assert data["cycle"] == [[0.3, 0.0]]


def test_iterate_point():
    e = parse("z^2")
    assert iterate_point(e, 3.0, 0) == Finite(3 + 0j)
    assert iterate_point(e, 3.0, 2) == Finite(81 + 0j)
    assert isinstance(iterate_point(parse("1/z"), 0.0, 3), PoleHit)
    assert isinstance(iterate_point(parse("exp(z)"), 700.0, 2), Overflow)


def test_orbit_prefix_stops_at_pole():
    points = orbit_prefix(parse("1/(z-1)"), 2.0, 10)
    # 2 -> 1 -> pole
    assert points == [2 + 0j, 1 + 0j]
    assert len(orbit_prefix(parse("z/2"), 1.0, 5)) == 6


def test_config_validation():
    with pytest.raises(ValueError):
        OrbitConfig(max_iter=0)
    with pytest.raises(ValueError):
        OrbitConfig(conv_eps=0.0)
    assert OrbitConfig().with_overrides(max_iter=5, conv_eps=None).max_iter == 5


def test_seeds_array_shape_is_flattened():
    batch = iterate_orbits(parse("0.3"), np.zeros((2, 2)))
    assert len(batch) == 4
    assert np.all(batch.period == 1)


@pytest.mark.parametrize("lam, seed", [(0.04, 1.0), (0.04, 2 + 1j), (4.0, 0.3), (4.0, 1.5)])
def test_cycle_points_return_to_themselves(lam, seed):
    e = catalog.f_lambda(lam)
    cfg = OrbitConfig()
    result = iterate_orbit(e, seed, cfg)
    assert result.fate is Fate.CONVERGED
    for z in result.cycle:
        back = iterate_point(e, z, result.period)
        assert isinstance(back, Finite)
        assert chordal_distance(back.value, z) < 10 * cfg.conv_eps


@pytest.mark.parametrize("seed", list(np.linspace(0.0, 3.0, 20)))
def test_even_iterates_approach_fixed_point_from_one_side(seed):
    e = catalog.f_lambda(0.04)
    fixed = brentq(lambda x: x - 0.04 / (math.exp(x) + x), 0.0, 1.0, xtol=1e-15)
    evens = [z.real - fixed for z in orbit_prefix(e, seed, 6)[::2]]
    assert len(evens) == 4
    side = np.sign(evens[0])
    assert all(np.sign(d) in (side, 0.0) for d in evens)
    gaps = [abs(d) for d in evens]
    assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))
