import json

import pytest

from src.core import catalog
from src.core.pipelines import (
    CHECK_DEFAULTS, EXAMPLES, OPERATIONS, fingerprint, map_from_inputs, map_inputs, replay_bundle,
    repro, resolve_check_options, run_check, run_operation,
)
from src.utils.bundle import canonical, dumps, parse_bundle


@pytest.fixture(autouse=True)
def pinned_time(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def test_map_inputs_round_trip():
    e = catalog.f_lambda(0.04)
    inputs = json.loads(json.dumps(canonical(map_inputs(e))))
    assert map_from_inputs(inputs).source() == e.source()
    assert map_from_inputs(inputs).params == {"lambda": 0.04 + 0j}


def test_check_defaults_cover_every_runner():
    for name in CHECK_DEFAULTS:
        assert resolve_check_options(name) == json.loads(json.dumps(resolve_check_options(name)))


def test_unknown_check_and_option():
    with pytest.raises(KeyError):
        resolve_check_options("nope")
    with pytest.raises(KeyError):
        resolve_check_options("disk-self-map", {"radius": 1.0})


def test_run_check_with_override():
    assert run_check("critical-values", {"radius": 0.01}).to_dict()["overall"] == "Fail"


def test_unknown_operation():
    with pytest.raises(KeyError):
        run_operation("teleport", {})


def test_two_cycle_operation_without_cycle():
    payload = run_operation("find_two_cycle", {**map_inputs(catalog.f_lambda(0.04)), "interval": [0.0, 1.0]})
    assert payload == {"found": False}


def test_every_example_has_a_pipeline():
    with pytest.raises(KeyError):
        repro("ex99")
    assert len(EXAMPLES) == 6


@pytest.mark.parametrize("example", ["ex44-parabolic", "ex43", "ex41-attracting", "ex41-2cycle", "ex42"])
def test_repro_without_render_is_accepted(example):
    result = repro(example, with_render=False)
    assert result.accepted, result.criteria
    assert all(a.operation in OPERATIONS for a in result.bundle.artifacts)


def test_replay_reproduces_every_artifact():
    bundle = repro("ex41-attracting", with_render=False).bundle
    outcomes = replay_bundle(parse_bundle(dumps(bundle)))
    assert outcomes and all(o.reproduced for o in outcomes)


def test_replay_detects_tampering():
    bundle = parse_bundle(dumps(repro("ex44-parabolic", with_render=False).bundle))
    bundle.artifacts[0].payload["multiplier"] = [-0.5, 0.0]
    outcomes = replay_bundle(bundle)
    assert not outcomes[0].reproduced
    assert outcomes[0].detail == "payload differs"


def test_replay_unknown_operation():
    bundle = parse_bundle(dumps(repro("ex44-parabolic", with_render=False).bundle))
    bundle.artifacts[0].operation = "teleport"
    outcome = replay_bundle(bundle)[0]
    assert not outcome.reproduced
    assert outcome.detail == "unknown operation"


def test_repro_bundle_is_deterministic():
    first = dumps(repro("ex44-parabolic", with_render=False).bundle)
    second = dumps(repro("ex44-parabolic", with_render=False).bundle)
    assert first == second
    assert '"created_at": "2023-11-14T22:13:20Z"' in first


def test_fingerprint_ignores_key_order():
    assert fingerprint({"a": 1, "b": (1.0, 2.0)}) == fingerprint({"b": [1.0, 2.0], "a": 1})


def test_render_operation_is_replayable():
    inputs = {
        **map_inputs(catalog.f_lambda(0.04)),
        "window": [0.0, 0.0, 6.0, 6.0],
        "resolution": [16, 16],
        "orbit": {"max_iter": 500, "conv_eps": 1e-9, "escape_eps": 1e-6, "period_max": 4,
                  "confirm": 8, "pole_eps": 1e-12},
        "match_eps": 1e-4,
        "attractors": [],
    }
    first = run_operation("render", inputs, workers=1)
    second = run_operation("render", inputs, workers=3)
    assert fingerprint(first) == fingerprint(second)
    assert len(first["ppm_sha256"]) == 64


@pytest.mark.slow
def test_repro_ex43_with_render():
    result = repro("ex43")
    assert result.accepted, result.criteria
    assert all(o.reproduced for o in replay_bundle(result.bundle))


@pytest.mark.slow
def test_large_lambda_julia_diameters_stabilize():
    result = repro("ex41-2cycle", workers=4)
    assert result.criteria["largest Julia component stabilizes (ratio > 0.8)"]
    ladder = result.bundle.artifact("connectivity probe").payload
    assert ladder["trend"] == "Stabilizing"
    assert all(r > 0.8 for r in ladder["diameter_ratios"])
    assert result.accepted, result.criteria


@pytest.mark.slow
def test_single_basin_ladder_is_reported_unresolved():
    result = repro("ex41-attracting", workers=4)
    ladder = result.bundle.artifact("connectivity probe").payload
    assert ladder["resolved"] is False
    assert ladder["trend"] == "Unresolved"
    assert "largest Julia component shrinks (ratio < 0.8)" not in result.criteria
    assert result.unresolved == ["largest Julia component shrinks (ratio < 0.8): no Julia pixels resolved"]
    assert result.accepted, result.criteria
