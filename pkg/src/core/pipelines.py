"""
Scripted reproductions of the worked examples, and bundle replay.

Every artifact a pipeline stores names the operation that produced it and the
JSON inputs it was called with. Pipelines compute artifacts only through
OPERATIONS, so `replay_bundle` can look the operation up again and compare
the fresh payload with the stored one.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

from src.core import catalog
from src.core.analysis import (
    FixedPointRecord, analyze_fixed_point, critical_set_closed_form, find_critical_points_newton,
    find_two_cycle, real_fixed_points, real_line_summary,
)
from src.core.basin import DiameterTrend, Window, connectivity_probe, render
from src.core.checkers import (
    check_bov_attracting_recipe, check_critical_accumulation, check_critical_values_in_disk,
    check_disconnected_julia_hypotheses, check_disk_self_map, check_f3_basin_chain, check_f3_multipliers,
    check_landing_dichotomy, check_phi_sign_table, check_real_line_structure, check_siegel_heuristic,
    check_unbounded_fatou_component,
)
from src.core.config import OrbitConfig, RenderConfig
from src.core.errors import NumericError, UsageError
from src.core.expr import parse
from src.core.interval import MAX_DEPTH, Interval, cascade_sign, certify_sign
from src.utils.bundle import ExperimentBundle, canonical
from src.utils.image_io import ppm_sha256

logger = logging.getLogger(__name__)

EXAMPLES = ("ex41-attracting", "ex41-2cycle", "ex42", "ex43", "ex44-parabolic", "ex44-siegel")
REPRO_RESOLUTION = 256
PROBE_LADDER = (64, 128, 256)
REPRO_RENDER_ITER = 2000


# Input conversion -----------------------------------------------------------

def as_complex(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def as_real(value):
    z = as_complex(value)
    if z.imag != 0.0:
        raise UsageError(f"Expected a real number, got {z}")
    return z.real


def map_inputs(e):
    return {"map": e.source(), "params": e.params}


def map_from_inputs(inputs):
    params = {name: as_complex(v) for name, v in inputs.get("params", {}).items()}
    return parse(inputs["map"], params)


# Checks by CLI name ---------------------------------------------------------

CHECK_DEFAULTS = {
    "disk-self-map": {"lambda": 0.04},
    "critical-values": {"lambda": 0.04, "radius": 0.5, "k_max": 50},
    "bov-recipe": {"map": "exp(z)", "b": 1.0, "r": 0.5, "epsilon": 0.05, "grid": 128},
    "f3-chain": {"map": catalog.F3_SOURCE},
    "f3-multipliers": {},
    "siegel": {"lambda": None, "max_iter": 10000},
    "phi-sign": {},
    "real-line": {},
    "critical-accumulation": {"c": 1.0, "count": 20, "grid": 128},
    "landing-dichotomy": {"map": catalog.F_LAMBDA_SOURCE, "lambda": 4.0, "bov": 0.0,
                          "window": [1.0, 0.0, 8.0, 8.0], "resolution": 128, "k_max": 32,
                          "min_pixels": 16, "max_iter": 2000},
    "unbounded-component": {"map": catalog.F_LAMBDA_SOURCE, "lambda": 4.0, "bov": 0.0, "center": 0.0,
                            "half_widths": [2.0, 4.0, 8.0], "resolution": 96, "max_iter": 2000},
    "disconnected-julia": {"map": catalog.F_LAMBDA_SOURCE, "lambda": 0.04, "bov": 0.0,
                           "window": [-2.0, 3.0, -12.0, 12.0], "grid": 48, "max_iter": 2000},
}


def _lambda_map(options):
    return parse(options["map"], {"lambda": as_complex(options["lambda"])})


_CHECK_RUNNERS = {
    "disk-self-map": lambda o: check_disk_self_map(as_real(o["lambda"])),
    "critical-values": lambda o: check_critical_values_in_disk(
        as_real(o["lambda"]), as_real(o["radius"]), int(o["k_max"])),
    "bov-recipe": lambda o: check_bov_attracting_recipe(
        parse(o["map"]), as_complex(o["b"]), as_real(o["r"]), as_real(o["epsilon"]), int(o["grid"])),
    "f3-chain": lambda o: check_f3_basin_chain(parse(o["map"])),
    "f3-multipliers": lambda o: check_f3_multipliers(),
    "siegel": lambda o: check_siegel_heuristic(
        None if o["lambda"] is None else as_complex(o["lambda"]), max_iter=int(o["max_iter"])),
    "phi-sign": lambda o: check_phi_sign_table(),
    "real-line": lambda o: check_real_line_structure(),
    "critical-accumulation": lambda o: check_critical_accumulation(
        as_real(o["c"]), int(o["count"]), grid=int(o["grid"])),
    "landing-dichotomy": lambda o: check_landing_dichotomy(
        _lambda_map(o), as_complex(o["bov"]), Window(*o["window"]), int(o["resolution"]),
        int(o["k_max"]), int(o["min_pixels"]), int(o["max_iter"])),
    "unbounded-component": lambda o: check_unbounded_fatou_component(
        _lambda_map(o), as_complex(o["bov"]), as_complex(o["center"]),
        tuple(as_real(w) for w in o["half_widths"]), int(o["resolution"]), int(o["max_iter"])),
    "disconnected-julia": lambda o: check_disconnected_julia_hypotheses(
        _lambda_map(o), as_complex(o["bov"]), tuple(as_real(v) for v in o["window"]), int(o["grid"]),
        int(o["max_iter"])),
}


def resolve_check_options(name, overrides=None):
    """Defaults for `name` with `overrides` applied; unknown option names are rejected."""
    if name not in CHECK_DEFAULTS:
        raise KeyError(f"Unknown check {name!r}; choose from {', '.join(CHECK_DEFAULTS)}")
    options = dict(CHECK_DEFAULTS[name])
    for key, value in (overrides or {}).items():
        if key not in options:
            raise KeyError(f"Check {name!r} has no option {key!r}")
        options[key] = value
    return canonical(options)


def run_check(name, options=None):
    return _CHECK_RUNNERS[name](resolve_check_options(name, options))


# Operations -----------------------------------------------------------------

def _op_real_fixed_points(inputs):
    roots = real_fixed_points(map_from_inputs(inputs), Interval(*inputs["interval"]))
    return {"roots": roots}


def _op_analyze_fixed_point(inputs):
    record = analyze_fixed_point(map_from_inputs(inputs), as_complex(inputs["x0"]),
                                 int(inputs["period"]), provenance=inputs["provenance"])
    return record.to_dict()


def _op_find_two_cycle(inputs):
    record = find_two_cycle(map_from_inputs(inputs), Interval(*inputs["interval"]))
    return record.to_dict() if record else {"found": False}


def _op_critical_closed_form(inputs):
    k_lo, k_hi = inputs["k_range"]
    return critical_set_closed_form(as_complex(inputs["lambda"]), (int(k_lo), int(k_hi))).to_dict()


def _op_critical_newton(inputs):
    cs = find_critical_points_newton(map_from_inputs(inputs), tuple(inputs["window"]), int(inputs["grid"]))
    return cs.to_dict()


def _op_certify_sign(inputs):
    cert = certify_sign(map_from_inputs(inputs), Interval(*inputs["domain"]), int(inputs["max_depth"]))
    return cert.to_dict()


def _op_cascade_sign(inputs):
    cert = cascade_sign(map_from_inputs(inputs), Interval(*inputs["domain"]), int(inputs["order"]),
                        int(inputs["max_depth"]))
    return cert.to_dict()


def _op_check(inputs):
    return run_check(inputs["check"], inputs["options"]).to_dict()


def render_payload(image):
    return {**image.summary(), "ppm_sha256": ppm_sha256(image)}


def _render_config(inputs, workers=None):
    return RenderConfig(OrbitConfig(**inputs["orbit"]), inputs["match_eps"], workers)


def _op_render(inputs, workers=None, progress_callback=None):
    nx, ny = inputs["resolution"]
    image = render(
        map_from_inputs(inputs), Window(*inputs["window"]), (nx, ny),
        [FixedPointRecord.from_dict(r) for r in inputs["attractors"]],
        _render_config(inputs, workers), progress_callback,
    )
    return render_payload(image)


def _op_connectivity_probe(inputs, workers=None, progress_callback=None):
    report = connectivity_probe(
        map_from_inputs(inputs), Window(*inputs["window"]), inputs["resolutions"],
        _render_config(inputs, workers),
        [FixedPointRecord.from_dict(r) for r in inputs["attractors"]], progress_callback,
    )
    return report.to_dict()


def _op_real_line_summary(inputs):
    return real_line_summary(map_from_inputs(inputs))


OPERATIONS: Dict[str, Callable[..., Dict[str, Any]]] = {
    "real_fixed_points": _op_real_fixed_points,
    "analyze_fixed_point": _op_analyze_fixed_point,
    "find_two_cycle": _op_find_two_cycle,
    "critical_set_closed_form": _op_critical_closed_form,
    "find_critical_points_newton": _op_critical_newton,
    "certify_sign": _op_certify_sign,
    "cascade_sign": _op_cascade_sign,
    "check": _op_check,
    "render": _op_render,
    "connectivity_probe": _op_connectivity_probe,
    "real_line_summary": _op_real_line_summary,
}
_PARALLEL_OPERATIONS = {"render", "connectivity_probe"}


def run_operation(operation, inputs, workers=None, progress_callback=None):
    if operation not in OPERATIONS:
        raise KeyError(f"Unknown operation {operation!r}")
    inputs = canonical(inputs)
    if operation in _PARALLEL_OPERATIONS:
        return OPERATIONS[operation](inputs, workers, progress_callback)
    return OPERATIONS[operation](inputs)


# Examples -------------------------------------------------------------------

@dataclass
class ReproResult:
    example: str
    bundle: ExperimentBundle
    criteria: Dict[str, bool] = field(default_factory=dict)
    # criteria the run could not decide either way; they never count as met
    unresolved: List[str] = field(default_factory=list)

    @property
    def accepted(self):
        return bool(self.criteria) and all(self.criteria.values())


class _Run:
    def __init__(self, example, e, with_render, workers, progress_callback):
        self.result = ReproResult(example, ExperimentBundle(e.source(), e.params))
        self.with_render = with_render
        self.workers = workers
        self.progress_callback = progress_callback

    def record(self, name, kind, operation, inputs):
        logger.info(f"[{self.result.example}] {name} ({operation})")
        payload = run_operation(operation, inputs, self.workers, self.progress_callback)
        return self.result.bundle.add(name, kind, operation, inputs, payload).payload

    def check(self, name, check, options=None):
        options = resolve_check_options(check, options)
        report = self.record(name, "HypothesisReport", "check", {"check": check, "options": options})
        self.require(f"{name}: Pass", report["overall"] == "Pass")
        return report

    def render_inputs(self, e, window, attractors, resolution=REPRO_RESOLUTION):
        return {
            **map_inputs(e),
            "window": window,
            "resolution": [resolution, resolution],
            "orbit": OrbitConfig(max_iter=REPRO_RENDER_ITER).to_dict(),
            "match_eps": RenderConfig().match_eps,
            "attractors": attractors,
        }

    def require(self, label, ok):
        self.result.criteria[label] = bool(ok)
        logger.info(f"[{self.result.example}] {'PASS' if ok else 'FAIL'}: {label}")

    def require_trend(self, label, ladder, expected):
        if ladder["trend"] == DiameterTrend.UNRESOLVED.value:
            self.result.unresolved.append(f"{label}: no Julia pixels resolved")
            logger.warning(f"[{self.result.example}] UNRESOLVED: {label} (a rung has no Julia pixels)")
            return
        self.require(label, ladder["trend"] == expected.value)


def _single_root(payload, where):
    roots = payload["roots"]
    if len(roots) != 1:
        raise NumericError(f"Expected one real fixed point {where}, found {roots}")
    return roots[0]


def _fixed_point(run, name, e, interval):
    roots = run.record(f"real fixed points on {interval}", "Summary", "real_fixed_points",
                       {**map_inputs(e), "interval": interval})
    x = _single_root(roots, f"on {interval}")
    return run.record(name, "FixedPointRecord", "analyze_fixed_point",
                      {**map_inputs(e), "x0": [x, 0.0], "period": 1,
                       "provenance": f"sign change on {interval}"})


def _ex41_attracting(run):
    lam = 0.04
    e = catalog.f_lambda(lam)
    rec = _fixed_point(run, "x_lambda", e, [0.0, 1.0])
    m = as_complex(rec["multiplier"])
    run.require("x_lambda is Attracting with real multiplier in (-1, 0)",
                rec["class"] == "Attracting" and -1.0 < m.real < 0.0 and m.imag == 0.0)
    run.check("disk self-map", "disk-self-map", {"lambda": lam})
    run.check("critical values in |z| < 0.5", "critical-values", {"lambda": lam, "radius": 0.5})
    run.record("critical set, k in [-5, 4]", "CriticalSet", "critical_set_closed_form",
               {"lambda": lam, "k_range": [-5, 4]})
    if run.with_render:
        inputs = run.render_inputs(e, [0.0, 0.0, 6.0, 6.0], [rec])
        basin = run.record("basin image", "BasinStats", "render", inputs)
        run.require(">= 99% of pixels in the x_lambda basin", basin["stats"].get("0", 0.0) >= 0.99)
        del inputs["resolution"]
        ladder = run.record("connectivity probe", "ConnectivityReport", "connectivity_probe",
                           {**inputs, "resolutions": list(PROBE_LADDER)})
        run.require_trend("largest Julia component shrinks (ratio < 0.8)", ladder, DiameterTrend.SHRINKING)


def _ex41_two_cycle(run):
    e = catalog.f_lambda(4.0)
    rec = run.record("2-cycle", "FixedPointRecord", "find_two_cycle",
                     {**map_inputs(e), "interval": [0.0, 5.0]})
    if not rec.get("cycle"):
        run.require("2-cycle found on [0, 5]", False)
        return
    a1 = as_complex(rec["location"]).real
    partner = max(as_complex(z).real for z in rec["cycle"])
    run.require("a1 in (0, 1) with residual < 1e-10", 0.0 < a1 < 1.0 and rec["residual"] < 1e-10)
    run.require("cycle partner > 1", partner > 1.0)
    run.require("|(f^2)'(a1)| <= 1 + 1e-9", rec["multiplier_modulus"] <= 1.0 + 1e-9)
    if run.with_render:
        inputs = run.render_inputs(e, [1.0, 0.0, 8.0, 8.0], [rec])
        run.record("basin image", "BasinStats", "render", inputs)
        del inputs["resolution"]
        ladder = run.record("connectivity probe", "ConnectivityReport", "connectivity_probe",
                           {**inputs, "resolutions": list(PROBE_LADDER)})
        run.require_trend("largest Julia component stabilizes (ratio > 0.8)", ladder, DiameterTrend.STABILIZING)


def _ex42(run):
    g, b, r, epsilon = "exp(z)", 1.0, 0.5, 0.05
    run.check("bov recipe", "bov-recipe", {"map": g, "b": b, "r": r, "epsilon": epsilon})
    e = catalog.f2(parse(g), epsilon, b)
    rec = _fixed_point(run, "fixed point of f2", e, [b - r, b + r])
    run.require("fixed point of f2 is Attracting", rec["class"] in ("Attracting", "Superattracting"))
    if run.with_render:
        basin = run.record("basin image", "BasinStats", "render",
                           run.render_inputs(e, [1.0, 0.0, 4.0, 4.0], [rec]))
        run.require("fixed point basin covers most of the window", basin["stats"].get("0", 0.0) > 0.5)


def _ex43(run):
    e = catalog.f3()
    records = [_fixed_point(run, f"attracting fixed point in {name}", e, list(bounds))
               for name, bounds in (("I1", catalog.I1), ("I2", catalog.I2))]
    run.require("two Attracting fixed points", all(r["class"] == "Attracting" for r in records))
    run.check("f3 multipliers", "f3-multipliers")
    run.check("f3 basin chain", "f3-chain")
    cert = run.record("p > 0 on J", "SignCertificate", "cascade_sign",
                      {**map_inputs(catalog.p_poly()), "domain": list(catalog.J), "order": 8,
                       "max_depth": MAX_DEPTH})
    run.require("cascade certifies p > 0 on J", cert["verdict"] == "Positive")
    if run.with_render:
        basin = run.record("basin image", "BasinStats", "render",
                           run.render_inputs(e, [-0.9, 0.0, 3.0, 3.0], records))
        stats = basin["stats"]
        run.require("both basins exceed 5% of the window",
                    stats.get("0", 0.0) > 0.05 and stats.get("1", 0.0) > 0.05)


def _ex44_parabolic(run):
    e = catalog.f4(catalog.PARABOLIC_LAMBDA)
    rec = run.record("fixed point 0", "FixedPointRecord", "analyze_fixed_point",
                     {**map_inputs(e), "x0": [0.0, 0.0], "period": 1, "provenance": "f4(0) = 0"})
    run.require("Parabolic with q = 2 and multiplier -1",
                rec["class"] == "Parabolic" and rec["parabolic_q"] == 2
                and rec["multiplier"] == [-1.0, 0.0])
    if run.with_render:
        run.record("basin image", "BasinStats", "render",
                   run.render_inputs(e, [0.0, 0.0, 4.0, 4.0], [rec]))


def _ex44_siegel(run):
    lam = catalog.siegel_lambda()
    e = catalog.f4(lam)
    rec = run.record("fixed point 0", "FixedPointRecord", "analyze_fixed_point",
                     {**map_inputs(e), "x0": [0.0, 0.0], "period": 1, "provenance": "f4(0) = 0"})
    run.require("IrrationallyIndifferent with | |m| - 1 | < 1e-12",
                rec["class"] == "IrrationallyIndifferent"
                and abs(rec["multiplier_modulus"] - 1.0) < 1e-12)
    run.check("Siegel heuristic", "siegel", {"lambda": lam})
    if run.with_render:
        run.record("basin image", "BasinStats", "render",
                   run.render_inputs(e, [0.0, 0.0, 4.0, 4.0], [rec]))


_PIPELINES = {
    "ex41-attracting": (lambda: catalog.f_lambda(0.04), _ex41_attracting),
    "ex41-2cycle": (lambda: catalog.f_lambda(4.0), _ex41_two_cycle),
    "ex42": (lambda: catalog.f2(parse("exp(z)"), 0.05, 1.0), _ex42),
    "ex43": (catalog.f3, _ex43),
    "ex44-parabolic": (lambda: catalog.f4(catalog.PARABOLIC_LAMBDA), _ex44_parabolic),
    "ex44-siegel": (lambda: catalog.f4(catalog.siegel_lambda()), _ex44_siegel),
}


def repro(example, with_render=True, workers=None, progress_callback=None):
    """Run one worked example end to end; the bundle holds every artifact it produced."""
    if example not in _PIPELINES:
        raise KeyError(f"Unknown example {example!r}; choose from {', '.join(EXAMPLES)}")
    build_map, pipeline = _PIPELINES[example]
    run = _Run(example, build_map(), with_render, workers, progress_callback)
    pipeline(run)
    result = run.result
    logger.info(f"[{example}] {sum(result.criteria.values())}/{len(result.criteria)} criteria met")
    return result


# Replay ---------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayOutcome:
    name: str
    operation: str
    reproduced: bool
    detail: str = ""


def fingerprint(payload):
    return json.dumps(canonical(payload), sort_keys=True, allow_nan=False)


def replay_bundle(bundle, workers=None, progress_callback=None) -> List[ReplayOutcome]:
    """Re-run each artifact's operation and compare payloads byte for byte."""
    outcomes = []
    total = len(bundle.artifacts)
    for i, artifact in enumerate(bundle.artifacts):
        if artifact.operation not in OPERATIONS:
            outcomes.append(ReplayOutcome(artifact.name, artifact.operation, False, "unknown operation"))
            continue
        fresh = run_operation(artifact.operation, artifact.inputs, workers)
        same = fingerprint(fresh) == fingerprint(artifact.payload)
        outcomes.append(ReplayOutcome(artifact.name, artifact.operation, same,
                                      "" if same else "payload differs"))
        if not same:
            logger.warning(f"Artifact {artifact.name!r} did not reproduce")
        if progress_callback:
            progress_callback(100 * (i + 1) / total, f"Replayed {artifact.name}")
    return outcomes
