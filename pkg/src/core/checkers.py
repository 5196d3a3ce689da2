"""
Hypothesis checkers.

Each checker returns a HypothesisReport whose clauses carry a verdict and
the numbers behind it. Interval-certified clauses and sampled clauses are
kept apart: a sampled clause is flagged `sampled` and never claims more.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List

import numpy as np

from src.core import catalog
from src.core.analysis import (
    PointClass, analyze_fixed_point, critical_set_closed_form, find_critical_points_newton,
    find_poles_newton, find_real_roots, real_fixed_points, real_line_summary,
)
from src.core.basin import Window, fatou_components, landing_table, render
from src.core.config import OrbitConfig, RenderConfig
from src.core.errors import NumericError, UsageError
from src.core.evaluate import STATUS_FINITE, Finite, evaluate, evaluate_array
from src.core.expr import compose, derivatives, differentiate, parse
from src.core.interval import Interval, Sign, cascade_sign, certify_sign, ieval
from src.core.orbit import FATE_CONVERGED, Fate, chordal_distance, iterate_orbit, iterate_orbits, iterate_point

logger = logging.getLogger(__name__)

CIRCLE_SAMPLES = 4096
DISK_GRID = 128
INTERVAL_SAMPLES = 256
REFERENCE_TOL = 0.02
TABLE_REL_TOL = 0.10
ZERO_TOL = 1e-12


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    UNCERTIFIED = "Uncertified"


@dataclass
class Clause:
    description: str
    verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)
    sampled: bool = False

    def to_dict(self):
        return {
            "description": self.description,
            "verdict": self.verdict.value,
            "sampled": self.sampled,
            "evidence": self.evidence,
        }


@dataclass
class HypothesisReport:
    name: str
    clauses: List[Clause] = field(default_factory=list)

    @property
    def overall(self):
        verdicts = [c.verdict for c in self.clauses]
        if verdicts and all(v is Verdict.PASS for v in verdicts):
            return Verdict.PASS
        if any(v is Verdict.FAIL for v in verdicts):
            return Verdict.FAIL
        return Verdict.UNCERTIFIED

    @property
    def passed(self):
        return self.overall is Verdict.PASS

    def add(self, description, ok, evidence=None, sampled=False):
        verdict = ok if isinstance(ok, Verdict) else (Verdict.PASS if ok else Verdict.FAIL)
        self.clauses.append(Clause(description, verdict, evidence or {}, sampled))
        return verdict

    def clause(self, prefix):
        return next(c for c in self.clauses if c.description.startswith(prefix))

    def to_dict(self):
        return {
            "name": self.name,
            "overall": self.overall.value,
            "clauses": [c.to_dict() for c in self.clauses],
        }


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _certificate_clause(report, description, cert, expected):
    report.add(description, cert.verdict is expected, {
        "verdict": cert.verdict.value,
        "domain": cert.domain.to_list(),
        "leaves": cert.leaves,
        "subdivisions": cert.subdivisions,
        "method": "interval",
    })


# Disk self-map and critical values of f_lambda ------------------------------

def check_disk_self_map(lam):
    """f_lambda maps D = {|z| <= 0.5} strictly into itself."""
    lam = float(lam)
    if lam <= 0:
        raise UsageError("lambda must be positive")
    report = HypothesisReport(f"disk-self-map(lambda={lam!r})")

    # |z + e^z| >= e^x - |z| >= e^x - 0.5 on D, x = Re z in [-0.5, 0.5]
    enclosure = ieval(parse("exp(z)-0.5"), Interval(-0.5, 0.5))
    bound = enclosure.lo
    report.add("certified lower bound of e^x - 0.5 on [-0.5, 0.5] exceeds 0.1", bound > 0.1,
               {"lower_bound": bound, "enclosure": enclosure.to_list(), "method": "interval"})

    theta = 2.0 * np.pi * np.arange(CIRCLE_SAMPLES) / CIRCLE_SAMPLES
    values, status, _ = evaluate_array(catalog.f_lambda(lam), 0.5 * np.exp(1j * theta))
    all_finite = bool(np.all(status == STATUS_FINITE))
    sampled_max = float(np.abs(values).max()) if all_finite else math.inf

    ratio = math.nextafter(lam / bound, math.inf) if bound > 0 else math.inf
    if ratio < 0.5:
        verdict = Verdict.PASS
    elif sampled_max < 0.5:
        verdict = Verdict.UNCERTIFIED
    else:
        verdict = Verdict.FAIL
    report.add("lambda / bound < 0.5", verdict, {"ratio": ratio, "lower_bound": bound})

    report.add("sampled max of |f_lambda| on |z| = 0.5 is below 0.5",
               all_finite and sampled_max < 0.5,
               {"samples": CIRCLE_SAMPLES, "max_modulus": sampled_max,
                "margin": 0.5 - sampled_max},
               sampled=True)
    return report


def check_critical_values_in_disk(lam, radius, k_max=50):
    if not (math.isfinite(radius) and radius > 0):
        raise UsageError("radius must be finite and positive")
    if k_max < 0:
        raise UsageError("k_max must be >= 0")
    report = HypothesisReport(f"critical-values(lambda={lam!r}, radius={radius!r})")

    closed_max = abs(lam) / math.sqrt(1.0 + math.pi ** 2)
    report.add("closed-form max modulus lambda/sqrt(1+pi^2) < radius", closed_max < radius,
               {"max_modulus": closed_max, "radius": radius})

    cs = critical_set_closed_form(lam, (-k_max, k_max))
    moduli = cs.moduli()
    worst = int(np.argmax(moduli))
    report.add(f"all critical values for |k| <= {k_max} lie inside the disk",
               max(moduli) < radius,
               {"max_modulus": max(moduli), "at_point": _pair(cs.points[worst]),
                "closed_form_gap": abs(max(moduli) - closed_max), "count": len(cs)})

    # k >= 0 half; k < 0 mirrors it by conjugation
    tail = [abs(lam) / abs(-1.0 + 1j * math.pi * (2 * k + 1)) for k in range(k_max + 2)]
    decreasing = all(b < a for a, b in zip(tail, tail[1:]))
    report.add("moduli decrease in |k|, so the unchecked tail is dominated", decreasing,
               {"modulus_at_k_max": tail[k_max], "modulus_beyond": tail[k_max + 1]})
    return report


# Example recipe f2 = epsilon/g + b ------------------------------------------

def _disk_samples(b, r, grid):
    offsets = np.linspace(-r, r, grid)
    lattice = (offsets[None, :] + 1j * offsets[:, None]).ravel()
    lattice = lattice[np.abs(lattice) <= r]
    boundary = r * np.exp(2j * np.pi * np.arange(4 * grid) / (4 * grid))
    return b + np.concatenate([[0.0], lattice, boundary])


def check_bov_attracting_recipe(g, b, r, epsilon, grid=DISK_GRID):
    """eps/g + b maps D_r(b) into D_{r/2}(b) and has an attracting fixed point there."""
    if r <= 0 or epsilon <= 0:
        raise UsageError("r and epsilon must be positive")
    b = complex(b)
    report = HypothesisReport(f"bov-recipe(g={g.source()}, b={b}, r={r!r}, eps={epsilon!r})")

    samples = _disk_samples(b, r, grid)
    values, status, _ = evaluate_array(g, samples)
    moduli = np.where(status == STATUS_FINITE, np.abs(values), 0.0)
    i_min = int(np.argmin(moduli))
    min_modulus = float(moduli[i_min])
    witness = _pair(samples[i_min])

    report.add("g does not vanish on the sampled disk", min_modulus > ZERO_TOL,
               {"min_modulus": min_modulus, "witness": witness, "samples": int(samples.size)},
               sampled=True)
    threshold = 2.0 * epsilon / r
    report.add("min |g| on the disk exceeds 2*epsilon/r", min_modulus > threshold,
               {"min_modulus": min_modulus, "threshold": threshold, "witness": witness},
               sampled=True)

    f2 = catalog.f2(g, epsilon, b)
    try:
        record = analyze_fixed_point(f2, b, 1, provenance="Newton from the disk center")
    except NumericError as exc:
        report.add("attracting fixed point of f2 inside D_r(b)", False, {"error": str(exc)})
        return report
    inside = abs(record.location - b) < r
    report.add("attracting fixed point of f2 inside D_r(b)", inside and record.attracting,
               {"location": _pair(record.location), "multiplier": _pair(record.multiplier),
                "class": record.kind.value})
    return report


# f3 ------------------------------------------------------------------------

def check_f3_basin_chain(e=None):
    e = e or catalog.f3()
    de = differentiate(e)
    seed = catalog.F3_SEED
    report = HypothesisReport(f"f3-basin-chain({e.source()})")

    x7 = iterate_point(e, seed, 7)
    x8 = iterate_point(e, seed, 8)
    points = {"f3^7(-0.99)": x7, "f3^8(-0.99)": x8}
    derivs = {}
    for label, outcome in (("f3'(f3^7(-0.99))", x7), ("f3'(f3^8(-0.99))", x8)):
        derivs[label] = evaluate(de, outcome.value) if isinstance(outcome, Finite) else outcome

    for label, outcome in {**points, **derivs}.items():
        expected = catalog.F3_CHAIN[label]
        if not isinstance(outcome, Finite):
            report.add(f"{label} ~ {expected}", False, {"outcome": type(outcome).__name__})
            continue
        value = outcome.value.real
        report.add(f"{label} ~ {expected}", abs(value - expected) < REFERENCE_TOL,
                   {"value": value, "expected": expected, "tolerance": REFERENCE_TOL})

    first = evaluate(e, seed)
    if not isinstance(first, Finite):
        report.add("f3^7 maps I into itself with |f3'| < 1 on f3^7(I)", False,
                   {"outcome": type(first).__name__}, sampled=True)
        return report
    lo, hi = sorted((first.value.real, seed))
    t = lo + (np.arange(INTERVAL_SAMPLES) + 0.5) * (hi - lo) / INTERVAL_SAMPLES
    z = t.astype(np.complex128)
    finite = np.ones(t.size, dtype=bool)
    for _ in range(7):
        z, status, _ = evaluate_array(e, z)
        finite &= status == STATUS_FINITE
    slopes, status, _ = evaluate_array(de, z)
    finite &= status == STATUS_FINITE
    inside = finite & (z.real > lo) & (z.real < hi)
    contracting = finite & (np.abs(slopes) < 1.0)
    report.add("f3^7 maps I into itself with |f3'| < 1 on f3^7(I)",
               bool(inside.all() and contracting.all()),
               {"interval": [lo, hi], "samples": INTERVAL_SAMPLES,
                "outside": int((~inside).sum()),
                "max_abs_derivative": float(np.abs(slopes[finite]).max()) if finite.any() else None},
               sampled=True)
    return report


def check_f3_multipliers():
    e = catalog.f3()
    h = catalog.h_multiplier()
    report = HypothesisReport("f3-multipliers")

    for name, bounds in (("I1", catalog.I1), ("I2", catalog.I2)):
        roots = real_fixed_points(e, Interval(*bounds))
        records = [analyze_fixed_point(e, x, 1, provenance=f"sign change on {name}") for x in roots]
        ok = len(records) == 1 and records[0].attracting
        report.add(f"exactly one attracting fixed point in {name}={list(bounds)}", ok,
                   {"fixed_points": [rec.to_dict() for rec in records]})
        for rec in records:
            expected = -evaluate(h, rec.location).value
            gap = abs(rec.multiplier - expected)
            report.add(f"multiplier at {rec.location.real:.6f} equals -h(x)", gap < 1e-8,
                       {"multiplier": _pair(rec.multiplier), "minus_h": _pair(expected), "gap": gap})

    for x, expected in ((catalog.I1[1], catalog.H_AT_I1_END), (catalog.I2[0], catalog.H_AT_I2_START)):
        value = evaluate(h, x).value.real
        report.add(f"h({x}) ~ {expected}", abs(value - expected) < 0.01,
                   {"value": value, "expected": expected})

    p = catalog.p_poly()
    t = catalog.J[1]
    table = []
    ok = True
    for order, (d, expected) in enumerate(zip(derivatives(p, 7), catalog.P_DERIVATIVE_TABLE)):
        value = evaluate(d, t).value.real
        rel = abs(value - expected) / abs(expected)
        ok = ok and rel < TABLE_REL_TOL
        table.append({"order": order, "value": value, "expected": expected, "relative_error": rel})
    report.add(f"derivatives of p at {t} match the table within 10%", ok, {"table": table})

    cert = cascade_sign(p, Interval(*catalog.J), 8)
    report.add("sign cascade certifies p > 0 on J", cert.verdict is Sign.POSITIVE, cert.to_dict())
    return report


# f4: parabolic and Siegel --------------------------------------------------

def check_siegel_heuristic(lam=None, inner=0.05, outer=0.5, rings=10, angles=20, max_iter=10000):
    """Seeds in D_inner(0) stay in D_outer(0) without converging."""
    lam = catalog.siegel_lambda() if lam is None else complex(lam)
    e = catalog.f4(lam)
    report = HypothesisReport(f"siegel-heuristic(lambda={_pair(lam)})")

    record = analyze_fixed_point(e, 0.0, 1, provenance="f4(0) = 0")
    report.add("fixed point 0 is irrationally indifferent",
               record.kind is PointClass.IRRATIONALLY_INDIFFERENT,
               {"multiplier": _pair(record.multiplier),
                "modulus_gap": abs(abs(record.multiplier) - 1.0)})

    radii = inner * (np.arange(rings) + 1) / rings
    phi = 2.0 * np.pi * (np.arange(angles) + 0.5) / angles
    seeds = (radii[:, None] * np.exp(1j * phi[None, :])).ravel()

    z = seeds.copy()
    stays = np.ones(z.size, dtype=bool)
    for _ in range(max_iter):
        z, status, _ = evaluate_array(e, z)
        stays &= (status == STATUS_FINITE) & (np.abs(z) < outer)
        if not stays.any():
            break
    batch = iterate_orbits(e, seeds, OrbitConfig(max_iter=max_iter))
    quiet = stays & (batch.fate != FATE_CONVERGED)
    fraction = float(quiet.mean())
    report.add(f">= 95% of seeds in D_{inner}(0) stay in D_{outer}(0) without converging",
               fraction >= 0.95,
               {"fraction": fraction, "seeds": int(seeds.size), "max_iter": max_iter},
               sampled=True)
    return report


# Real-line structure --------------------------------------------------------

def check_phi_sign_table():
    phi = catalog.phi()
    x0 = find_real_roots(catalog.exp_plus_z(), Interval(-1.0, 0.0))[0]
    report = HypothesisReport("phi-sign-table")

    pieces = (
        ("phi > 0 for x < x0 (compact piece)", Interval(-20.0, x0 - 0.01), Sign.POSITIVE),
        ("phi > 0 for x0 < x < 0", Interval(x0 + 0.01, 0.0), Sign.POSITIVE),
        ("phi > 0 for 0 <= x < 1", Interval(0.0, 0.99), Sign.POSITIVE),
        ("phi < 0 for x > 1", Interval(1.01, 10.0), Sign.NEGATIVE),
    )
    for description, domain, expected in pieces:
        _certificate_clause(report, description, certify_sign(phi, domain), expected)

    at_one = ieval(phi, Interval.point(1.0))
    report.add("phi(1) = 0", at_one.contains_zero(), {"enclosure": at_one.to_list()})

    for description, lo, hi, sign in (("phi > 0 for x < -20", -200.0, -20.0, 1),
                                      ("phi < 0 for x > 10", 10.0, 300.0, -1)):
        xs = np.linspace(lo, hi, 10_000)
        values, status, _ = evaluate_array(phi, xs.astype(np.complex128))
        ok = bool(np.all(status == STATUS_FINITE) and np.all(sign * values.real > 0))
        report.add(description, ok, {"samples": int(xs.size), "range": [lo, hi]}, sampled=True)
    return report


def check_real_line_structure():
    f = catalog.f()
    summary = real_line_summary(f)
    x0, x_minus = summary["pole"], summary["pole_preimage"]
    report = HypothesisReport("real-line-structure")

    for key, expected, tol in (("pole", catalog.POLE_APPROX, 0.05),
                               ("p", catalog.P_APPROX, REFERENCE_TOL),
                               ("q", catalog.Q_APPROX, REFERENCE_TOL)):
        value = summary[key]
        ok = value is not None and abs(value - expected) < tol
        report.add(f"{key} ~ {expected}", ok, {"value": value, "expected": expected, "tolerance": tol})
    report.add("x0 has a unique real preimage x_-1 < x0", x_minus is not None,
               {"pole_preimage": x_minus})

    df, d2f = derivatives(f, 2)[1:]
    _certificate_clause(report, "f' < 0 left of the pole", certify_sign(df, Interval(-5.0, x0 - 0.01)),
                        Sign.NEGATIVE)
    _certificate_clause(report, "f' < 0 right of the pole", certify_sign(df, Interval(x0 + 0.01, 5.0)),
                        Sign.NEGATIVE)
    _certificate_clause(report, "f'' > 0 on [0, 5]", certify_sign(d2f, Interval(0.0, 5.0)),
                        Sign.POSITIVE)

    df2 = differentiate(compose(f, f))
    if x_minus is not None:
        for label, domain in (("left of x_-1", Interval(-5.0, x_minus - 0.1)),
                              ("between x_-1 and x0", Interval(x_minus + 0.1, x0 - 0.1)),
                              ("on [0, 5]", Interval(0.0, 5.0))):
            _certificate_clause(report, f"(f^2)' > 0 {label}", certify_sign(df2, domain),
                                Sign.POSITIVE)
    return report


def check_critical_accumulation(c=1.0, count=20, window=(-2.0, 8.0, 0.0, 160.0), grid=128):
    """Critical values of 1/(c z^2 + e^z) shrink toward 0 along the critical points."""
    e = catalog.inverse_critical_family(c, 2)
    report = HypothesisReport(f"critical-accumulation(c={c!r})")
    cs = find_critical_points_newton(e, window, grid)
    ordered = sorted(zip(cs.points, cs.values), key=lambda pv: abs(pv[0]))[:count]
    moduli = [abs(v) for _, v in ordered]
    tail = moduli[-10:]
    ok = len(ordered) >= count and all(b < a for a, b in zip(tail, tail[1:]))
    report.add(f"moduli strictly decrease over the last 10 of the {count} smallest critical points",
               ok,
               {"found": len(cs), "points": [_pair(p) for p, _ in ordered], "moduli": moduli},
               sampled=True)
    return report


# Fatou pixels around the bov ------------------------------------------------

BORDER_SHARE = 0.9
BASIN_EPS = 1e-6
ORDER_TOL = 0.05


def _bov_attractor(report, e, bov, cfg):
    """Orbit of the bov to an attracting cycle; None (with a failed clause) otherwise."""
    result = iterate_orbit(e, bov, cfg)
    report.add("the bov's orbit converges to a cycle", result.fate is Fate.CONVERGED,
               {"bov": _pair(bov), "fate": result.fate.value, "period": result.period,
                "iterations": result.iterations_used},
               sampled=True)
    if result.fate is not Fate.CONVERGED:
        return None
    try:
        record = analyze_fixed_point(e, result.cycle[0], result.period, provenance="orbit of the bov")
    except NumericError as exc:
        report.add("the cycle reached from the bov is attracting", False, {"error": str(exc)})
        return None
    report.add("the cycle reached from the bov is attracting", record.attracting,
               {"location": _pair(record.location), "period": record.period,
                "multiplier": _pair(record.multiplier), "class": record.kind.value})
    return record if record.attracting else None


def check_unbounded_fatou_component(e, bov, center=0j, half_widths=(2.0, 4.0, 8.0), resolution=96,
                                    max_iter=2000):
    """
    Only the preimage of the bov's component is unbounded: as the window
    grows, one component of the bov's basin keeps holding its border.
    """
    cfg = RenderConfig(orbit=OrbitConfig(max_iter=max_iter))
    center = complex(center)
    report = HypothesisReport(f"unbounded-component({e.source()}, bov={_pair(bov)})")
    record = _bov_attractor(report, e, bov, cfg.orbit)
    if record is None:
        return report

    others = []
    for w in half_widths:
        window = Window(center.real, center.imag, 2.0 * w, 2.0 * w)
        image = render(e, window, (resolution, resolution), [record], cfg)
        components, _ = fatou_components(image)
        border = np.concatenate([components[0, :], components[-1, :], components[1:-1, 0],
                                 components[1:-1, -1]])
        fatou = border[border > 0]
        if fatou.size == 0:
            report.add(f"half-width {w}: the border holds Fatou pixels", False, {}, sampled=True)
            continue
        counts = np.bincount(fatou)
        dominant = int(np.argmax(counts))
        share = float(counts[dominant] / fatou.size)
        code = int(image.cells[components == dominant][0])
        others.append(1.0 - share)
        report.add(f"half-width {w}: one component holds >= {BORDER_SHARE:.0%} of the Fatou border "
                   f"and lies in the bov's basin",
                   share >= BORDER_SHARE and code == 0,
                   {"window": window.to_list(), "share": share, "code": code,
                    "border_components": int(np.count_nonzero(counts))},
                   sampled=True)

    growing = any(b > a + 1e-12 for a, b in zip(others, others[1:]))
    report.add("the border share outside that component does not grow with the window",
               len(others) == len(half_widths) and not growing,
               {"shares_outside": others}, sampled=True)
    return report


def check_landing_dichotomy(e, bov, window, resolution=128, k_max=32, min_pixels=16, max_iter=2000):
    """Pixel components are multiply connected exactly when they land on the bov's component."""
    cfg = RenderConfig(orbit=OrbitConfig(max_iter=max_iter))
    report = HypothesisReport(f"landing-dichotomy({e.source()}, bov={_pair(bov)})")
    image = render(e, window, (resolution, resolution), cfg=cfg)
    home, records = landing_table(e, bov, image, k_max, min_pixels)
    report.add("the bov lies on a Fatou pixel of the window", home is not None,
               {"bov": _pair(bov), "window": window.to_list()})
    if home is None:
        return report
    return landing_clauses(report, home, records)


def landing_clauses(report, home, records):
    landing = [r for r in records if r.lands]
    staying = [r for r in records if not r.lands]
    for description, group, ok in (
            ("components landing on the bov's component have holes", landing,
             lambda r: r.holes > 0),
            ("components not landing on it have no holes", staying, lambda r: r.holes == 0)):
        exceptions = [r.to_dict() for r in group if not ok(r)]
        verdict = Verdict.PASS if group and not exceptions else Verdict.UNCERTIFIED
        report.add(description, verdict,
                   {"home": home, "components": len(group), "exceptions": exceptions[:20]},
                   sampled=True)
    return report


def check_disconnected_julia_hypotheses(e, bov, window=(-2.0, 3.0, -12.0, 12.0), grid=48, max_iter=2000):
    """
    Hypotheses of total disconnectedness: an invariant attracting domain
    contains the bov and compactly contains the critical values, and the
    poles are simple.
    """
    cfg = OrbitConfig(max_iter=max_iter)
    report = HypothesisReport(f"disconnected-julia({e.source()}, bov={_pair(bov)})")
    record = _bov_attractor(report, e, bov, cfg)
    if record is None:
        return report
    report.add("the attracting cycle is a fixed point (invariant domain)", record.period == 1,
               {"period": record.period})

    cs = find_critical_points_newton(e, window, grid)
    if not len(cs):
        report.add("critical values lie in the bov's basin", Verdict.UNCERTIFIED,
                   {"window": list(window), "found": 0}, sampled=True)
    else:
        batch = iterate_orbits(e, np.array(cs.values, dtype=np.complex128), cfg)
        outside = []
        for i, value in enumerate(cs.values):
            result = batch.result(i)
            near = any(chordal_distance(z, record.location) < BASIN_EPS for z in result.cycle)
            if not (result.fate is Fate.CONVERGED and near):
                outside.append(_pair(value))
        report.add("critical values lie in the bov's basin", not outside,
                   {"found": len(cs), "outside": outside}, sampled=True)

        by_size = sorted(zip(cs.points, cs.values), key=lambda pv: abs(pv[0]))
        nearest = abs(by_size[0][1] - bov)
        farthest = abs(by_size[-1][1] - bov)
        verdict = farthest < nearest if len(by_size) > 1 else Verdict.UNCERTIFIED
        report.add("critical values approach the bov as the critical points grow", verdict,
                   {"distance_at_nearest": nearest, "distance_at_farthest": farthest},
                   sampled=True)

    poles = find_poles_newton(e, window, grid)
    orders = [order for _, order in poles]
    if not poles:
        verdict = Verdict.UNCERTIFIED
    else:
        verdict = all(abs(order - 1.0) < ORDER_TOL for order in orders)
    report.add("poles in the window are simple", verdict,
               {"poles": [_pair(p) for p, _ in poles],
                "orders": [o if math.isfinite(o) else None for o in orders], "tolerance": ORDER_TOL},
               sampled=True)
    return report
