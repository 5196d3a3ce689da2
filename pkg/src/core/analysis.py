"""
Distinguished points of a map: real roots, fixed points and cycles with
their multipliers, and critical points with their values.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.core import catalog
from src.core.errors import ConvergenceError, NumericError, UsageError
from src.core.evaluate import STATUS_FINITE, STATUS_OVERFLOW, STATUS_POLE, Finite, evaluate, evaluate_array
from src.core.expr import Z, compose, derivatives, differentiate, require_real
from src.core.interval import Interval

logger = logging.getLogger(__name__)

SCAN_CELLS = 1024
ROOT_XTOL = 1e-13
ROOT_DEDUP = 1e-10
ROOT_RESIDUAL = 1e-6
PRECONDITION_RESIDUAL = 1e-6
NEWTON_MAX_STEPS = 100
NEWTON_TOL = 64 * np.finfo(float).eps
NEWTON_ACCEPT = 1e-12
SUPERATTRACTING_TOL = 1e-12
UNIT_TOL = 1e-6
MAX_Q = 64
FIXED_POINT_FILTER = 1e-8
CRITICAL_RESIDUAL = 1e-10
CRITICAL_DEDUP = 1e-8
NEWTON_CRITICAL_RESIDUAL = 1e-8
POLE_DEDUP = 1e-4
POLE_MIN_MODULUS = 1e8
POLE_ORDER_OFFSET = 1e-4


class PointClass(str, Enum):
    ATTRACTING = "Attracting"
    REPELLING = "Repelling"
    PARABOLIC = "Parabolic"
    IRRATIONALLY_INDIFFERENT = "IrrationallyIndifferent"
    SUPERATTRACTING = "Superattracting"


def classify_multiplier(m):
    """(class, q) for a multiplier; q is set only for Parabolic."""
    modulus = abs(m)
    if modulus < SUPERATTRACTING_TOL:
        return PointClass.SUPERATTRACTING, None
    if abs(modulus - 1.0) < UNIT_TOL:
        for q in range(1, MAX_Q + 1):
            if abs(m ** q - 1.0) < UNIT_TOL:
                return PointClass.PARABOLIC, q
        return PointClass.IRRATIONALLY_INDIFFERENT, None
    if modulus < 1.0:
        return PointClass.ATTRACTING, None
    return PointClass.REPELLING, None


@dataclass(frozen=True)
class FixedPointRecord:
    location: complex
    period: int
    multiplier: complex
    kind: PointClass
    provenance: str
    parabolic_q: Optional[int] = None
    cycle: Tuple[complex, ...] = ()
    residual: float = 0.0

    @property
    def attracting(self):
        return self.kind in (PointClass.ATTRACTING, PointClass.SUPERATTRACTING)

    def to_dict(self):
        return {
            "location": [self.location.real, self.location.imag],
            "period": self.period,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "multiplier_modulus": abs(self.multiplier),
            "class": self.kind.value,
            "parabolic_q": self.parabolic_q,
            "cycle": [[z.real, z.imag] for z in self.cycle],
            "residual": self.residual,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            location=complex(*data["location"]),
            period=int(data["period"]),
            multiplier=complex(*data["multiplier"]),
            kind=PointClass(data["class"]),
            provenance=data["provenance"],
            parabolic_q=data.get("parabolic_q"),
            cycle=tuple(complex(*p) for p in data.get("cycle", [])),
            residual=float(data.get("residual", 0.0)),
        )


@dataclass(frozen=True)
class CriticalSet:
    points: Tuple[complex, ...]
    values: Tuple[complex, ...]
    window: str
    residuals: Tuple[float, ...] = ()

    def __len__(self):
        return len(self.points)

    def moduli(self):
        return [abs(v) for v in self.values]

    def to_dict(self):
        return {
            "window": self.window,
            "points": [[z.real, z.imag] for z in self.points],
            "values": [[v.real, v.imag] for v in self.values],
            "residuals": list(self.residuals),
        }


# Real roots -----------------------------------------------------------------

def _real_or_zero(e, t):
    outcome = evaluate(e, complex(t, 0.0))
    return outcome.value.real if isinstance(outcome, Finite) else 0.0


def find_real_roots(e, x, max_roots=16):
    """
    Sign-change scan over SCAN_CELLS uniform cells of x, each bracket refined
    with brentq. Poles show up as sign changes too; they are dropped by the
    residual test on the refined point.
    """
    require_real(e)
    grid = np.linspace(x.lo, x.hi, SCAN_CELLS + 1)
    values, status, _ = evaluate_array(e, grid.astype(np.complex128))
    samples = np.where(status == STATUS_FINITE, values.real, np.nan)

    candidates = []
    for i in range(SCAN_CELLS + 1):
        a = samples[i]
        if a == 0.0:
            candidates.append(float(grid[i]))
            continue
        if i == SCAN_CELLS:
            break
        b = samples[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            root = brentq(lambda t: _real_or_zero(e, t), grid[i], grid[i + 1], xtol=ROOT_XTOL)
            candidates.append(float(root))

    roots = []
    for root in sorted(candidates):
        outcome = evaluate(e, complex(root, 0.0))
        if not isinstance(outcome, Finite) or abs(outcome.value) > ROOT_RESIDUAL:
            logger.debug(f"Dropping sign change at {root:.12g} (not a root: {outcome})")
            continue
        if roots and root - roots[-1] <= ROOT_DEDUP:
            continue
        roots.append(root)
    if len(roots) > max_roots:
        logger.warning(f"find_real_roots: {len(roots)} roots on {x}, keeping {max_roots}")
        roots = roots[:max_roots]
    return roots


def real_fixed_points(e, x, max_roots=16):
    return find_real_roots(e - Z, x, max_roots)


# Fixed points and cycles ----------------------------------------------------

def cycle_of(e, z, period):
    """[z, f(z), ..., f^(period-1)(z)] and f^period(z)."""
    points = [complex(z)]
    current = complex(z)
    for _ in range(period):
        outcome = evaluate(e, current)
        if not isinstance(outcome, Finite):
            raise ConvergenceError(f"Orbit of {z} meets {type(outcome).__name__}", z)
        current = outcome.value
        points.append(current)
    return points[:-1], points[-1]


def cycle_multiplier(de, cycle):
    m = 1.0 + 0.0j
    for point in cycle:
        outcome = evaluate(de, point)
        if not isinstance(outcome, Finite):
            raise ConvergenceError(f"Derivative undefined on cycle at {point}", point)
        m *= outcome.value
    return m


def _newton_cycle(e, de, z, period):
    best_z, best_residual = z, math.inf
    for _ in range(NEWTON_MAX_STEPS):
        try:
            cycle, image = cycle_of(e, z, period)
            m = cycle_multiplier(de, cycle)
        except ConvergenceError:
            break
        residual = abs(image - z)
        if residual < best_residual:
            best_z, best_residual = z, residual
        if residual <= NEWTON_TOL * (1.0 + abs(z)):
            return z, True
        slope = m - 1.0
        if slope == 0:
            break
        step = (image - z) / slope
        z = z - step
        if abs(step) <= NEWTON_TOL * (1.0 + abs(z)):
            return z, True
    return best_z, best_residual <= NEWTON_ACCEPT * (1.0 + abs(best_z))


def _bracket_cycle(e, z, period):
    def g(t):
        try:
            _, image = cycle_of(e, complex(t, 0.0), period)
        except ConvergenceError:
            return math.nan
        return image.real - t

    for delta in (1e-8, 1e-6, 1e-4, 1e-2):
        a, b = z - delta, z + delta
        ga, gb = g(a), g(b)
        if not (math.isfinite(ga) and math.isfinite(gb) and ga * gb < 0):
            continue
        try:
            root = brentq(g, a, b, xtol=ROOT_XTOL)
        except (ValueError, RuntimeError):
            continue
        if abs(g(root)) <= NEWTON_ACCEPT * (1.0 + abs(root)):
            return root
    return None


def analyze_fixed_point(e, x0, period=1, provenance=None):
    """
    Refine a periodic point by Newton on f^period(z) - z, then classify it by
    the multiplier, the product of f' over the cycle.
    """
    if period < 1:
        raise UsageError("period must be >= 1")
    de = differentiate(e)
    z0 = complex(x0)
    provenance = provenance or f"seed {z0}"

    try:
        _, image = cycle_of(e, z0, period)
        start_residual = abs(image - z0)
    except ConvergenceError:
        start_residual = math.inf
    if start_residual > PRECONDITION_RESIDUAL:
        logger.warning(f"Seed {z0} has residual {start_residual:.3g} before refinement")

    z, converged = _newton_cycle(e, de, z0, period)
    if not converged and z.imag == 0.0 and all(v.imag == 0 for _, v in e.bindings):
        logger.warning(f"Newton stalled near {z}; trying a real bracket")
        root = _bracket_cycle(e, z.real, period)
        if root is not None:
            z, converged = complex(root, 0.0), True
    if not converged:
        raise ConvergenceError(f"Newton did not converge in {NEWTON_MAX_STEPS} steps", z)

    cycle, image = cycle_of(e, z, period)
    m = cycle_multiplier(de, cycle)
    kind, q = classify_multiplier(m)
    return FixedPointRecord(
        location=z,
        period=period,
        multiplier=m,
        kind=kind,
        provenance=provenance,
        parabolic_q=q,
        cycle=tuple(cycle),
        residual=abs(image - z),
    )


def find_two_cycle(e, x):
    """Smallest genuine 2-periodic point in x, or None."""
    h = compose(e, e) - Z
    candidates = []
    for root in find_real_roots(h, x, max_roots=64):
        outcome = evaluate(e, complex(root, 0.0))
        if not isinstance(outcome, Finite):
            continue
        if abs(outcome.value - root) < FIXED_POINT_FILTER:
            logger.debug(f"Filtered fixed point {root:.12g} from 2-cycle roots")
            continue
        candidates.append(root)
    if not candidates:
        return None
    root = min(candidates)
    return analyze_fixed_point(e, root, period=2, provenance=f"f^2(x)-x sign change on {x}")


# Critical points ------------------------------------------------------------

def critical_set_closed_form(lam, k_range):
    """z_k = i*pi*(2k+1) with values lambda/(-1 + i*pi*(2k+1)), k in k_range."""
    k_lo, k_hi = k_range
    if k_lo > k_hi:
        raise UsageError(f"Empty k range {k_range}")
    de = differentiate(catalog.f_lambda(lam))
    points, values, residuals = [], [], []
    for k in range(k_lo, k_hi + 1):
        point = 1j * math.pi * (2 * k + 1)
        outcome = evaluate(de, point)
        residual = abs(outcome.value) if isinstance(outcome, Finite) else math.inf
        if residual >= CRITICAL_RESIDUAL:
            raise NumericError(f"|f'(z_{k})| = {residual:.3g} at closed-form critical point")
        points.append(point)
        values.append(complex(lam) / (-1.0 + point))
        residuals.append(residual)
    return CriticalSet(tuple(points), tuple(values), f"k in [{k_lo}, {k_hi}]", tuple(residuals))


def find_critical_points_newton(e, window, grid, max_steps=NEWTON_MAX_STEPS):
    """
    Newton on f' from a grid x grid lattice of cell centers inside
    window = (re_min, re_max, im_min, im_max).
    """
    if grid < 4:
        raise UsageError("grid must be >= 4")
    re_min, re_max, im_min, im_max = map(float, window)
    d1 = differentiate(e)
    d2 = differentiate(d1)

    xs = re_min + (np.arange(grid) + 0.5) * (re_max - re_min) / grid
    ys = im_min + (np.arange(grid) + 0.5) * (im_max - im_min) / grid
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    converged = np.zeros(z.size, dtype=bool)
    alive = np.ones(z.size, dtype=bool)

    for _ in range(max_steps):
        idx = np.flatnonzero(alive & ~converged)
        if idx.size == 0:
            break
        v1, s1, _ = evaluate_array(d1, z[idx])
        v2, s2, _ = evaluate_array(d2, z[idx])
        bad = (s1 != STATUS_FINITE) | (s2 != STATUS_FINITE) | (v2 == 0)
        alive[idx[bad]] = False
        good = ~bad
        with np.errstate(all="ignore"):
            step = v1[good] / v2[good]
        target = idx[good]
        z[target] = z[target] - step
        done = np.abs(step) <= 1e-12 * (1.0 + np.abs(z[target]))
        converged[target[done]] = True
        alive[target[~np.isfinite(z[target])]] = False

    margin = 1e-9
    found = z[converged & alive]
    inside = ((found.real >= re_min - margin) & (found.real <= re_max + margin)
              & (found.imag >= im_min - margin) & (found.imag <= im_max + margin))
    found = found[inside]
    found = sorted(found.tolist(), key=lambda w: (w.real, w.imag))

    points, values, residuals = [], [], []
    for candidate in found:
        if any(abs(candidate - kept) < CRITICAL_DEDUP for kept in points):
            continue
        d_outcome = evaluate(d1, candidate)
        value = evaluate(e, candidate)
        if not isinstance(d_outcome, Finite) or not isinstance(value, Finite):
            continue
        if abs(d_outcome.value) >= NEWTON_CRITICAL_RESIDUAL:
            continue
        points.append(candidate)
        values.append(value.value)
        residuals.append(abs(d_outcome.value))
    description = f"re [{re_min}, {re_max}] x im [{im_min}, {im_max}], grid {grid}"
    logger.info(f"Newton critical search: {len(points)} points in {description}")
    return CriticalSet(tuple(points), tuple(values), description, tuple(residuals))


def _pole_order(e, d1, d2, pole):
    """1 / (f f'' / f'^2 - 1) near the pole; tends to the pole's order."""
    z = pole + POLE_ORDER_OFFSET * (1.0 + abs(pole))
    outcomes = [evaluate(d, z) for d in (e, d1, d2)]
    if not all(isinstance(o, Finite) for o in outcomes):
        return math.nan
    v0, v1, v2 = (o.value for o in outcomes)
    if v1 == 0:
        return math.nan
    ratio = v0 * v2 / (v1 * v1) - 1.0
    return math.inf if ratio == 0 else (1.0 / ratio).real


def find_poles_newton(e, window, grid, max_steps=NEWTON_MAX_STEPS):
    """
    Poles of f inside window = (re_min, re_max, im_min, im_max), with an
    estimate of each pole's order. Newton on 1/f, i.e. z <- z + f/f'.
    """
    if grid < 4:
        raise UsageError("grid must be >= 4")
    re_min, re_max, im_min, im_max = map(float, window)
    _, d1, d2 = derivatives(e, 2)

    xs = re_min + (np.arange(grid) + 0.5) * (re_max - re_min) / grid
    ys = im_min + (np.arange(grid) + 0.5) * (im_max - im_min) / grid
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    converged = np.zeros(z.size, dtype=bool)
    alive = np.ones(z.size, dtype=bool)

    for _ in range(max_steps):
        idx = np.flatnonzero(alive & ~converged)
        if idx.size == 0:
            break
        v0, s0, _ = evaluate_array(e, z[idx])
        converged[idx[s0 == STATUS_POLE]] = True
        alive[idx[s0 == STATUS_OVERFLOW]] = False
        idx = idx[s0 == STATUS_FINITE]
        v0 = v0[s0 == STATUS_FINITE]
        v1, s1, _ = evaluate_array(d1, z[idx])
        bad = (s1 != STATUS_FINITE) | (v1 == 0)
        alive[idx[bad]] = False
        with np.errstate(all="ignore"):
            step = v0[~bad] / v1[~bad]
        target = idx[~bad]
        z[target] = z[target] + step
        done = np.abs(step) <= 1e-12 * (1.0 + np.abs(z[target]))
        converged[target[done]] = True
        alive[target[~np.isfinite(z[target])]] = False

    margin = 1e-9
    found = z[converged & alive]
    inside = ((found.real >= re_min - margin) & (found.real <= re_max + margin)
              & (found.imag >= im_min - margin) & (found.imag <= im_max + margin))
    poles = []
    for candidate in sorted(found[inside].tolist(), key=lambda w: (w.real, w.imag)):
        if any(abs(candidate - kept) < POLE_DEDUP for kept, _ in poles):
            continue
        outcome = evaluate(e, candidate)
        if isinstance(outcome, Finite) and abs(outcome.value) < POLE_MIN_MODULUS:
            continue
        poles.append((candidate, _pole_order(e, d1, d2, candidate)))
    logger.info(f"Newton pole search: {len(poles)} poles in re [{re_min}, {re_max}] x "
                f"im [{im_min}, {im_max}], grid {grid}")
    return poles


# Real-line structure of f ---------------------------------------------------

def real_line_summary(e=None):
    """Pole, fixed points and pole preimage of f on the real line."""
    e = e or catalog.f()
    pole = find_real_roots(catalog.exp_plus_z(), Interval(-1.0, 0.0))
    if len(pole) != 1:
        raise NumericError(f"Expected one real pole in [-1, 0], found {pole}")
    x0 = pole[0]
    positive = real_fixed_points(e, Interval(0.0, 1.0))
    negative = real_fixed_points(e, Interval(-3.0, x0 - 1e-3))
    preimage = find_real_roots(e - x0, Interval(-5.0, x0 - 1e-3))
    return {
        "pole": x0,
        "p": positive[0] if positive else None,
        "q": negative[0] if negative else None,
        "pole_preimage": preimage[0] if preimage else None,
    }
