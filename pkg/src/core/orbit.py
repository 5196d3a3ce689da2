"""
Pole-aware orbit iteration with chordal (spherical) bookkeeping.

`iterate_orbits` runs a whole batch of seeds in lockstep on numpy arrays,
dropping each seed from the active set as soon as its fate is known.
`iterate_orbit` is the one-seed case of the same loop.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.core.config import OrbitConfig
from src.core.evaluate import (
    STATUS_OVERFLOW, STATUS_POLE, Finite, evaluate, evaluate_array,
)

logger = logging.getLogger(__name__)

INFINITY = complex(math.inf, 0.0)

FATE_CONVERGED = 0
FATE_ESCAPED = 1
FATE_POLE = 2
FATE_UNDECIDED = 3


class Fate(str, Enum):
    CONVERGED = "ConvergedToCycle"
    ESCAPED = "Escaped"
    POLE_HIT = "PoleHit"
    UNDECIDED = "Undecided"


_FATE_BY_CODE = {
    FATE_CONVERGED: Fate.CONVERGED,
    FATE_ESCAPED: Fate.ESCAPED,
    FATE_POLE: Fate.POLE_HIT,
    FATE_UNDECIDED: Fate.UNDECIDED,
}


def is_infinite(z):
    return not cmath.isfinite(complex(z))


def chordal_distance(a, b):
    """2|a-b| / sqrt((1+|a|^2)(1+|b|^2)), with the limit form at infinity."""
    a_inf, b_inf = is_infinite(a), is_infinite(b)
    if a_inf and b_inf:
        return 0.0
    if a_inf:
        return 2.0 / math.hypot(1.0, abs(b))
    if b_inf:
        return 2.0 / math.hypot(1.0, abs(a))
    return 2.0 * abs(a - b) / (math.hypot(1.0, abs(a)) * math.hypot(1.0, abs(b)))


def chordal_distance_array(a, b):
    """Elementwise chordal distance between finite complex arrays."""
    return 2.0 * np.abs(a - b) / (np.hypot(1.0, np.abs(a)) * np.hypot(1.0, np.abs(b)))


def distance_to_infinity(z):
    with np.errstate(all="ignore"):
        d = 2.0 / np.hypot(1.0, np.abs(z))
    return np.where(np.isfinite(z), d, 0.0)


@dataclass(frozen=True)
class OrbitResult:
    fate: Fate
    iterations_used: int
    final_point: complex
    index: Optional[int] = None
    cycle: Tuple[complex, ...] = field(default_factory=tuple)
    period: int = 0

    def to_dict(self):
        return {
            "fate": self.fate.value,
            "index": self.index,
            "period": self.period,
            "cycle": [[z.real, z.imag] for z in self.cycle],
            "iterations_used": self.iterations_used,
            "final_point": [self.final_point.real, self.final_point.imag],
        }


@dataclass
class OrbitBatch:
    """Fates of a batch of seeds, one entry per seed, in input order."""

    fate: np.ndarray
    index: np.ndarray
    period: np.ndarray
    iterations: np.ndarray
    final: np.ndarray
    cycles: np.ndarray

    def __len__(self):
        return len(self.fate)

    def result(self, i):
        fate = _FATE_BY_CODE[int(self.fate[i])]
        period = int(self.period[i])
        cycle = tuple(complex(z) for z in self.cycles[i, :period]) if period else ()
        index = None if fate is Fate.UNDECIDED else int(self.index[i])
        return OrbitResult(fate, int(self.iterations[i]), complex(self.final[i]),
                           index, cycle, period)


def iterate_orbits(e, seeds, cfg=OrbitConfig()):
    """
    Classify every seed.

    z_n is compared with z_{n-p} for p <= period_max; the smallest p whose
    run of consecutive chordal agreements reaches `confirm` wins.
    """
    seeds = np.asarray(seeds, dtype=np.complex128).ravel()
    total = seeds.size
    P, H = cfg.period_max, cfg.period_max + 1

    fate = np.full(total, FATE_UNDECIDED, dtype=np.int8)
    index = np.full(total, -1, dtype=np.int64)
    period = np.zeros(total, dtype=np.int64)
    iterations = np.zeros(total, dtype=np.int64)
    final = seeds.copy()
    cycles = np.full((total, P), np.nan + 0j, dtype=np.complex128)

    escaped0 = distance_to_infinity(seeds) < cfg.escape_eps
    fate[escaped0] = FATE_ESCAPED
    index[escaped0] = 0

    active = np.flatnonzero(~escaped0)
    z = seeds[active]
    history = np.empty((active.size, H), dtype=np.complex128)
    history[:, 0] = z
    agree = np.zeros((active.size, P), dtype=np.int64)
    n = 0

    for n in range(1, cfg.max_iter):
        if active.size == 0:
            break
        values, status, _ = evaluate_array(e, z, cfg.pole_eps)
        pole = status == STATUS_POLE
        overflow = status == STATUS_OVERFLOW

        if pole.any():
            rows = active[pole]
            fate[rows] = FATE_POLE
            index[rows] = n - 1
            iterations[rows] = n - 1
            final[rows] = z[pole]
        if overflow.any():
            rows = active[overflow]
            fate[rows] = FATE_ESCAPED
            index[rows] = n
            iterations[rows] = n
            final[rows] = z[overflow]

        ok = ~(pole | overflow)
        escaped = ok & (distance_to_infinity(values) < cfg.escape_eps)
        if escaped.any():
            rows = active[escaped]
            fate[rows] = FATE_ESCAPED
            index[rows] = n
            iterations[rows] = n
            final[rows] = values[escaped]

        live = ok & ~escaped
        history[:, n % H] = values
        for p in range(1, min(n, P) + 1):
            d = chordal_distance_array(values, history[:, (n - p) % H])
            agree[:, p - 1] = np.where(d < cfg.conv_eps, agree[:, p - 1] + 1, 0)
        confirmed = agree >= cfg.confirm
        converged = live & confirmed.any(axis=1)

        if converged.any():
            local = np.flatnonzero(converged)
            per = np.argmax(confirmed[local], axis=1) + 1
            rows = active[local]
            fate[rows] = FATE_CONVERGED
            index[rows] = n
            iterations[rows] = n
            period[rows] = per
            final[rows] = values[local]
            for k in range(P):
                has_k = k < per
                cols = (n - per + 1 + k) % H
                cycles[rows[has_k], k] = history[local[has_k], cols[has_k]]

        keep = live & ~converged
        if not keep.all():
            active = active[keep]
            history = history[keep]
            agree = agree[keep]
            z = values[keep]
        else:
            z = values

    if active.size:
        final[active] = z
        iterations[active] = n

    return OrbitBatch(fate, index, period, iterations, final, cycles)


def iterate_orbit(e, seed, cfg=OrbitConfig()):
    return iterate_orbits(e, np.array([seed], dtype=np.complex128), cfg).result(0)


def iterate_point(e, z, n, pole_eps=1e-12):
    """f^n(z) as an EvalOutcome; stops at the first pole or overflow."""
    outcome = Finite(complex(z))
    for _ in range(n):
        outcome = evaluate(e, outcome.value, pole_eps)
        if not isinstance(outcome, Finite):
            break
    return outcome


def orbit_prefix(e, seed, n, pole_eps=1e-12):
    """[z_0, ..., z_n], shorter when the orbit meets a pole or overflows."""
    points = [complex(seed)]
    for _ in range(n):
        outcome = evaluate(e, points[-1], pole_eps)
        if not isinstance(outcome, Finite):
            logger.debug(f"orbit_prefix stopped after {len(points) - 1} steps: {outcome}")
            break
        points.append(outcome.value)
    return points
