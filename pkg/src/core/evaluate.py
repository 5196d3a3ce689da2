"""
Numeric evaluation of expressions at complex points.

`evaluate_array` works on whole numpy arrays and reports a status per
element; `evaluate` is the single-point case of the same code path, so
orbits and pixel classification never disagree.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.core.errors import UnboundParameterError
from src.core.expr import (
    Add, Const, Div, Exp, IntPow, Mul, Neg, Param, Sub, Var, free_params,
)

POLE_EPS = 1e-12
OVERFLOW_GUARD = 1e150
# exp() saturates here; e^690 already exceeds the overflow guard, so a
# saturated value only survives when a later division sends it to ~0.
EXP_REAL_CAP = 690.0

STATUS_FINITE = 0
STATUS_POLE = 1
STATUS_OVERFLOW = 2


@dataclass(frozen=True)
class Finite:
    value: complex


@dataclass(frozen=True)
class PoleHit:
    magnitude: float


@dataclass(frozen=True)
class Overflow:
    pass


EvalOutcome = Union[Finite, PoleHit, Overflow]


def check_bindings(e):
    bound = set(e.params)
    for name in free_params(e):
        if name not in bound:
            raise UnboundParameterError(name)


def int_power(base, n):
    """base**n for n >= 1 by repeated squaring (fixed multiplication order)."""
    result = None
    square = base
    k = n
    while k:
        if k & 1:
            result = square if result is None else result * square
        k >>= 1
        if k:
            square = square * square
    return result


class _ArrayEvaluator:
    def __init__(self, e, zs, pole_eps):
        self.params = e.params
        self.zs = zs
        self.pole_eps = pole_eps
        self.pole = np.zeros(zs.shape, dtype=bool)
        self.pole_magnitude = np.full(zs.shape, np.inf)
        self.memo = {}

    def _divide(self, numerator, divisor):
        magnitude = np.abs(divisor)
        small = magnitude < self.pole_eps
        if np.any(small):
            self.pole |= small
            self.pole_magnitude = np.where(
                small, np.minimum(self.pole_magnitude, magnitude), self.pole_magnitude
            )
            divisor = np.where(small, 1.0, divisor)
        return numerator / divisor

    def run(self, node):
        key = id(node)
        if key in self.memo:
            return self.memo[key]
        if isinstance(node, Const):
            value = np.complex128(node.value)
        elif isinstance(node, Var):
            value = self.zs
        elif isinstance(node, Param):
            value = np.complex128(self.params[node.name])
        elif isinstance(node, Add):
            value = self.run(node.left) + self.run(node.right)
        elif isinstance(node, Sub):
            value = self.run(node.left) - self.run(node.right)
        elif isinstance(node, Mul):
            value = self.run(node.left) * self.run(node.right)
        elif isinstance(node, Div):
            value = self._divide(self.run(node.left), self.run(node.right))
        elif isinstance(node, Neg):
            value = -self.run(node.arg)
        elif isinstance(node, Exp):
            arg = self.run(node.arg)
            capped = np.minimum(np.real(arg), EXP_REAL_CAP) + 1j * np.imag(arg)
            value = np.exp(capped)
        elif isinstance(node, IntPow):
            base = self.run(node.base)
            n = node.exponent
            if n == 0:
                value = np.ones_like(base, dtype=np.complex128)
            elif n > 0:
                value = int_power(base, n)
            else:
                value = self._divide(np.complex128(1.0), int_power(base, -n))
        else:
            raise TypeError(f"Unknown node {node!r}")
        self.memo[key] = value
        return value


def evaluate_array(e, zs, pole_eps=POLE_EPS):
    """
    Evaluate `e` at every point of `zs`.

    Returns (values, status, pole_magnitude): complex128 values (0 where not
    finite), int8 status codes and the smallest divisor magnitude seen at
    elements flagged as poles.
    """
    check_bindings(e)
    zs = np.asarray(zs, dtype=np.complex128)
    evaluator = _ArrayEvaluator(e, zs, pole_eps)
    with np.errstate(all="ignore"):
        values = np.broadcast_to(evaluator.run(e.root), zs.shape).astype(np.complex128)
        bad = ~np.isfinite(values) | (np.abs(values) > OVERFLOW_GUARD)
    status = np.full(zs.shape, STATUS_FINITE, dtype=np.int8)
    status[bad] = STATUS_OVERFLOW
    status[evaluator.pole] = STATUS_POLE
    values[status != STATUS_FINITE] = 0.0
    return values, status, evaluator.pole_magnitude


def evaluate(e, z, pole_eps=POLE_EPS):
    values, status, magnitude = evaluate_array(e, np.array([z], dtype=np.complex128), pole_eps)
    if status[0] == STATUS_POLE:
        return PoleHit(float(magnitude[0]))
    if status[0] == STATUS_OVERFLOW:
        return Overflow()
    return Finite(complex(values[0]))


def evaluate_real(e, x):
    """Real part of e(x), or NaN at a pole or overflow."""
    outcome = evaluate(e, complex(x, 0.0))
    if isinstance(outcome, Finite):
        return outcome.value.real
    return float("nan")
