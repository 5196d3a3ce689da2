"""
Outward-rounded interval arithmetic over the expression language.

Rounding model: every endpoint operation is followed by one `math.nextafter`
step away from the interval; exp endpoints get two steps. Division is done
as multiplication by an outward-rounded reciprocal, which also encloses the
two-rounding path numpy takes for complex division on the real line.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from src.core.errors import IntervalDivisionError, IntervalOverflowError, UnboundParameterError, UsageError
from src.core.evaluate import EXP_REAL_CAP
from src.core.expr import (
    Add, Const, Div, Exp, IntPow, MapExpr, Mul, Neg, Param, Sub, Var,
    derivatives, require_real, to_source,
)

logger = logging.getLogger(__name__)

MAX_DEPTH = 40
MAX_LEAVES = 200_000


def _down(x):
    return math.nextafter(x, -math.inf)


def _up(x):
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise IntervalOverflowError(f"Non-finite interval endpoint [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"Interval lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x):
        return cls(x, x)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return self.lo + (self.hi - self.lo) / 2

    def contains(self, x):
        return self.lo <= x <= self.hi

    def contains_zero(self):
        return self.lo <= 0.0 <= self.hi

    def subset_of(self, other):
        return other.lo <= self.lo and self.hi <= other.hi

    def can_split(self):
        m = self.mid
        return self.lo < m < self.hi

    def split(self):
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)

    def sign(self):
        """+1, -1 or 0 when the interval touches zero."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def to_list(self):
        return [self.lo, self.hi]

    def __str__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


def _outward(lo, hi):
    lo, hi = _down(lo), _up(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise IntervalOverflowError(f"Interval overflow [{lo}, {hi}]")
    return Interval(lo, hi)


def iadd(a, b):
    return _outward(a.lo + b.lo, a.hi + b.hi)


def isub(a, b):
    return _outward(a.lo - b.hi, a.hi - b.lo)


def imul(a, b):
    products = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return _outward(min(products), max(products))


def ireciprocal(b, node=None):
    if b.contains_zero():
        raise IntervalDivisionError("?" if node is None else to_source(node))
    return _outward(1.0 / b.hi, 1.0 / b.lo)


def ineg(a):
    return Interval(-a.hi, -a.lo)


def iexp(a):
    if a.hi > EXP_REAL_CAP:
        raise IntervalOverflowError(f"exp argument {a} exceeds {EXP_REAL_CAP}")
    lo = max(_down(_down(math.exp(a.lo))), 0.0)
    hi = _up(_up(math.exp(a.hi)))
    return Interval(lo, hi)


def _pow_bound(m, n, step):
    """m**n for m >= 0 by repeated squaring, each product rounded by `step`."""
    result = None
    square = m
    k = n
    while k:
        if k & 1:
            result = square if result is None else step(result * square)
        k >>= 1
        if k:
            square = step(square * square)
    if not math.isfinite(result):
        raise IntervalOverflowError(f"Power overflow {m}^{n}")
    return result


def _pow_up(m, n):
    return _pow_bound(m, n, _up)


def _pow_down(m, n):
    return max(_pow_bound(m, n, _down), 0.0)


def ipow(a, n, node=None):
    if n == 0:
        return Interval(1.0, 1.0)
    if n < 0:
        return ireciprocal(ipow(a, -n, node), node)
    if n % 2 == 0:
        if a.contains_zero():
            low, high = 0.0, max(-a.lo, a.hi)
        else:
            low, high = min(abs(a.lo), abs(a.hi)), max(abs(a.lo), abs(a.hi))
        return Interval(_pow_down(low, n), _pow_up(high, n))
    lo = _pow_down(a.lo, n) if a.lo >= 0 else -_pow_up(-a.lo, n)
    hi = _pow_up(a.hi, n) if a.hi >= 0 else -_pow_down(-a.hi, n)
    return Interval(lo, hi)


def ieval(e, x):
    """Enclosure of e(t) for every real t in x."""
    require_real(e)
    params = e.params
    memo = {}

    def run(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            result = Interval.point(node.value.real)
        elif isinstance(node, Var):
            result = x
        elif isinstance(node, Param):
            if node.name not in params:
                raise UnboundParameterError(node.name)
            result = Interval.point(params[node.name].real)
        elif isinstance(node, Add):
            result = iadd(run(node.left), run(node.right))
        elif isinstance(node, Sub):
            result = isub(run(node.left), run(node.right))
        elif isinstance(node, Mul):
            result = imul(run(node.left), run(node.right))
        elif isinstance(node, Div):
            numerator = run(node.left)
            result = imul(numerator, ireciprocal(run(node.right), node.right))
        elif isinstance(node, Neg):
            result = ineg(run(node.arg))
        elif isinstance(node, Exp):
            result = iexp(run(node.arg))
        elif isinstance(node, IntPow):
            result = ipow(run(node.base), node.exponent, node)
        else:
            raise TypeError(f"Unknown node {node!r}")
        memo[key] = result
        return result

    return run(e.root)


# Sign certificates ----------------------------------------------------------

class Sign(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    INDETERMINATE = "Indeterminate"

    @classmethod
    def from_int(cls, s):
        return {1: cls.POSITIVE, -1: cls.NEGATIVE}.get(s, cls.INDETERMINATE)

    def as_int(self):
        return {Sign.POSITIVE: 1, Sign.NEGATIVE: -1}.get(self, 0)


@dataclass(frozen=True)
class CascadeStep:
    order: int
    endpoint: Optional[float]
    endpoint_sign: Sign
    interval_sign: Sign
    rule: str

    def to_dict(self):
        return {
            "order": self.order,
            "endpoint": self.endpoint,
            "endpoint_sign": self.endpoint_sign.value,
            "interval_sign": self.interval_sign.value,
            "rule": self.rule,
        }


@dataclass
class SignCertificate:
    target: MapExpr
    domain: Interval
    verdict: Sign
    subdivisions: int = 0
    leaves: int = 0
    max_depth_hit: bool = False
    cascade_trace: List[CascadeStep] = field(default_factory=list)

    @property
    def certified(self):
        return self.verdict is not Sign.INDETERMINATE

    def to_dict(self):
        return {
            "target": self.target.source(),
            "params": {k: [v.real, v.imag] for k, v in self.target.bindings},
            "domain": self.domain.to_list(),
            "verdict": self.verdict.value,
            "subdivisions": self.subdivisions,
            "leaves": self.leaves,
            "max_depth_hit": self.max_depth_hit,
            "cascade_trace": [step.to_dict() for step in self.cascade_trace],
        }


def certify_sign(e, x, max_depth=MAX_DEPTH, max_leaves=MAX_LEAVES):
    """Adaptive midpoint bisection until every leaf has a decided sign."""
    if max_depth < 1:
        raise UsageError("max_depth must be >= 1")
    require_real(e)
    stack = [(x, 0)]
    seen_sign = 0
    subdivisions = 0
    leaves = 0
    max_depth_hit = False
    verdict = None

    while stack:
        piece, depth = stack.pop()
        error = None
        try:
            s = ieval(e, piece).sign()
        except IntervalDivisionError as exc:
            s, error = 0, exc
        if s != 0:
            leaves += 1
            if seen_sign and s != seen_sign:
                verdict = Sign.INDETERMINATE
                break
            seen_sign = s
            if leaves >= max_leaves and stack:
                logger.warning(f"certify_sign: leaf budget {max_leaves} exhausted on {x}")
                verdict = Sign.INDETERMINATE
                break
            continue
        if depth >= max_depth or not piece.can_split():
            max_depth_hit = True
            if error is not None:
                raise error
            verdict = Sign.INDETERMINATE
            break
        left, right = piece.split()
        subdivisions += 1
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))

    if verdict is None:
        verdict = Sign.from_int(seen_sign)
    return SignCertificate(e, x, verdict, subdivisions, leaves, max_depth_hit)


def _endpoint_sign(q, t):
    try:
        return Sign.from_int(ieval(q, Interval.point(t)).sign())
    except IntervalDivisionError:
        return Sign.INDETERMINATE


def cascade_sign(e, x, order, max_depth=MAX_DEPTH):
    """
    Certify the sign of e on x from the sign of its `order`-th derivative.

    With q' of known sign on x = [s, t]:
      q' > 0 and q(t) < 0  =>  q < 0      q' < 0 and q(t) > 0  =>  q > 0
      q' > 0 and q(s) > 0  =>  q > 0      q' < 0 and q(s) < 0  =>  q < 0
    When no endpoint rule applies, q is certified directly on x.
    """
    if order < 1:
        raise UsageError("order must be >= 1")
    chain = derivatives(e, order)
    top = certify_sign(chain[order], x, max_depth)
    trace = [CascadeStep(order, None, Sign.INDETERMINATE, top.verdict, "direct")]
    subdivisions, leaves, depth_hit = top.subdivisions, top.leaves, top.max_depth_hit
    known = top.verdict

    for k in range(order - 1, -1, -1):
        if known is Sign.INDETERMINATE:
            break
        q = chain[k]
        right = _endpoint_sign(q, x.hi)
        increasing = known is Sign.POSITIVE
        step = None
        if increasing and right is Sign.NEGATIVE:
            step = CascadeStep(k, x.hi, right, Sign.NEGATIVE, "right-endpoint")
        elif not increasing and right is Sign.POSITIVE:
            step = CascadeStep(k, x.hi, right, Sign.POSITIVE, "right-endpoint")
        else:
            left = _endpoint_sign(q, x.lo)
            if increasing and left is Sign.POSITIVE:
                step = CascadeStep(k, x.lo, left, Sign.POSITIVE, "left-endpoint")
            elif not increasing and left is Sign.NEGATIVE:
                step = CascadeStep(k, x.lo, left, Sign.NEGATIVE, "left-endpoint")
        if step is None:
            direct = certify_sign(q, x, max_depth)
            subdivisions += direct.subdivisions
            leaves += direct.leaves
            depth_hit = depth_hit or direct.max_depth_hit
            step = CascadeStep(k, x.hi, right, direct.verdict, "direct")
        logger.debug(f"cascade order {k}: endpoint {step.endpoint_sign.value}, "
                     f"interval {step.interval_sign.value} ({step.rule})")
        trace.append(step)
        known = step.interval_sign

    verdict = known if trace[-1].order == 0 else Sign.INDETERMINATE
    return SignCertificate(e, x, verdict, subdivisions, leaves, depth_hit, trace)
