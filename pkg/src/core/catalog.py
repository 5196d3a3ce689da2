"""Closed-form maps and reference figures used by the checkers and repro pipelines."""

import cmath
import math

from src.core.expr import MapExpr, parse

F_SOURCE = "1/(exp(z)+z)"
F_LAMBDA_SOURCE = "lambda/(exp(z)+z)"
F3_SOURCE = "0.1/(z^9+exp(z))-0.99"
F4_SOURCE = "lambda*(1/(z+exp(z))-1)"
PHI_SOURCE = "exp(z)*(1-z)/(exp(z)+z)^2"
P_SOURCE = "90*z^8+71.28*z^7+2*exp(z)"
H_SOURCE = "10*(z+0.99)^2*(9*z^8+exp(z))"

# Intervals of the f3 analysis.
I1 = (-0.904, -0.72)
I2 = (-1.069, -1.0)
J = (-0.792, -0.72)
F3_SEED = -0.99

# Successive derivatives p, p', ..., p^(7) at -0.72 as tabulated (rounded).
P_DERIVATIVE_TABLE = (0.3, -1.7, 123.0, -1800.0, 18000.0, -1.3e5, 6.8e5, -2.2e6)

# (label, expected value) pairs of the f3 basin chain.
F3_CHAIN = {
    "f3^7(-0.99)": -1.08,
    "f3^8(-0.99)": -1.05,
    "f3'(f3^7(-0.99))": -0.613,
    "f3'(f3^8(-0.99))": -0.94,
}

H_AT_I1_END = 0.828
H_AT_I2_START = 0.979

POLE_APPROX = -0.55
P_APPROX = 0.49
Q_APPROX = -1.16

PARABOLIC_LAMBDA = 0.5
GOLDEN_ROTATION = (math.sqrt(5.0) - 1.0) / 2.0


def siegel_lambda():
    """lambda with -2*lambda = exp(2*pi*i*golden rotation number)."""
    return cmath.exp(2j * math.pi * GOLDEN_ROTATION) / -2.0


def f():
    return parse(F_SOURCE)


def exp_plus_z():
    return parse("exp(z)+z")


def f_lambda(lam):
    return parse(F_LAMBDA_SOURCE, {"lambda": lam})


def f2(g, epsilon, b):
    """epsilon/g(z) + b."""
    if not isinstance(g, MapExpr):
        raise TypeError("g must be a MapExpr")
    return epsilon / g + b


def f3(shift=0.99):
    return parse(f"0.1/(z^9+exp(z))-{shift!r}")


def f4(lam):
    return parse(F4_SOURCE, {"lambda": lam})


def phi():
    return parse(PHI_SOURCE)


def p_poly():
    return parse(P_SOURCE)


def h_multiplier():
    return parse(H_SOURCE)


def inverse_critical_family(c, d):
    """1/(c*z^d + exp(z)); its critical points are the roots of c*d*z^(d-1) + e^z."""
    return parse(f"1/(c*z^{int(d)}+exp(z))", {"c": c})
