"""
Meromorphic expression language.

Grammar (EBNF, whitespace ignored):

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = ("-" | "+") unary | power ;
    power    = atom [ "^" exponent ] ;
    exponent = [ "-" | "+" ] INTEGER | "(" [ "-" | "+" ] INTEGER ")" ;
    atom     = NUMBER | "z" | "i" | "exp" "(" expr ")" | IDENT | "(" expr ")" ;
    NUMBER   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] [ "i" ] ;

`z` is the variable, `i` the imaginary unit, every other identifier a
parameter. Exponents are integer literals only, so the language has no
branch cuts.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from src.core.errors import (
    ComplexParameterError,
    ExpressionSyntaxError,
    NonIntegerExponentError,
    UnknownFunctionError,
    UsageError,
)


# Nodes ----------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class IntPow:
    base: "Node"
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int):
            raise TypeError(f"IntPow exponent must be int, got {self.exponent!r}")


@dataclass(frozen=True)
class Exp:
    arg: "Node"


Node = Union[Const, Var, Param, Add, Sub, Mul, Div, Neg, IntPow, Exp]
BINARY = (Add, Sub, Mul, Div)
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def _as_node(value):
    if isinstance(value, MapExpr):
        return value.root, value.params
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return Const(value), {}
    if isinstance(value, (Const, Var, Param, *BINARY, Neg, IntPow, Exp)):
        return value, {}
    raise TypeError(f"Cannot use {type(value).__name__} in an expression")


def _merge(left: Mapping[str, complex], right: Mapping[str, complex]):
    merged = dict(left)
    for name, value in right.items():
        if name in merged and merged[name] != complex(value):
            raise UsageError(f"Conflicting bindings for parameter '{name}'")
        merged[name] = complex(value)
    return merged


@dataclass(frozen=True)
class MapExpr:
    """An expression tree in z together with its parameter bindings."""

    root: Node
    bindings: tuple = field(default=())

    def __post_init__(self):
        pairs = self.bindings.items() if isinstance(self.bindings, Mapping) else self.bindings
        normalized = tuple(sorted((str(k), complex(v)) for k, v in pairs))
        object.__setattr__(self, "bindings", normalized)

    @property
    def params(self):
        return dict(self.bindings)

    def bind(self, **values):
        return MapExpr(self.root, {**self.params, **values})

    def source(self):
        return to_source(self.root)

    def __str__(self):
        return self.source()

    def _combine(self, other, node_type, reflected=False):
        other_root, other_params = _as_node(other)
        params = _merge(self.params, other_params)
        if reflected:
            return MapExpr(node_type(other_root, self.root), params)
        return MapExpr(node_type(self.root, other_root), params)

    def __add__(self, other):
        return self._combine(other, Add)

    def __radd__(self, other):
        return self._combine(other, Add, reflected=True)

    def __sub__(self, other):
        return self._combine(other, Sub)

    def __rsub__(self, other):
        return self._combine(other, Sub, reflected=True)

    def __mul__(self, other):
        return self._combine(other, Mul)

    def __rmul__(self, other):
        return self._combine(other, Mul, reflected=True)

    def __truediv__(self, other):
        return self._combine(other, Div)

    def __rtruediv__(self, other):
        return self._combine(other, Div, reflected=True)

    def __neg__(self):
        return MapExpr(Neg(self.root), self.params)

    def __pow__(self, exponent):
        return MapExpr(IntPow(self.root, exponent), self.params)


Z = MapExpr(Var())


# Tokenizer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?(?:i(?![A-Za-z0-9_]))?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {source[pos]!r}", pos)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source):
        self.tokens = _tokenize(source)
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text):
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text):
        token = self.accept(text)
        if token is None:
            found = self.current.text or "end of input"
            raise ExpressionSyntaxError(f"Expected '{text}', found '{found}'", self.current.offset)
        return token

    def parse(self):
        node = self.expr()
        if self.current.kind != "end":
            raise ExpressionSyntaxError(f"Unexpected '{self.current.text}'", self.current.offset)
        return node

    def expr(self):
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            if self.accept("*"):
                node = Mul(node, self.unary())
            elif self.accept("/"):
                node = Div(node, self.unary())
            else:
                return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return IntPow(base, self.exponent())
        return base

    def exponent(self):
        wrapped = self.accept("(")
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        token = self.current
        if token.kind != "number" or not token.text.isdigit():
            raise NonIntegerExponentError(
                f"Exponent must be an integer literal, found '{token.text or 'end of input'}'",
                token.offset,
            )
        self.advance()
        if wrapped:
            self.expect(")")
        return sign * int(token.text)

    def atom(self):
        token = self.current
        if token.kind == "number":
            self.advance()
            imaginary = token.text.endswith("i")
            value = float(token.text[:-1] if imaginary else token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"Number '{token.text}' overflows a double", token.offset)
            return Const(complex(0.0, value) if imaginary else value)
        if token.kind == "ident":
            self.advance()
            if self.current.kind == "op" and self.current.text == "(":
                if token.text != "exp":
                    raise UnknownFunctionError(token.text, token.offset)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Exp(arg)
            if token.text == "exp":
                raise ExpressionSyntaxError("Expected '(' after 'exp'", self.current.offset)
            if token.text == "z":
                return Var()
            if token.text == "i":
                return Const(1j)
            return Param(token.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = token.text or "end of input"
        raise ExpressionSyntaxError(f"Unexpected '{found}'", token.offset)


def parse(source, params=None):
    """Parse `source` into a MapExpr bound to `params` (name -> number)."""
    return MapExpr(_Parser(source).parse(), params or {})


# Printing -------------------------------------------------------------------

def _format_const(value):
    re_part, im_part = value.real, value.imag
    if im_part == 0 and not str(re_part).startswith("-"):
        return repr(re_part)
    if re_part == 0 and not str(im_part).startswith("-") and not str(re_part).startswith("-"):
        return f"{im_part!r}i"
    if im_part == 0:
        return f"({re_part!r})"
    sign = "-" if str(im_part).startswith("-") else "+"
    return f"({re_part!r}{sign}{abs(im_part)!r}i)"


def to_source(node):
    """Print a node so that parsing the text gives back an equal tree."""
    if isinstance(node, MapExpr):
        node = node.root
    if isinstance(node, Const):
        return _format_const(node.value)
    if isinstance(node, Var):
        return "z"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, BINARY):
        return f"({to_source(node.left)} {_SYMBOL[type(node)]} {to_source(node.right)})"
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, Exp):
        return f"exp({to_source(node.arg)})"
    if isinstance(node, IntPow):
        base = to_source(node.base)
        if isinstance(node.base, IntPow):
            base = f"({base})"
        if node.exponent < 0:
            return f"{base}^({node.exponent})"
        return f"{base}^{node.exponent}"
    raise TypeError(f"Unknown node {node!r}")


# Structure queries ----------------------------------------------------------

def children(node):
    if isinstance(node, BINARY):
        return (node.left, node.right)
    if isinstance(node, (Neg, Exp)):
        return (node.arg,)
    if isinstance(node, IntPow):
        return (node.base,)
    return ()


def walk(node):
    seen = set()
    stack = [node]
    while stack:
        current = stack.pop()
        if id(current) in seen:
            continue
        seen.add(id(current))
        yield current
        stack.extend(children(current))


def free_params(e):
    root = e.root if isinstance(e, MapExpr) else e
    return sorted({n.name for n in walk(root) if isinstance(n, Param)})


def depends_on_z(node):
    return any(isinstance(n, Var) for n in walk(node))


def require_real(e):
    """Raise unless every constant and bound parameter of `e` is real."""
    for name, value in e.bindings:
        if value.imag != 0:
            raise ComplexParameterError(f"Parameter '{name}' = {value} is not real")
    for node in walk(e.root):
        if isinstance(node, Const) and node.value.imag != 0:
            raise ComplexParameterError(f"Constant {node.value} is not real")


# Calculus -------------------------------------------------------------------

def _derivative(node, memo):
    """d/dz of `node`, or None when `node` does not depend on z."""
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, (Const, Param)):
        result = None
    elif isinstance(node, Var):
        result = Const(1.0)
    elif isinstance(node, (Add, Sub)):
        dl, dr = _derivative(node.left, memo), _derivative(node.right, memo)
        if dl is None and dr is None:
            result = None
        elif dr is None:
            result = dl
        elif dl is None:
            result = dr if isinstance(node, Add) else Neg(dr)
        else:
            result = type(node)(dl, dr)
    elif isinstance(node, Mul):
        dl, dr = _derivative(node.left, memo), _derivative(node.right, memo)
        terms = []
        if dl is not None:
            terms.append(Mul(dl, node.right))
        if dr is not None:
            terms.append(Mul(node.left, dr))
        result = None if not terms else terms[0] if len(terms) == 1 else Add(*terms)
    elif isinstance(node, Div):
        dl, dr = _derivative(node.left, memo), _derivative(node.right, memo)
        if dr is None:
            result = None if dl is None else Div(dl, node.right)
        else:
            cross = Mul(node.left, dr)
            numerator = Neg(cross) if dl is None else Sub(Mul(dl, node.right), cross)
            result = Div(numerator, IntPow(node.right, 2))
    elif isinstance(node, Neg):
        da = _derivative(node.arg, memo)
        result = None if da is None else Neg(da)
    elif isinstance(node, IntPow):
        da = _derivative(node.base, memo)
        if da is None or node.exponent == 0:
            result = None
        else:
            n = node.exponent
            result = Mul(Mul(Const(float(n)), IntPow(node.base, n - 1)), da)
    elif isinstance(node, Exp):
        da = _derivative(node.arg, memo)
        result = None if da is None else Mul(node, da)
    else:
        raise TypeError(f"Unknown node {node!r}")
    memo[key] = result
    return result


def differentiate(e, order=1):
    """Symbolic derivative d^order/dz^order, without simplification."""
    for _ in range(order):
        d = _derivative(e.root, {})
        e = MapExpr(Const(0.0) if d is None else d, e.bindings)
    return e


def derivatives(e, order):
    """[e, e', ..., e^(order)]."""
    out = [e]
    for _ in range(order):
        out.append(differentiate(out[-1]))
    return out


def _substitute(node, replacement, memo):
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Var):
        result = replacement
    elif isinstance(node, (Const, Param)):
        result = node
    elif isinstance(node, BINARY):
        result = type(node)(_substitute(node.left, replacement, memo),
                            _substitute(node.right, replacement, memo))
    elif isinstance(node, Neg):
        result = Neg(_substitute(node.arg, replacement, memo))
    elif isinstance(node, Exp):
        result = Exp(_substitute(node.arg, replacement, memo))
    elif isinstance(node, IntPow):
        result = IntPow(_substitute(node.base, replacement, memo), node.exponent)
    else:
        raise TypeError(f"Unknown node {node!r}")
    memo[key] = result
    return result


def compose(outer, inner):
    """outer(inner(z))."""
    params = _merge(outer.params, inner.params)
    return MapExpr(_substitute(outer.root, inner.root, {}), params)


def iterate_expr(e, n):
    """e composed with itself n times (n >= 1)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    result = e
    for _ in range(n - 1):
        result = compose(e, result)
    return result
