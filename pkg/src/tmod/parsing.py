"""Expression literals: rational functions in ``t`` and Laurent series in ``u``.

Both grammars are evaluated through :mod:`ast` with a whitelist of node
types; ``^`` is accepted as exponentiation.

* rational functions: integers, ``t``, ``g`` (generator of ``F_q`` when
  ``q = p^m``), ``+ - * /`` and integer powers;
* series literals: integers, ``u``, ``g`` (generator of the residue field),
  ``t`` (its image ``T(u)``), the same operators, and ``O(u^N)``.
"""
from __future__ import annotations

import ast

from .errors import ParseError
from .fields import LaurentSeries, LocalField
from .gf import FiniteField, Poly, RatFunc

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _parse(text, what):
    src = text.replace("^", "**")
    try:
        return ast.parse(src.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {what} {text!r}: {exc.msg}", 1, exc.offset) from None


class _Evaluator:
    def __init__(self, names, text, what, calls=None):
        self.names = names
        self.calls = calls or {}
        self.text = text
        self.what = what

    def fail(self, node, msg):
        raise ParseError(f"{msg} in {self.what} {self.text!r}", 1,
                         getattr(node, "col_offset", None))

    def __call__(self, node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return self.names["__int__"](node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.names:
                self.fail(node, f"unknown symbol {node.id!r}")
            return self.names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = self(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            if isinstance(node.op, ast.Pow):
                exp = _int_value(node.right)
                if exp is None:
                    self.fail(node, "exponent must be an integer")
                return self(node.left) ** exp
            left, right = self(node.left), self(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            try:
                return left / right
            except ZeroDivisionError:
                self.fail(node, "division by zero")
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in self.calls:
            return self.calls[node.func.id](node)
        self.fail(node, "unsupported syntax")


def _int_value(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _int_value(node.operand)
        return None if inner is None else -inner
    return None


def parse_rational(text: str, F: FiniteField) -> RatFunc:
    """Parse a rational function in ``t`` over ``F_q``."""
    names = {
        "t": RatFunc(Poly.t(F)),
        "__int__": lambda n: RatFunc.const(F, F.scalar(n)),
    }
    if F.r > 1:
        names[F.name] = RatFunc.const(F, F.gen())
    value = _Evaluator(names, text, "rational function")(_parse(text, "rational function"))
    if not isinstance(value, RatFunc):  # pragma: no cover - evaluator always yields RatFunc
        raise ParseError(f"not a rational function: {text!r}")
    return value


def parse_poly(text: str, F: FiniteField) -> Poly:
    value = parse_rational(text, F)
    if value.den.deg != 0:
        raise ParseError(f"{text!r} is not a polynomial in t")
    return value.num * Poly.const(F, F.inv(value.den.lead()))


def parse_series(text: str, K: LocalField) -> LaurentSeries:
    """Parse a series literal such as ``u^-1 + g*u^2 + O(u^40)``."""
    return _series_from_node(_parse(text, "series literal"), text, K)


def _series_from_node(node, text, K):
    k = K.k

    def big_o(call):
        if len(call.args) != 1 or call.keywords:
            raise ParseError(f"O(...) takes one argument in {text!r}")
        arg = call.args[0]
        if isinstance(arg, ast.BinOp) and isinstance(arg.op, ast.Pow) and \
                isinstance(arg.left, ast.Name) and arg.left.id == "u":
            n = _int_value(arg.right)
        elif isinstance(arg, ast.Name) and arg.id == "u":
            n = 1
        else:
            n = None
        if n is None:
            raise ParseError(f"O(...) must contain u^N in {text!r}")
        return K.zero(n)

    names = {
        "u": K.u(),
        "t": K.embed_t(),
        "__int__": lambda n: K.const(k.scalar(n)),
    }
    if k.r > 1:
        names[k.name] = K.const(k.gen())
    value = _Evaluator(names, text, "series literal", {"O": big_o})(node)
    return value


def parse_point(text: str, K: LocalField, d=None):
    """Comma separated series literals, one per coordinate."""
    node = _parse(text, "point")
    elts = node.elts if isinstance(node, ast.Tuple) else [node]
    point = tuple(_series_from_node(e, text, K) for e in elts)
    if d is not None and len(point) != d:
        raise ParseError(f"point {text!r} has {len(point)} coordinates, expected {d}")
    return point


def format_point(x):
    return ", ".join(str(c) for c in x)
