"""Text formats for maps and points.

Maps are written either as a rational expression in ``z`` over Q
(``"z^2 - 2"``, ``"(z^2+1)/(2*z)"``), as two homogeneous coefficient lists
high-to-low (``"[1,0,-2]/[0,0,1]"``), or as a JSON object with ``F`` and
``G`` lists.  Points are ``"2"``, ``"-3/4"``, ``"a:b"`` or ``"inf"``.
"""

from __future__ import annotations

import ast
import json
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import gcd

from . import _poly
from .errors import ConstantMap, MapParseError
from .projective import INFINITY, ProjPoint, RationalMap, normalize_map, point

# (numerator, denominator) as low-to-high Fraction polynomials
_RatFunc = tuple[list, list]


def _rf_add(a: _RatFunc, b: _RatFunc) -> _RatFunc:
    return (_poly.padd(_poly.pmul(a[0], b[1]), _poly.pmul(b[0], a[1])), _poly.pmul(a[1], b[1]))


def _rf_neg(a: _RatFunc) -> _RatFunc:
    return (_poly.pneg(a[0]), a[1])


def _rf_mul(a: _RatFunc, b: _RatFunc) -> _RatFunc:
    return (_poly.pmul(a[0], b[0]), _poly.pmul(a[1], b[1]))


def _rf_inv(a: _RatFunc) -> _RatFunc:
    if not a[0]:
        raise MapParseError("division by zero")
    return (a[1], a[0])


def _rf_pow(a: _RatFunc, n: int) -> _RatFunc:
    if n < 0:
        a, n = _rf_inv(a), -n
    out: _RatFunc = ([Fraction(1)], [Fraction(1)])
    for _ in range(n):
        out = _rf_mul(out, a)
    return out


def _const(c: Fraction) -> _RatFunc:
    return (_poly.ptrim([Fraction(c)]), [Fraction(1)])


_MAX_EXPONENT = 4096


def _eval(node) -> _RatFunc:
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return _const(Fraction(str(node.value)) if isinstance(node.value, float) else node.value)
    if isinstance(node, ast.Name):
        if node.id != "z":
            raise MapParseError(f"unknown variable {node.id!r}; maps are written in z")
        return ([Fraction(0), Fraction(1)], [Fraction(1)])
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        val = _eval(node.operand)
        return _rf_neg(val) if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = _eval(node.right)
            value = exp[0][0] / exp[1][0] if exp[0] else Fraction(0)
            if len(exp[0]) > 1 or len(exp[1]) > 1 or value.denominator != 1:
                raise MapParseError("exponents must be integer constants")
            n = int(value)
            if abs(n) > _MAX_EXPONENT:
                raise MapParseError(f"exponent {n} is too large")
            return _rf_pow(_eval(node.left), n)
        left, right = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Add):
            return _rf_add(left, right)
        if isinstance(node.op, ast.Sub):
            return _rf_add(left, _rf_neg(right))
        if isinstance(node.op, ast.Mult):
            return _rf_mul(left, right)
        if isinstance(node.op, ast.Div):
            return _rf_mul(left, _rf_inv(right))
    raise MapParseError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _homogenize(num: list, den: list) -> RationalMap:
    g = _poly.pgcd(num, den)
    if len(g) > 1:
        num = _poly.pdivmod(num, g)[0]
        den = _poly.pdivmod(den, g)[0]
    d = max(len(num), len(den)) - 1
    if d < 1:
        raise ConstantMap("expression is constant in z")
    # coefficient of X^(d-i) Y^i is the z^(d-i) coefficient
    F = [Fraction(num[d - i]) if d - i < len(num) else Fraction(0) for i in range(d + 1)]
    G = [Fraction(den[d - i]) if d - i < len(den) else Fraction(0) for i in range(d + 1)]
    scale = 1
    for c in F + G:
        scale = scale * c.denominator // gcd(scale, c.denominator)
    return normalize_map([int(c * scale) for c in F], [int(c * scale) for c in G])


def _int_list(text) -> list[int]:
    if not isinstance(text, list) or not all(isinstance(c, (int, str)) for c in text):
        raise MapParseError("coefficient lists must hold integers")
    try:
        return [int(c) for c in text]
    except ValueError as exc:
        raise MapParseError(str(exc)) from None


def parse_map(text: str) -> RationalMap:
    """Parse a map in any supported syntax.

    Raises MapParseError, ConstantMap or DegenerateMap.
    """
    s = text.strip()
    if not s:
        raise MapParseError("empty map specification")
    if s.startswith("{"):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise MapParseError(f"invalid JSON: {exc}") from None
        if not isinstance(obj, dict) or "F" not in obj or "G" not in obj:
            raise MapParseError("JSON maps need F and G lists")
        F, G = _int_list(obj["F"]), _int_list(obj["G"])
        return _from_lists(F, G)
    if s.startswith("["):
        parts = s.split("/")
        if len(parts) != 2:
            raise MapParseError("coefficient form is [F coefficients]/[G coefficients]")
        try:
            F, G = (json.loads(p) for p in parts)
        except json.JSONDecodeError as exc:
            raise MapParseError(f"invalid coefficient list: {exc}") from None
        return _from_lists(_int_list(F), _int_list(G))
    try:
        tree = ast.parse(s.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise MapParseError(f"cannot parse {text!r}: {exc.msg}") from None
    num, den = _eval(tree)
    if not den:
        raise MapParseError("division by zero")
    if not num:
        raise ConstantMap("expression is identically zero")
    return _homogenize(num, den)


def _from_lists(F: list[int], G: list[int]) -> RationalMap:
    if len(F) != len(G):
        raise MapParseError("F and G must have the same length")
    return normalize_map(F, G)


def parse_point(text: str) -> ProjPoint:
    """Parse ``"inf"``, ``"a:b"``, an integer, a fraction or a decimal."""
    s = text.strip().lower()
    if s in ("inf", "infinity", "oo", "1:0"):
        return INFINITY
    try:
        if ":" in s:
            a, b = s.split(":")
            return point(int(a), int(b))
        if "/" in s:
            return point(Fraction(s))
        try:
            return point(int(s))
        except ValueError:
            return point(Fraction(Decimal(s)))
    except (ValueError, ZeroDivisionError, InvalidOperation):
        raise MapParseError(f"cannot parse point {text!r}") from None
