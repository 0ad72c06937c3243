"""Scalar arithmetic in two kinds: exact rationals and float64.

Exact values are `fractions.Fraction` instances (ints are promoted on
entry), which gives reduced, positive-denominator canonical form for free.
Float values are plain Python floats.  The kinds never mix silently:
containers carry a kind tag and every binary operation on tagged objects
checks compatibility and raises `KindMismatch` instead of coercing.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .errors import InputError, KindMismatch

EXACT = "exact"
FLOAT = "float"

Scalar = Union[Fraction, float]


def kind_of(x: Scalar) -> str:
    if isinstance(x, (Fraction, int)):
        return EXACT
    if isinstance(x, float):
        return FLOAT
    raise InputError(f"not a scalar: {x!r}")


def promote(x, kind: str) -> Scalar:
    """Convert a raw number to the requested kind.

    Ints are legal input for either kind; floats are only legal in float
    kind, and Fractions only in exact kind.
    """
    if kind == EXACT:
        if isinstance(x, float):
            raise KindMismatch(f"float literal {x!r} in exact context")
        return Fraction(x)
    if kind == FLOAT:
        return float(x)
    raise InputError(f"unknown scalar kind {kind!r}")


def join_kinds(a: str, b: str) -> str:
    if a != b:
        raise KindMismatch(f"cannot mix {a} and {b} scalars")
    return a


def zero(kind: str) -> Scalar:
    return Fraction(0) if kind == EXACT else 0.0


def one(kind: str) -> Scalar:
    return Fraction(1) if kind == EXACT else 1.0


def is_zero(x: Scalar, tol: Scalar | None = None) -> bool:
    """Zero test: literal in exact kind, |x| <= tol in float kind."""
    if isinstance(x, Fraction) or isinstance(x, int):
        return x == 0
    if tol is None:
        tol = 1e-10
    return abs(x) <= tol


def to_float(x: Scalar) -> float:
    return float(x)


def parse_scalar(text, kind: str | None = None) -> Scalar:
    """Parse a scalar from document syntax.

    Accepted forms: int, "p/q" fraction string, decimal string or float.
    A decimal or float produces float kind; ints and fraction strings are
    exact.  If `kind` is given the result must land in that kind.
    """
    if isinstance(text, bool):
        raise InputError(f"boolean is not a scalar: {text!r}")
    if isinstance(text, int):
        value: Scalar = Fraction(text)
    elif isinstance(text, float):
        value = text
    elif isinstance(text, str):
        s = text.strip()
        try:
            if "/" in s:
                value = Fraction(s)
            elif "." in s or "e" in s or "E" in s:
                value = float(s)
            else:
                value = Fraction(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse scalar {text!r}: {exc}") from exc
    else:
        raise InputError(f"cannot parse scalar {text!r}")
    if kind is not None and kind_of(value) != kind:
        raise KindMismatch(
            f"scalar {text!r} has kind {kind_of(value)}, expected {kind}")
    return value


def format_scalar(x: Scalar) -> str:
    """Canonical rendering: reduced fraction with the sign on the
    numerator ("-p/q"), bare integer when the denominator is 1, repr for
    floats."""
    if isinstance(x, (Fraction, int)):
        f = Fraction(x)
        if f.denominator == 1:
            return str(f.numerator)
        return f"{f.numerator}/{f.denominator}"
    return repr(float(x))


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational, or None if irrational."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_nth_root(x: Fraction, n: int) -> Fraction | None:
    """Exact n-th root of a nonnegative rational, or None."""
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)

    def iroot(m: int) -> int | None:
        r = round(m ** (1.0 / n))
        for c in (r - 1, r, r + 1):
            if c >= 0 and c ** n == m:
                return c
        return None

    rn = iroot(x.numerator)
    rd = iroot(x.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def rationalize(x: float, max_denominator: int = 10**6) -> Fraction:
    """Best rational approximation; used to suggest exact eigenvalues that
    are then verified exactly before being trusted."""
    return Fraction(x).limit_denominator(max_denominator)
