"""Exact rational parsing and rendering.

Every number that enters the library goes through :func:`as_rational`, so the
core never sees a float.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

RationalLike = Union[int, Fraction, str]

INF = math.inf


class RationalParseError(ValueError):
    pass


def as_rational(value: RationalLike, field: str = "value") -> Fraction:
    """Convert ``value`` to a :class:`Fraction`.

    Accepts ints, Fractions and strings such as ``"3/8"``, ``"-2"`` or
    ``"0.125"``.  Floats are rejected on purpose.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"{field}: booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise RationalParseError(f"{field}: malformed rational {value!r}") from None
    if isinstance(value, float):
        raise RationalParseError(
            f"{field}: float {value!r} is not accepted; pass a string like '3/8'"
        )
    raise RationalParseError(f"{field}: cannot interpret {value!r} as a rational")


def fmt(q) -> str:
    """Canonical reduced rendering: ``"3/8"``, ``"0"``, ``"-1/2"``, ``"inf"``."""
    if isinstance(q, float) and math.isinf(q):
        return "inf" if q > 0 else "-inf"
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def approx(q, digits: int = 12) -> float:
    """Decimal approximation for display only."""
    return round(float(q), digits)


def rational_json(q) -> dict:
    return {"exact": fmt(q), "approx": approx(q)}
