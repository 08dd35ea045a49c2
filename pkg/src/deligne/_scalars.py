"""Scalar arithmetic helpers shared by the cochain and holonomy layers.

Two arithmetic modes coexist.  In float mode angles are radians stored as
Python floats.  In exact mode angles are :class:`fractions.Fraction` values
measured in turns, i.e. units of 2*pi, because 2*pi itself has no finite
rational representation.  All the algebra in this package is Z-linear, so
it never needs to know which unit is in force; only wrapping, integrality
tests and report formatting consult :func:`full_turn`.
"""

from __future__ import annotations

from fractions import Fraction
from math import pi, fsum
from typing import Iterable, Union

Scalar = Union[float, Fraction]

TWO_PI = 2.0 * pi


def full_turn(exact: bool) -> Scalar:
    """One full turn in the active unit: 2*pi radians or Fraction(1)."""
    return Fraction(1) if exact else TWO_PI


def zero(exact: bool) -> Scalar:
    return Fraction(0) if exact else 0.0


def coerce(value, exact: bool) -> Scalar:
    """Coerce an entry value into the active mode.

    Exact mode accepts ints, Fractions and strings like "3/4"; floats are
    rejected because they carry no exact meaning.  Float mode accepts
    anything float() does.
    """
    if exact:
        if isinstance(value, float):
            raise TypeError("exact mode requires rational values, got a float")
        return Fraction(value)
    if isinstance(value, Fraction):
        return float(value)
    return float(value)


def wrap(x: Scalar, exact: bool) -> Scalar:
    """Reduce an angle to the half-open fundamental window (-T/2, T/2]."""
    turn = full_turn(exact)
    r = x % turn
    if r > turn / 2:
        r -= turn
    return r


def wrap_distance(a: Scalar, b: Scalar, exact: bool) -> Scalar:
    """Distance between two angles modulo a full turn, in [0, T/2]."""
    return abs(wrap(a - b, exact))


def nearest_integer(x: Scalar) -> int:
    """Nearest integer; round() ties go to even, which never matters at
    the tolerances this is used with."""
    return int(round(x)) if isinstance(x, float) else int(round(Fraction(x)))


def integer_residual(x: Scalar, exact: bool) -> tuple[int, Scalar]:
    """Split an angle into (nearest multiple of a turn, absolute residual)."""
    turn = full_turn(exact)
    n = nearest_integer(x / turn)
    return n, abs(x - n * turn)


def tree_sum(values: Iterable[Scalar], exact: bool) -> Scalar:
    """Deterministic sum, independent of how the caller batched the terms.

    Floats use math.fsum (exact up to one final rounding, hence stable
    under reordering of equal inputs); Fractions sum exactly.
    """
    vals = list(values)
    if not vals:
        return zero(exact)
    if exact:
        total = Fraction(0)
        for v in vals:
            total += v
        return total
    return fsum(vals)


def to_radians(x: Scalar, exact: bool) -> float:
    """Numeric view of an angle in radians, for reports only."""
    return float(x) * TWO_PI if exact else float(x)
