"""Dual-mode arithmetic helpers.

Weights are carried as exact rationals (`int` / `fractions.Fraction`)
whenever the inputs allow it, and as 64-bit floats otherwise.  Exact
algorithms (transport, couplings) internally lift floats to Fractions --
every float is a dyadic rational, so the lift is lossless -- and convert
back at the boundary so callers see the arithmetic of their inputs.
"""

from fractions import Fraction
from numbers import Rational

Number = int | float | Fraction

#: Absolute tolerance for float-mode normalization and marginal checks.
FLOAT_TOL = 1e-12


def is_exact(x: Number) -> bool:
    """True if x is carried exactly (int or Fraction, not float)."""
    return isinstance(x, Rational)


def all_exact(xs) -> bool:
    return all(is_exact(x) for x in xs)


def to_fraction(x: Number) -> Fraction:
    """Lossless lift to Fraction (floats are dyadic rationals)."""
    if isinstance(x, Rational):
        return Fraction(x)
    return Fraction(x)


def as_mode(x: Fraction, exact: bool) -> Number:
    """Render an exact value in the caller's arithmetic."""
    return x if exact else float(x)


def parse_number(text: str, rational: bool = False) -> Number:
    """Parse a numeric literal; decimal strings stay exact in rational mode.

    Accepts "3/10", "0.3", "2" and scientific notation (float mode only).
    """
    text = text.strip()
    if rational:
        return Fraction(text)
    if "/" in text:
        return Fraction(text)
    f = float(text)
    return int(f) if f.is_integer() and "e" not in text.lower() and "." not in text else f


def number_to_json(x: Number):
    """JSON encoding: Fractions as "p/q" strings, everything else native."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


def number_from_json(v) -> Number:
    if isinstance(v, str):
        return Fraction(v)
    return v
