"""Exact rational parsing, formatting, and integer-root helpers.

Every quantity that feeds a decision in this package is a
``fractions.Fraction``; floats never enter a sign test or an equality
test.  The wire format for a rational is the plain ``num/den`` string
("-1/2", "3").  Decimal strings are rejected rather than rounded,
because a silent conversion of "0.3" would corrupt exact membership
tests such as D == p**k * N.
"""

from __future__ import annotations

import re
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")


class RationalFormatError(ValueError):
    """Input is not an exact num/den rational string."""


def parse_rational(text: str) -> Fraction:
    """Parse "num/den" (or a bare integer string) into a Fraction."""
    s = text.strip()
    if not _RATIONAL_RE.match(s):
        raise RationalFormatError(
            f"not an exact rational: {text!r} (expected num/den, e.g. -1/2)"
        )
    return Fraction(s)


def format_rational(value: Fraction) -> str:
    """Render as "num/den" in lowest terms ("num" when the denominator is 1)."""
    return str(Fraction(value))


def _floor_root(value: int, degree: int) -> int:
    """Largest r with r**degree <= value, for value >= 0, degree >= 1."""
    if value < 0:
        raise ValueError("negative value has no integer root here")
    if degree == 1 or value in (0, 1):
        return value
    hi = 1
    while hi**degree <= value:
        hi <<= 1
    lo = hi >> 1
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid**degree <= value:
            lo = mid
        else:
            hi = mid
    return lo


def nth_root_exact(value: int, degree: int) -> int | None:
    """Exact integer degree-th root of a nonnegative integer, or None."""
    r = _floor_root(value, degree)
    return r if r**degree == value else None


def rational_power(base: Fraction, exponent: Fraction) -> Fraction | None:
    """base**exponent as an exact Fraction when rational, else None.

    With exponent u/v in lowest terms the value is rational exactly when
    the numerator and denominator of base (in lowest terms) are both
    perfect v-th powers.
    """
    base = Fraction(base)
    exponent = Fraction(exponent)
    if base <= 0:
        raise ValueError("rational_power expects base > 0")
    u, v = exponent.numerator, exponent.denominator
    root_num = nth_root_exact(base.numerator, v)
    if root_num is None:
        return None
    root_den = nth_root_exact(base.denominator, v)
    if root_den is None:
        return None
    return Fraction(root_num, root_den) ** u
