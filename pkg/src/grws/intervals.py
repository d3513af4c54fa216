"""Certified interval enclosures (mpmath) for sequences with irrational terms.

Rational parameters keep every battery decision in exact integer
arithmetic; enclosures are needed only when an operation leaves the
rationals, which in this package means resampling the squared-weight
function at a spacing h with p**h irrational.  All enclosures come from
mpmath interval arithmetic, so a certified sign is a proof and an
uncertifiable sign is reported as such, never guessed.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction
from math import comb
from typing import Callable

from mpmath import iv


@contextmanager
def working_precision(bits: int):
    """Temporarily set the interval working precision (in bits)."""
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def iv_fraction(q: Fraction):
    """Enclosure of an exact rational at the current working precision."""
    q = Fraction(q)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def endpoint_repr(x) -> str:
    """Deterministic short string for one interval endpoint."""
    return repr(float(x))


class CertifiedSequence:
    """A positive real sequence delivered as certified enclosures.

    ``enclosure(k)`` must return an interval containing the true k-th term,
    evaluated at the current working precision, so callers control the
    certified error bound per term by choosing the precision.
    """

    def __init__(self, term: Callable[[int], "iv.mpf"], description: str = ""):
        self._term = term
        self.description = description

    def enclosure(self, k: int):
        return self._term(k)


def geometric_resample(p: Fraction, spacing: Fraction, num_offset: Fraction,
                       den_offset: Fraction) -> CertifiedSequence:
    """Enclosures of (p**(h*k) + N) / (p**(h*k) + D) for a spacing h > 0.

    Used when p**h is irrational; otherwise the resampling is handled
    exactly by substituting p -> p**h.
    """
    p = Fraction(p)
    spacing = Fraction(spacing)
    num_offset = Fraction(num_offset)
    den_offset = Fraction(den_offset)
    if p <= 1 or spacing <= 0:
        raise ValueError("geometric_resample needs p > 1 and spacing > 0")

    def term(k: int):
        g = iv.exp(iv.log(iv_fraction(p)) * iv_fraction(spacing * k))
        return (g + iv_fraction(num_offset)) / (g + iv_fraction(den_offset))

    return CertifiedSequence(
        term, description=f"squared weights resampled at spacing {spacing}"
    )


def nabla_enclosure(seq: CertifiedSequence, n: int, k: int, log: bool = False):
    """Enclosure of the n-th forward difference of seq (or of ln seq) at k."""
    total = iv.mpf(0)
    for i in range(n + 1):
        term = seq.enclosure(k + i)
        if log:
            term = iv.log(term)
        contribution = term * comb(n, i)
        total = total + contribution if i % 2 == 0 else total - contribution
    return total
