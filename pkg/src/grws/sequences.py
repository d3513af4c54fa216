"""Finite-difference operators and property batteries on exact sequences.

The n-th forward difference used throughout is

    (diff^n a)(k) = sum_{i=0..n} (-1)**i * C(n, i) * a(k + i),

so diff a = a(k) - a(k+1).  A sequence is n-monotone when diff^n a >= 0
at every index, n-alternating when diff^n a <= 0, and the log variants
apply the same sign conditions to ln a (allowing negative logarithms).
"Completely" monotone or alternating means the condition holds for every
n; a finite battery can only certify that up to a chosen depth, so
verdicts say "holds-to-depth" and never plain "holds".

Log flavors never touch floating point for rational input: the sign of
diff^n applied to ln a equals the sign of Q - 1 for the exact rational

    Q = prod_{i=0..n} a(k + i) ** ((-1)**i * C(n, i)),

so those verdicts are exact as well.  Only certified interval sequences
(irrational resamplings) go through interval arithmetic, with precision
escalation and an explicit "indeterminate" status when a sign cannot be
certified at the retry cap.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Sequence, Union

from .intervals import (
    CertifiedSequence,
    endpoint_repr,
    geometric_resample,
    nabla_enclosure,
    working_precision,
)
from .model import ShiftParams, make_params, weight_sq
from .rationals import format_rational, rational_power

HOLDS = "holds-to-depth"
VIOLATED = "violated"
INDETERMINATE = "indeterminate"

FLAVORS = ("monotone", "alternating", "log-monotone", "log-alternating")

ExactSequence = Callable[[int], Fraction]

START_PRECISION_BITS = 128
MAX_PRECISION_DOUBLINGS = 4


@dataclass(frozen=True)
class Witness:
    """First cell (order, index) at which a battery failed or was undecided.

    ``value`` is the exact offending quantity: the difference itself for
    plain flavors, Q - 1 for log flavors (same sign as the log
    difference).  ``bounds`` carries a certified enclosure instead when
    the sequence is not exact, and ``spacing`` identifies the resampling
    spacing for probe verdicts.
    """

    order: int
    index: int
    value: Optional[Fraction] = None
    bounds: Optional[tuple[str, str]] = None
    spacing: Optional[Fraction] = None

    def to_json(self) -> dict:
        out: dict = {"n": self.order, "k": self.index}
        if self.value is not None:
            out["value"] = format_rational(self.value)
        if self.bounds is not None:
            out["value"] = {"low": self.bounds[0], "high": self.bounds[1]}
        if self.spacing is not None:
            out["spacing"] = format_rational(self.spacing)
        return out


@dataclass(frozen=True)
class PropertyVerdict:
    status: str
    witness: Optional[Witness]
    depth: tuple[int, int]

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness.to_json() if self.witness else None,
            "depth": {"n_max": self.depth[0], "k_max": self.depth[1]},
        }


def nabla(seq: ExactSequence, n: int, k: int) -> Fraction:
    """Exact n-th forward difference of seq at index k."""
    if n < 0 or k < 0:
        raise ValueError("difference order and index must be nonnegative")
    total = Fraction(0)
    for i in range(n + 1):
        term = Fraction(seq(k + i)) * comb(n, i)
        total = total + term if i % 2 == 0 else total - term
    return total


def nabla_ratio(seq: ExactSequence, n: int, k: int) -> Fraction:
    """Multiplicative n-th difference: exp(diff^n ln seq)(k) as an exact rational.

    Requires strictly positive terms; compare against 1 to read off the
    sign of the n-th difference of ln seq.
    """
    if n < 0 or k < 0:
        raise ValueError("difference order and index must be nonnegative")
    ratio = Fraction(1)
    for i in range(n + 1):
        term = Fraction(seq(k + i))
        if term <= 0:
            raise ValueError(f"log difference needs positive terms, got {term} at {k + i}")
        exponent = comb(n, i) if i % 2 == 0 else -comb(n, i)
        ratio *= term**exponent
    return ratio


def is_n_monotone(seq: ExactSequence, n: int, k_max: int) -> PropertyVerdict:
    """diff^n seq >= 0 for all indices up to k_max, else first witness."""
    for k in range(k_max + 1):
        value = nabla(seq, n, k)
        if value < 0:
            return PropertyVerdict(VIOLATED, Witness(n, k, value=value), (n, k_max))
    return PropertyVerdict(HOLDS, None, (n, k_max))


def is_n_alternating(seq: ExactSequence, n: int, k_max: int) -> PropertyVerdict:
    """diff^n seq <= 0 for all indices up to k_max, else first witness."""
    for k in range(k_max + 1):
        value = nabla(seq, n, k)
        if value > 0:
            return PropertyVerdict(VIOLATED, Witness(n, k, value=value), (n, k_max))
    return PropertyVerdict(HOLDS, None, (n, k_max))


def n_contractive(moments: ExactSequence, n: int, k_max: int) -> PropertyVerdict:
    """n-contractivity tested on basis vectors.

    The condition is the nonnegativity, at every starting index, of the
    alternating binomial sum of n + 1 consecutive moments.  This is the
    same quantity as diff^n of the moment sequence, but it is computed
    here independently from its own formula so the two routes can be
    checked against each other.
    """
    for k in range(k_max + 1):
        total = Fraction(0)
        for i in range(n + 1):
            term = Fraction(moments(k + i)) * comb(n, i)
            total = total + term if i % 2 == 0 else total - term
        if total < 0:
            return PropertyVerdict(VIOLATED, Witness(n, k, value=total), (n, k_max))
    return PropertyVerdict(HOLDS, None, (n, k_max))


def _exact_cell(seq: ExactSequence, flavor: str, n: int, k: int):
    if flavor == "monotone":
        value = nabla(seq, n, k)
        return value >= 0, value
    if flavor == "alternating":
        value = nabla(seq, n, k)
        return value <= 0, value
    ratio = nabla_ratio(seq, n, k)
    if flavor == "log-monotone":
        return ratio >= 1, ratio - 1
    return ratio <= 1, ratio - 1


def _battery_exact(seq: ExactSequence, flavor: str, n_max: int, k_max: int) -> PropertyVerdict:
    for n in range(1, n_max + 1):
        for k in range(k_max + 1):
            ok, value = _exact_cell(seq, flavor, n, k)
            if not ok:
                return PropertyVerdict(VIOLATED, Witness(n, k, value=value), (n_max, k_max))
    return PropertyVerdict(HOLDS, None, (n_max, k_max))


def _battery_certified(seq: CertifiedSequence, flavor: str, n_max: int, k_max: int,
                       start_prec: int, max_doublings: int) -> PropertyVerdict:
    log = flavor.startswith("log-")
    want_nonnegative = flavor.endswith("monotone")
    first_unknown: Optional[Witness] = None
    for n in range(1, n_max + 1):
        for k in range(k_max + 1):
            decided: Optional[bool] = None
            bounds = ("", "")
            for attempt in range(max_doublings + 1):
                with working_precision(start_prec << attempt):
                    enc = nabla_enclosure(seq, n, k, log=log)
                    bounds = (endpoint_repr(enc.a), endpoint_repr(enc.b))
                    if want_nonnegative:
                        if enc.a >= 0:
                            decided = True
                        elif enc.b < 0:
                            decided = False
                    else:
                        if enc.b <= 0:
                            decided = True
                        elif enc.a > 0:
                            decided = False
                if decided is not None:
                    break
            if decided is False:
                return PropertyVerdict(
                    VIOLATED, Witness(n, k, bounds=bounds), (n_max, k_max)
                )
            if decided is None and first_unknown is None:
                first_unknown = Witness(n, k, bounds=bounds)
    if first_unknown is not None:
        return PropertyVerdict(INDETERMINATE, first_unknown, (n_max, k_max))
    return PropertyVerdict(HOLDS, None, (n_max, k_max))


def battery(seq: Union[ExactSequence, CertifiedSequence], flavor: str,
            n_max: int = 10, k_max: int = 25, *,
            start_prec: int = START_PRECISION_BITS,
            max_doublings: int = MAX_PRECISION_DOUBLINGS) -> PropertyVerdict:
    """Joint verdict over orders 1..n_max and indices 0..k_max.

    Exact sequences are decided exactly (never indeterminate); certified
    sequences escalate the working precision, doubling from start_prec up
    to max_doublings times per cell before giving up on its sign.  The
    reported witness is the first certified violation in lexicographic
    (n, k) order; if no violation is certified but some cell stayed
    undecided, the verdict is indeterminate at the first such cell.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"unknown battery flavor {flavor!r}, expected one of {FLAVORS}")
    if isinstance(seq, CertifiedSequence):
        return _battery_certified(seq, flavor, n_max, k_max, start_prec, max_doublings)
    return _battery_exact(seq, flavor, n_max, k_max)


def function_alternation_probe(params: ShiftParams, flavor: str,
                               spacings: Sequence, n_max: int = 8,
                               k_max: int = 16) -> PropertyVerdict:
    """Probe the squared-weight function for (log-)complete alternation on
    resampled grids.

    For each spacing h > 0 the sequence x(k) = (p**(h*k) + N) / (p**(h*k) + D)
    is tested to depth.  Since p**(h*k) = (p**h)**k, a spacing with p**h
    rational is handled exactly by substituting p -> p**h; otherwise terms
    are enclosed by certified interval arithmetic.  A (log-)Bernstein
    interpolant of the squared weights would force (log-)alternation at
    every spacing, so a single violated spacing is a refutation, while
    holds-to-depth only accumulates evidence.
    """
    if flavor not in ("plain", "log"):
        raise ValueError(f"probe flavor must be 'plain' or 'log', got {flavor!r}")
    inner = "alternating" if flavor == "plain" else "log-alternating"
    spacing_values = [Fraction(h) for h in spacings]
    if not spacing_values:
        raise ValueError("at least one spacing is required")
    if any(h <= 0 for h in spacing_values):
        raise ValueError("spacings must be positive")
    first_unknown: Optional[Witness] = None
    for h in spacing_values:
        resampled_base = rational_power(params.p, h)
        if resampled_base is not None:
            resampled = make_params(resampled_base, params.num_offset, params.den_offset)
            verdict = battery(lambda k: weight_sq(resampled, k), inner, n_max, k_max)
        else:
            certified = geometric_resample(
                params.p, h, params.num_offset, params.den_offset
            )
            verdict = battery(certified, inner, n_max, k_max)
        if verdict.status == VIOLATED:
            witness = replace(verdict.witness, spacing=h)
            return PropertyVerdict(VIOLATED, witness, (n_max, k_max))
        if verdict.status == INDETERMINATE and first_unknown is None:
            first_unknown = replace(verdict.witness, spacing=h)
    if first_unknown is not None:
        return PropertyVerdict(INDETERMINATE, first_unknown, (n_max, k_max))
    return PropertyVerdict(HOLDS, None, (n_max, k_max))
