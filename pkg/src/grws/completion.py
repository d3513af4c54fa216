"""Moment completion: recover family parameters from an initial moment
segment of a two-atomic measure.

The target data is the measure (delta_1 + a * delta_{1/p}) / (1 + a) with
mass at 1 and at 1/p, whose first moments are

    g0 = 1,   g1 = (1 + a/p) / (1 + a),   g2 = (1 + a/p**2) / (1 + a).

Keeping the geometric parameter p, the unique in-family completion is
(N, D) = (a/p, a), which lies on the ray D == p * N and reproduces the
original measure; it exists inside the square only for a < 1.  Allowing a
different geometric parameter q yields a one-parameter family indexed by
N in (-1, 0]:

    q = (a + N*p**2 - N*p + p**2) / (a + p),
    D = (a*N*p + a*p - a + N*p) / (a + p),

with q and D strictly increasing in N.  The completed point crosses from
the cone N <= D <= 0 into 0 <= D <= -N and then into -N <= D at the two
thresholds

    t1 = (a - a*p) / ((a + 1) * p),      t2 = (a - a*p) / (a*p + a + 2*p),

so the completion can be steered into any of the three subnormal cones.
For p > 2 and mass ratios a >= p / (p - 2) the tail of the third range
pushes D to 1 or beyond; such requests are rejected by the square
validation rather than silently returned.

Fitting (N, D) from (g1, g2) at a fixed q is a 2x2 linear solve, which
also settles uniqueness questions and negative results exactly: a
two-atomic target with an atom at 0 forces D = -1 for every q, so no
in-square completion exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import (
    ParameterError,
    SectorLabel,
    ShiftParams,
    classify,
    make_params,
    moment,
)
from .rationals import format_rational


class CompletionError(ValueError):
    """The requested completion does not exist inside the open square."""


@dataclass(frozen=True)
class TwoAtomSpec:
    """Measure (delta_1 + a * delta_{1/p}) / (1 + a): atoms at 1 and 1/p."""

    mass_ratio: Fraction
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mass_ratio", Fraction(self.mass_ratio))
        object.__setattr__(self, "p", Fraction(self.p))
        if self.mass_ratio <= 0:
            raise ValueError("mass ratio a must be positive")
        if self.p <= 1:
            raise ValueError("p must exceed 1")


@dataclass(frozen=True)
class CompletionSolution:
    """A family member whose first three moments equal the target's."""

    q: Fraction
    num_offset: Fraction
    den_offset: Fraction
    sector: SectorLabel

    def params(self) -> ShiftParams:
        return make_params(self.q, self.num_offset, self.den_offset)

    def to_json(self) -> dict:
        return {
            "q": format_rational(self.q),
            "N": format_rational(self.num_offset),
            "D": format_rational(self.den_offset),
            "sector": self.sector.to_json(),
        }


def target_moments(spec: TwoAtomSpec) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (g0, g1, g2) of the two-atom measure."""
    a, p = spec.mass_ratio, spec.p
    return (
        Fraction(1),
        (1 + a / p) / (1 + a),
        (1 + a / p**2) / (1 + a),
    )


def _checked_solution(q: Fraction, n_off: Fraction, d_off: Fraction,
                      spec: TwoAtomSpec) -> CompletionSolution:
    try:
        params = make_params(q, n_off, d_off)
    except ParameterError as exc:
        raise CompletionError(f"target outside square: {exc}") from exc
    _, g1, g2 = target_moments(spec)
    if moment(params, 1) != g1 or moment(params, 2) != g2:
        raise AssertionError(
            f"completion formulas failed to reproduce the target moments at {params}"
        )
    return CompletionSolution(
        q=q, num_offset=n_off, den_offset=d_off, sector=classify(params)
    )


def same_p_completion(spec: TwoAtomSpec) -> CompletionSolution:
    """The unique completion keeping the geometric parameter p.

    It is (N, D) = (a/p, a), on the ray D == p * N, and reproduces the
    original measure; a >= 1 leaves the square and is rejected.
    """
    a, p = spec.mass_ratio, spec.p
    if a >= 1:
        raise CompletionError(
            f"target outside square: the same-p completion needs D = a = {a} < 1"
        )
    return _checked_solution(p, a / p, a, spec)


def family_completion(spec: TwoAtomSpec, num_offset) -> CompletionSolution:
    """The completion with prescribed N in (-1, 0] and a new parameter q."""
    n_off = Fraction(num_offset)
    if not (-1 < n_off <= 0):
        raise CompletionError(f"N must lie in (-1, 0], got {n_off}")
    a, p = spec.mass_ratio, spec.p
    q = (a + n_off * p**2 - n_off * p + p**2) / (a + p)
    d_off = (a * n_off * p + a * p - a + n_off * p) / (a + p)
    return _checked_solution(q, n_off, d_off, spec)


def family_sector_ranges(spec: TwoAtomSpec) -> dict[str, tuple[Fraction, Fraction]]:
    """Half-open ranges (low, high] of N steering the completion per cone.

    Keys "I", "II", "III" map to the N-intervals whose completions land
    in N <= D <= 0, 0 <= D <= -N, and -N <= D respectively; each interval
    is (low, high] and they abut at the two exact thresholds.
    """
    a, p = spec.mass_ratio, spec.p
    t1 = (a - a * p) / ((a + 1) * p)
    t2 = (a - a * p) / (a * p + a + 2 * p)
    return {
        "I": (Fraction(-1), t1),
        "II": (t1, t2),
        "III": (t2, Fraction(0)),
    }


def fit_to_initial_moments(q, g1, g2) -> Optional[tuple[Fraction, Fraction]]:
    """Solve for the unique (N, D) with moments (g1, g2) at parameter q.

    The two moment equations are linear in (N, D):

        1 + N = g1 * (1 + D)          (first moment)
        q + N = (g2/g1) * (q + D)     (second weight)

    Returns None when the system is singular, or when the solution falls
    outside the open square (including the forced D = -1 of a target
    carrying an atom at 0), or when q <= 1.
    """
    q = Fraction(q)
    g1 = Fraction(g1)
    g2 = Fraction(g2)
    if q <= 1 or g1 <= 0 or g2 <= 0:
        return None
    r = g2 / g1
    if g1 == r:
        return None
    d_off = (q * (r - 1) + 1 - g1) / (g1 - r)
    n_off = g1 * (1 + d_off) - 1
    if not (-1 < n_off < 1 and -1 < d_off < 1):
        return None
    return n_off, d_off


def three_atom_completion_search(g1, g2, g3,
                                 q_candidates: Sequence) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Search candidate parameters q for completions of (1, g1, g2, g3).

    For each q the pair (N, D) is fitted from (g1, g2) exactly, then kept
    only if the third moment also matches exactly.  Returns the list of
    (q, N, D) found; an empty list reports a failed search at these
    candidates and asserts nothing beyond that.
    """
    g1, g2, g3 = Fraction(g1), Fraction(g2), Fraction(g3)
    found = []
    for q in q_candidates:
        q = Fraction(q)
        fitted = fit_to_initial_moments(q, g1, g2)
        if fitted is None:
            continue
        n_off, d_off = fitted
        params = make_params(q, n_off, d_off)
        if moment(params, 3) == g3:
            found.append((q, n_off, d_off))
    return found
