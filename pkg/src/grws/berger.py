"""Atomic Berger measures: construction, truncation bounds, verification.

A subnormal weighted shift has a unique probability measure (its Berger
measure) whose power moments are the shift's moments g(n).  For the
geometric family the candidate measure is supported on the points
1/p**i, with masses built from the step ratios

    m(0) = 1,    m(i) = p * (D - p**(i-1) * N) / (p**i - 1),   i >= 1,

their running products c(n) = m(0) * ... * m(n), and the normalizer
a = 1 / sum(c).  Whenever every m(i) is nonnegative the measure

    mu = a * sum_i c(i) * delta(1 / p**i)

reproduces the moments exactly (matching coefficients of p**(-i*n) in the
moment recurrence); a negative m(i) means the construction does not apply
at this point and is reported with its index, without drawing any
operator-theoretic conclusion from the failure.

Support is finite exactly when some m(i) vanishes: on the diagonal D == N
the measure is the single point mass at 1, and on the ray D == p**k * N
with N > 0 it has exactly k + 1 atoms.  Otherwise the support is
countable and the measure is truncated at a caller-chosen depth with a
certified geometric tail bound: the ratios m(i) are eventually monotone
with limit -N, so r = max(-N, m(i) for i past a burn-in) dominates every
later ratio, the omitted mass is at most T = c_last * r / (1 - r), and
with the truncated masses renormalized to c(i)/S (S the retained sum)
every reconstructed moment is within T / (S + T) of the true one,
uniformly in the moment index because all atoms lie in (0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import ShiftParams, classify, moment
from .rationals import format_rational
from .sequences import HOLDS, VIOLATED, PropertyVerdict, Witness

TAIL_BURN_IN = 4
DEFAULT_DEPTH = 24


class ConstructionError(ValueError):
    """The atomic construction does not apply (or cannot be certified)."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class BergerCoefficients:
    """Step ratios m, cumulative masses c, and the normalizer.

    For finite support the normalizer is exact and the low and high
    fields coincide; for truncated support it is the certified interval
    [1/(S+T), 1/S] with S the retained sum and T the tail bound.
    ``boundary`` flags points with D == -N exactly, where the construction
    still goes through but sits on the edge of its usual region.
    """

    step_ratios: tuple[Fraction, ...]
    cumulative: tuple[Fraction, ...]
    normalizer_low: Fraction
    normalizer_high: Fraction
    finite: bool
    boundary: bool

    @property
    def normalizer_exact(self) -> Optional[Fraction]:
        return self.normalizer_low if self.finite else None

    def to_json(self) -> dict:
        out = {
            "m": [format_rational(x) for x in self.step_ratios],
            "c": [format_rational(x) for x in self.cumulative],
            "finite": self.finite,
            "boundary": self.boundary,
        }
        if self.finite:
            out["normalizer"] = format_rational(self.normalizer_low)
        else:
            out["normalizer"] = {
                "low": format_rational(self.normalizer_low),
                "high": format_rational(self.normalizer_high),
            }
        return out


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite list of (location, mass) pairs at locations 1, 1/p, 1/p**2, ...

    When ``truncated`` the masses are the retained c(i) renormalized to
    sum to one, and ``tail_bound`` bounds both the omitted true mass and
    the moment reconstruction error, uniformly in the moment index.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...]
    truncated: bool
    tail_bound: Fraction
    boundary: bool = False

    def total_mass(self) -> Fraction:
        return sum((density for _, density in self.atoms), Fraction(0))

    def power_moment(self, n: int) -> Fraction:
        return sum(
            (density * location**n for location, density in self.atoms), Fraction(0)
        )

    def to_json(self) -> dict:
        out = {
            "atoms": [
                {"atom": format_rational(loc), "density": format_rational(den)}
                for loc, den in self.atoms
            ],
            "truncated": self.truncated,
        }
        if self.truncated:
            out["tail_bound"] = format_rational(self.tail_bound)
        if self.boundary:
            out["boundary"] = True
        return out


def _step_ratio(params: ShiftParams, i: int) -> Fraction:
    if i == 0:
        return Fraction(1)
    p, n_off, d_off = params.p, params.num_offset, params.den_offset
    return p * (d_off - p ** (i - 1) * n_off) / (p**i - 1)


def berger_coefficients(params: ShiftParams, depth: int = DEFAULT_DEPTH) -> BergerCoefficients:
    """Compute m(0..depth) and c(0..depth), stopping early at a zero ratio.

    Raises ConstructionError("negative coefficient ...") as soon as some
    m(i) < 0; for infinite support also certifies the geometric tail
    ratio, raising if the available depth cannot certify r < 1.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    n_off, d_off = params.num_offset, params.den_offset
    boundary = d_off == -n_off
    step_ratios = [Fraction(1)]
    finite = False
    for i in range(1, depth + 1):
        mi = _step_ratio(params, i)
        if mi < 0:
            raise ConstructionError(
                f"negative coefficient m({i}) = {mi}: atomic construction "
                f"does not apply at (N, D) = ({n_off}, {d_off})",
                index=i,
            )
        step_ratios.append(mi)
        if mi == 0:
            finite = True
            break
    cumulative = [Fraction(1)]
    for mi in step_ratios[1:]:
        if mi == 0:
            break
        cumulative.append(cumulative[-1] * mi)
    retained_sum = sum(cumulative, Fraction(0))
    if finite:
        normalizer = 1 / retained_sum
        return BergerCoefficients(
            step_ratios=tuple(step_ratios),
            cumulative=tuple(cumulative),
            normalizer_low=normalizer,
            normalizer_high=normalizer,
            finite=True,
            boundary=boundary,
        )
    tail = _tail_mass_bound(step_ratios, cumulative, n_off)
    return BergerCoefficients(
        step_ratios=tuple(step_ratios),
        cumulative=tuple(cumulative),
        normalizer_low=1 / (retained_sum + tail),
        normalizer_high=1 / retained_sum,
        finite=False,
        boundary=boundary,
    )


def _tail_mass_bound(step_ratios: list[Fraction], cumulative: list[Fraction],
                     n_off: Fraction) -> Fraction:
    """Certified bound on the omitted cumulative mass sum past the depth.

    The ratios m(i) are monotone past i = 1 with limit -N (they equal
    -N plus a term of constant sign shrinking like p**(-i)), so the
    maximum of the computed ratios past the burn-in together with -N
    dominates every omitted ratio, and the tail is geometric under it.
    Infinite support forces N <= 0, so -N is a valid candidate ratio.
    """
    candidates = [-n_off]
    past_burn_in = step_ratios[TAIL_BURN_IN + 1:]
    candidates.extend(past_burn_in)
    if not past_burn_in:
        candidates.append(step_ratios[-1])
    ratio = max(candidates)
    if ratio >= 1:
        raise ConstructionError(
            f"tail ratio {ratio} >= 1 at this depth; increase the truncation depth"
        )
    return cumulative[-1] * ratio / (1 - ratio)


def berger_measure(params: ShiftParams, depth: int = DEFAULT_DEPTH) -> AtomicMeasure:
    """Atomic measure at locations 1/p**i, exact when the support is finite.

    Finite support: masses a * c(i) summing to exactly 1.  Infinite
    support: truncated at ``depth`` with masses c(i)/S and the certified
    tail bound described in the module docstring.
    """
    coeffs = berger_coefficients(params, depth)
    locations = [Fraction(1)]
    for _ in range(len(coeffs.cumulative) - 1):
        locations.append(locations[-1] / params.p)
    if coeffs.finite:
        a = coeffs.normalizer_low
        atoms = tuple((loc, a * ci) for loc, ci in zip(locations, coeffs.cumulative))
        return AtomicMeasure(atoms=atoms, truncated=False, tail_bound=Fraction(0),
                             boundary=coeffs.boundary)
    retained_sum = sum(coeffs.cumulative, Fraction(0))
    # normalizer_low is 1/(S+T), so the tail T is recoverable exactly.
    tail = 1 / coeffs.normalizer_low - retained_sum
    atoms = tuple(
        (loc, ci / retained_sum) for loc, ci in zip(locations, coeffs.cumulative)
    )
    return AtomicMeasure(
        atoms=atoms,
        truncated=True,
        tail_bound=tail / (retained_sum + tail),
        boundary=coeffs.boundary,
    )


def verify_representation(params: ShiftParams, measure: AtomicMeasure,
                          n_max: int) -> PropertyVerdict:
    """Check the measure's power moments against the shift's moments.

    Exact equality is required for untruncated measures; truncated ones
    must match within the certified tail bound at every tested index.
    The witness on failure carries the moment index and the discrepancy.
    """
    for n in range(n_max + 1):
        discrepancy = measure.power_moment(n) - moment(params, n)
        if measure.truncated:
            ok = abs(discrepancy) <= measure.tail_bound
        else:
            ok = discrepancy == 0
        if not ok:
            return PropertyVerdict(
                VIOLATED, Witness(order=n, index=0, value=discrepancy), (n_max, 0)
            )
    return PropertyVerdict(HOLDS, None, (n_max, 0))


def atom_count_on_ray(params: ShiftParams, ray_depth: int = 64) -> int:
    """Number of atoms, k + 1, for a point on the ray D == p**k * N.

    The diagonal counts as the k = 0 ray (single point mass at 1).
    Points off every ray are rejected.
    """
    label = classify(params, ray_depth=ray_depth)
    if label.special_ray_k is None:
        raise ConstructionError(
            f"point (N, D) = ({params.num_offset}, {params.den_offset}) "
            "is not on a ray D == p**k * N"
        )
    return label.special_ray_k + 1
