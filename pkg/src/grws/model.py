"""Parameters, weights, moments, and sector geometry of geometrically
regular weighted shifts.

A geometrically regular weighted shift is determined by a rational triple
(p, N, D) with p > 1 and (N, D) inside the open unit square.  Its squared
weights are

    w(n) = (p**n + N) / (p**n + D),      n = 0, 1, 2, ...

N shifts the numerator and D the denominator of the shared geometric
term, hence the field names ``num_offset`` and ``den_offset``.  The
moments are the running products g(0) = 1, g(n + 1) = g(n) * w(n).

Which operator-theoretic properties the shift has is decided by where
(N, D) falls among eight closed cones (sectors) of the square, together
with three exact loci: the diagonal D == N (the unweighted shift), the
rays D == p**k * N with N > 0 (finitely atomic Berger measures), and the
wedge p*N <= D <= N <= 0 (complete hyperexpansivity).  All of these are
exact equalities or sign tests, which is why everything here is Fraction
arithmetic and decimal input is rejected at the parsing layer.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from mpmath import mp

from .rationals import format_rational

SECTOR_ORDER = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")


class ParameterError(ValueError):
    """Parameter point rejected: p <= 1 or (N, D) outside the open square."""


@dataclass(frozen=True)
class ShiftParams:
    """Validated rational parameter triple (p, N, D); build via make_params."""

    p: Fraction
    num_offset: Fraction
    den_offset: Fraction

    def to_json(self) -> dict:
        return {
            "p": format_rational(self.p),
            "N": format_rational(self.num_offset),
            "D": format_rational(self.den_offset),
        }


def make_params(p, num_offset, den_offset) -> ShiftParams:
    """Validate and build a parameter triple.

    Requires p > 1 and both offsets strictly inside (-1, 1).
    """
    p = Fraction(p)
    n_off = Fraction(num_offset)
    d_off = Fraction(den_offset)
    if p <= 1:
        raise ParameterError(f"parameter out of square: p must exceed 1, got {p}")
    if not (-1 < n_off < 1 and -1 < d_off < 1):
        raise ParameterError(
            "parameter out of square: "
            f"(N, D) = ({n_off}, {d_off}) is not inside (-1, 1) x (-1, 1)"
        )
    return ShiftParams(p, n_off, d_off)


def from_scaled_form(scale, p, num_offset, den_offset) -> ShiftParams:
    """Reduce weights sqrt((K*p**n + N') / (K*p**n + D')) to standard form.

    Dividing through by the scale K > 0 yields the triple
    (p, N'/K, D'/K); K must dominate |N'| and |D'| so the reduced point
    lands inside the open square, and the usual validation applies.
    """
    scale = Fraction(scale)
    if scale <= 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    return make_params(p, Fraction(num_offset) / scale, Fraction(den_offset) / scale)


def weight_sq(params: ShiftParams, n: int) -> Fraction:
    """Exact squared weight (p**n + N) / (p**n + D).

    The denominator is positive for every n >= 0 because p**n >= 1 > -D.
    """
    pn = params.p**n
    return (pn + params.num_offset) / (pn + params.den_offset)


def moment(params: ShiftParams, n: int) -> Fraction:
    """Exact moment g(n), the product of the first n squared weights."""
    g = Fraction(1)
    for j in range(n):
        g *= weight_sq(params, j)
    return g


class WeightSequence:
    """Squared weights kept as kernel(n) ** power with a rational kernel.

    The kernel stays rational under every transform in this package; only
    the exponent moves (a Schur s-th power multiplies it by s, the Aluthge
    transform halves it).  Sign decisions about logarithms of the weights
    therefore reduce to exact rational comparisons on the kernel, and the
    power only matters for numeric display.
    """

    def __init__(self, base_sq: Callable[[int], Fraction], power=1):
        power = Fraction(power)
        if power <= 0:
            raise ValueError(f"power must be positive, got {power}")
        self._base_sq = base_sq
        self.power = power

    def base_sq(self, n: int) -> Fraction:
        value = Fraction(self._base_sq(n))
        if value <= 0:
            raise ValueError(f"squared-weight kernel must be positive, got {value} at n={n}")
        return value

    def weight_sq(self, n: int) -> Fraction:
        """Exact squared weight; requires an integral power."""
        if self.power.denominator != 1:
            raise ValueError(
                "squared weight is irrational under a fractional power; "
                "work with base_sq and power, or use weight_approx"
            )
        return self.base_sq(n) ** self.power.numerator

    def weight_approx(self, n: int, dps: int = 20):
        """The weight itself, kernel(n) ** (power/2), as an mpmath float."""
        base = self.base_sq(n)
        half_power = self.power / 2
        with mp.workdps(dps):
            b = mp.mpf(base.numerator) / mp.mpf(base.denominator)
            e = mp.mpf(half_power.numerator) / mp.mpf(half_power.denominator)
            return mp.power(b, e)


class MomentSequence:
    """Memoized exact moments of a weight sequence.

    The memoized prefix only ever grows and is extended under a lock, so
    concurrent readers (parallel sweep workers sharing an instance) are
    safe.  Calling the sequence at n returns g(n) exactly; for weight
    sequences carrying a fractional power the rational kernel of the
    moments is available as ``kernel``.
    """

    def __init__(self, weights: WeightSequence):
        self.weights = weights
        self._kernel_prefix = [Fraction(1)]
        self._lock = threading.Lock()

    @property
    def power(self) -> Fraction:
        return self.weights.power

    def kernel(self, n: int) -> Fraction:
        """Product of the first n kernel values (the moment before the power)."""
        if n < 0:
            raise ValueError("moment index must be nonnegative")
        if n >= len(self._kernel_prefix):
            with self._lock:
                while len(self._kernel_prefix) <= n:
                    j = len(self._kernel_prefix) - 1
                    self._kernel_prefix.append(
                        self._kernel_prefix[-1] * self.weights.base_sq(j)
                    )
        return self._kernel_prefix[n]

    def __call__(self, n: int) -> Fraction:
        if self.power.denominator != 1:
            raise ValueError(
                "moments are irrational under a fractional power; use kernel"
            )
        return self.kernel(n) ** self.power.numerator


def weights(params: ShiftParams) -> WeightSequence:
    """The squared-weight sequence of the shift, power 1."""
    return WeightSequence(lambda n: weight_sq(params, n))


def moments(params: ShiftParams) -> MomentSequence:
    """Memoized moment sequence of the shift."""
    return MomentSequence(weights(params))


def weight_approx(params: ShiftParams, n: int, dps: int = 20):
    """The weight sqrt(w(n)) as an mpmath float with dps digits."""
    return weights(params).weight_approx(n, dps)


@dataclass(frozen=True)
class SectorLabel:
    """Set-valued sector classification of a parameter point.

    Sectors are closed cones, so a boundary point belongs to every
    adjacent sector instead of being tie-broken.  special_ray_k is 0
    exactly on the diagonal D == N and is k >= 1 when N > 0 and
    D == p**k * N; it stays None for points off those loci (the ray
    D == p*N with N < 0 is covered by the viiia wedge flag instead).
    """

    sectors: tuple[str, ...]
    on_diagonal: bool
    viiia: bool
    special_ray_k: Optional[int]

    def __contains__(self, name: str) -> bool:
        return name in self.sectors

    def to_json(self) -> dict:
        return {
            "sectors": list(self.sectors),
            "on_diagonal": self.on_diagonal,
            "viiia": self.viiia,
            "special_ray_k": self.special_ray_k,
        }


def _special_ray_index(params: ShiftParams, ray_depth: int) -> Optional[int]:
    n_off, d_off = params.num_offset, params.den_offset
    if n_off == d_off:
        return 0
    if n_off > 0 and d_off > n_off:
        t = n_off
        for k in range(1, ray_depth + 1):
            t *= params.p
            if t == d_off:
                return k
            if t > d_off:
                return None
    return None


def classify(params: ShiftParams, ray_depth: int = 64) -> SectorLabel:
    """All sectors containing (N, D), plus diagonal, wedge, and ray metadata.

    ray_depth bounds the search for a ray index k with D == p**k * N;
    since p > 1 the search also stops as soon as p**k * N overshoots D,
    so the bound only guards pathological inputs.
    """
    n_off, d_off = params.num_offset, params.den_offset
    found = []
    if n_off <= 0 and n_off <= d_off <= 0:
        found.append("I")
    if n_off <= 0 and 0 <= d_off <= -n_off:
        found.append("II")
    if n_off <= 0 and -n_off <= d_off:
        found.append("III")
    if 0 <= n_off <= d_off:
        found.append("IV")
    if 0 <= d_off <= n_off:
        found.append("V")
    if n_off >= 0 and -n_off <= d_off <= 0:
        found.append("VI")
    if n_off >= 0 and d_off <= -n_off:
        found.append("VII")
    if d_off <= n_off <= 0:
        found.append("VIII")
    return SectorLabel(
        sectors=tuple(s for s in SECTOR_ORDER if s in found),
        on_diagonal=(n_off == d_off),
        viiia=(params.p * n_off <= d_off <= n_off <= 0),
        special_ray_k=_special_ray_index(params, ray_depth),
    )
