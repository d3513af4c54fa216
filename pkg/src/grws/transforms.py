"""Shift-to-shift transforms: Schur powers, the Aluthge transform, affine
subshifts, quotient and reciprocal shifts, and the derived weights that
witness complete hyperexpansivity on the wedge p*N <= D <= N <= 0.

All weight-level transforms act on the rational kernel of a
WeightSequence and at most rescale its exponent, so downstream log
batteries keep their exact integer-arithmetic shortcut:

  * Schur s-th power: kernel unchanged, power multiplied by s;
  * Aluthge: kernel(n) -> kernel(n) * kernel(n+1), power halved
    (the new weight is the geometric mean of two neighbours);
  * quotient: kernel(n) -> kernel(n+1) / kernel(n);
  * affine subshift along g(n) = stride*n + offset: kernel resampled.

At the parameter level, subsampling a shift with parameters (p, N, D)
along g(n) = stride*n + offset produces again a member of the family,
with parameters (p**stride, N / p**offset, D / p**offset), because
p**(stride*n + offset) = (p**stride)**n * p**offset divides through.
Swapping N and D inverts every weight, reflecting the parameter point
across the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

from .model import ParameterError, ShiftParams, WeightSequence, make_params, weight_sq
from .sequences import ExactSequence, nabla


@dataclass(frozen=True)
class AffineMap:
    """Index map n -> stride * n + offset with stride >= 1, offset >= 0."""

    stride: int
    offset: int

    def __post_init__(self):
        if self.stride < 1 or self.offset < 0:
            raise ValueError("affine map needs stride >= 1 and offset >= 0")

    def __call__(self, n: int) -> int:
        return self.stride * n + self.offset


def schur_power(ws: WeightSequence, s) -> WeightSequence:
    """Raise every squared weight to the power s > 0."""
    s = Fraction(s)
    if s <= 0:
        raise ValueError("Schur power must be positive")
    return WeightSequence(ws.base_sq, ws.power * s)


def aluthge(ws: WeightSequence) -> WeightSequence:
    """Weight sequence of the Aluthge transform.

    The new n-th weight is sqrt(alpha_n * alpha_{n+1}); squared, that is
    (kernel(n) * kernel(n+1)) ** (power / 2), kept exact by halving the
    exponent instead of taking a square root.
    """
    return WeightSequence(
        lambda n: ws.base_sq(n) * ws.base_sq(n + 1), ws.power / 2
    )


def quotient_shift(ws: WeightSequence) -> WeightSequence:
    """Weights replaced by quotients of successive weights."""
    return WeightSequence(lambda n: ws.base_sq(n + 1) / ws.base_sq(n), ws.power)


def reciprocal_weights(ws: WeightSequence) -> WeightSequence:
    """Elementwise reciprocal of the squared weights."""
    return WeightSequence(lambda n: 1 / ws.base_sq(n), ws.power)


def subshift_weights(ws: WeightSequence, amap: AffineMap) -> WeightSequence:
    """Resample the weights along the affine index map."""
    return WeightSequence(lambda n: ws.base_sq(amap(n)), ws.power)


def affine_subshift_params(params: ShiftParams, amap: AffineMap) -> ShiftParams:
    """Parameters of the affine subshift: (p**stride, N/p**offset, D/p**offset).

    The result always lands inside the open square because dividing the
    offsets by p**offset >= 1 shrinks them toward 0.
    """
    scale = params.p**amap.offset
    return make_params(
        params.p**amap.stride,
        params.num_offset / scale,
        params.den_offset / scale,
    )


def reciprocal(params: ShiftParams) -> ShiftParams:
    """Parameter point of the reciprocal shift: swap N and D."""
    return make_params(params.p, params.den_offset, params.num_offset)


@dataclass(frozen=True)
class PGCoefficients:
    """Coefficients of (1 + x + ... + x**(stride-1)) ** order.

    These are the positive weights that decompose an order-n difference
    of a stride-subsampled sequence into order-n differences of the
    original; there are order*(stride-1) + 1 of them and they sum to
    stride**order (evaluate the generating polynomial at x = 1).
    """

    stride: int
    order: int
    coefficients: tuple[int, ...]

    def total(self) -> int:
        return sum(self.coefficients)


def pg_coefficients(stride: int, order: int) -> PGCoefficients:
    if stride < 2:
        raise ValueError("stride must be at least 2")
    if order < 1:
        raise ValueError("order must be at least 1")
    poly = [1]
    for _ in range(order):
        out = [0] * (len(poly) + stride - 1)
        for i, coefficient in enumerate(poly):
            for j in range(stride):
                out[i + j] += coefficient
        poly = out
    return PGCoefficients(stride=stride, order=order, coefficients=tuple(poly))


def pg_identity_check(seq: ExactSequence, stride: int, order: int, m: int,
                      start: int) -> bool:
    """Exact decomposition of a subsampled difference, checked verbatim.

    Verifies, over exact rationals, that

        sum_i (-1)**i C(order, i) seq(stride*(m+i) + start)
          == sum_j c_j * (diff^order seq)(stride*m + j + start)

    with c_j the coefficients of (1 + x + ... + x**(stride-1)) ** order.
    The identity is sequence-independent; this evaluates both sides.
    """
    if m < 0 or start < 0:
        raise ValueError("m and start must be nonnegative")
    coefficients = pg_coefficients(stride, order).coefficients
    lhs = Fraction(0)
    for i in range(order + 1):
        term = Fraction(seq(stride * (m + i) + start)) * comb(order, i)
        lhs = lhs + term if i % 2 == 0 else lhs - term
    rhs = Fraction(0)
    for j, cj in enumerate(coefficients):
        rhs += cj * nabla(seq, order, stride * m + j + start)
    return lhs == rhs


def viiia_derived_weights(params: ShiftParams) -> tuple[Callable[[int], Fraction], ShiftParams]:
    """Ratios of successive moment increments on the wedge p*N <= D <= N <= 0.

    For such points the increments dg(n) = g(n+1) - g(n) satisfy
    dg(n+1)/dg(n) = w(n) with

        w(n) = (1/p) * (p**n + N) / (p**n + D/p),

    and (N, D/p) lies in the cone N <= D/p <= 0, whose shifts have
    log-alternating squared weights; that transports complete monotonicity
    to the increments.  Returns the exact sequence w and the witness
    parameter point (p, N, D/p).
    """
    p, n_off, d_off = params.p, params.num_offset, params.den_offset
    if not (p * n_off <= d_off <= n_off <= 0):
        raise ParameterError(
            f"point (N, D) = ({n_off}, {d_off}) is outside the wedge "
            "p*N <= D <= N <= 0"
        )
    witness = make_params(p, n_off, d_off / p)

    def derived(n: int) -> Fraction:
        return weight_sq(witness, n) / p

    return derived, witness
