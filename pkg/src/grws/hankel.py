"""Exact Hankel moment windows, fraction-free determinants, the closed
determinant formula, the condensation identity, and the k-hyponormality
decision procedure.

A weighted shift is k-hyponormal exactly when every (k+1) x (k+1) Hankel
matrix of moments (g(j + r + s))_{r,s} is positive semidefinite.  Dividing
out g(j) normalizes the top-left entry to 1, leaving k-by-k windows
M(k, j) with entries g(j + r + s) / g(j); positivity of the whole family
M(k, j), j = 0, 1, ..., then decides (k-1)-hyponormality.  That off-by-one
bookkeeping stays inside this module: public verdicts always speak in
hyponormality order, never in matrix sizes.

Two independent determinant routes are kept on purpose.  ``det_exact``
runs a fraction-free Bareiss elimination over exact rationals (rows are
cleared to integers first, so intermediate entries are minors and stay
polynomially sized).  ``det_closed_form`` evaluates a finite product
formula in (p, N, D, j).  Exact agreement of the two on randomized
windows is enforced by the acceptance suite, and the condensation
identity gives a third, structural cross-check tying det M(k, j) to the
determinants of its corner submatrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Literal, Optional

from .model import ShiftParams, moments, weight_sq
from .rationals import format_rational

MomentFn = Callable[[int], Fraction]


@dataclass(frozen=True)
class HankelWindow:
    """Normalized k-by-k Hankel window with entries g(j + r + s) / g(j)."""

    size: int
    start: int
    rows: tuple[tuple[Fraction, ...], ...]

    def entry(self, r: int, s: int) -> Fraction:
        return self.rows[r][s]


def hankel(moment_fn: MomentFn, size: int, start: int) -> HankelWindow:
    """Build the normalized window M(size, start) from a moment sequence."""
    if size < 1:
        raise ValueError("window size must be at least 1")
    if start < 0:
        raise ValueError("start index must be nonnegative")
    g = [Fraction(moment_fn(start + t)) for t in range(2 * size - 1)]
    g0 = g[0]
    rows = tuple(
        tuple(g[r + s] / g0 for s in range(size)) for r in range(size)
    )
    return HankelWindow(size=size, start=start, rows=rows)


def _det_bareiss_int(m: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix (Bareiss recurrence).

    Every intermediate entry equals a minor of the input, so sizes grow
    polynomially; all divisions are exact by construction.
    """
    n = len(m)
    sign = 1
    prev = 1
    for i in range(n - 1):
        if m[i][i] == 0:
            for r in range(i + 1, n):
                if m[r][i] != 0:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[i][i]
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] = (m[r][c] * pivot - m[r][i] * m[i][c]) // prev
            m[r][i] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def det_exact(window: HankelWindow) -> Fraction:
    """Exact determinant by fraction-free elimination.

    Each row is scaled to integers by its denominator lcm; the scales are
    divided back out of the integer determinant at the end.
    """
    scale = Fraction(1)
    int_rows: list[list[int]] = []
    for row in window.rows:
        denominator_lcm = 1
        for x in row:
            denominator_lcm = lcm(denominator_lcm, x.denominator)
        int_rows.append([x.numerator * (denominator_lcm // x.denominator) for x in row])
        scale /= denominator_lcm
    return Fraction(_det_bareiss_int(int_rows)) * scale


def det_closed_form(params: ShiftParams, size: int, start: int) -> Fraction:
    """Closed product form of det M(size, start) in the parameters.

    Defined for size >= 2 (a size-1 window is [[1]]).  The factors
    D + p**t in the denominator are positive everywhere on the open
    square since p**t >= 1 > -D, so the formula has no poles there.  The
    sign is carried entirely by the factors (1 - p**(i+1)) and
    (N * p**i - D); the latter vanish exactly on the rays D == p**i * N,
    which is what makes the ray geometry visible in determinant signs.
    """
    if size < 2:
        raise ValueError("closed form is defined for size >= 2")
    if start < 0:
        raise ValueError("start index must be nonnegative")
    k, j = size, start
    p, n_off, d_off = params.p, params.num_offset, params.den_offset
    value = p ** (k * (k - 1) * (k - 2) // 3) * (p**j) ** (k * (k - 1) // 2)
    for i in range(k - 1):
        e = k - i - 1
        value *= (1 - p ** (i + 1)) ** e
        value *= (n_off * p**i - d_off) ** e
        value *= (n_off + p ** (i + j)) ** e
    shared = Fraction(1)
    for ell in range(k - 1):
        shared *= d_off + p ** (ell + j)
    value /= shared**k
    for i in range(1, k):
        value /= (d_off + p ** (j + i + k - 2)) ** (k - i)
    return value


def condensation_check(params: ShiftParams, size: int, start: int) -> bool:
    """Verify the determinant condensation identity exactly at (size, start).

    For A = M(k, j) the identity relates det A to the determinants of the
    four corner submatrices, which are themselves scaled windows:
    deleting the first row and column leaves w(j) * w(j+1) * M(k-1, j+2),
    deleting the last ones leaves M(k-1, j), the mixed deletions leave
    w(j) * M(k-1, j+1), and deleting both leaves w(j) * w(j+1) * M(k-2, j+2).
    All determinants here are computed by the fraction-free route.
    """
    if size < 3:
        raise ValueError("condensation needs size >= 3")
    if start < 0:
        raise ValueError("start index must be nonnegative")
    k, j = size, start
    g = moments(params)

    def det_window(kk: int, jj: int) -> Fraction:
        return det_exact(hankel(g, kk, jj))

    w0 = weight_sq(params, j)
    w1 = weight_sq(params, j + 1)
    lhs = det_window(k, j) * (w0 * w1) ** (k - 2) * det_window(k - 2, j + 2)
    rhs = (w0 * w1) ** (k - 1) * det_window(k - 1, j + 2) * det_window(k - 1, j) \
        - w0 ** (2 * (k - 1)) * det_window(k - 1, j + 1) ** 2
    return lhs == rhs


@dataclass(frozen=True)
class HypoVerdict:
    """Hyponormality order decided by nested determinants.

    ``order`` == m means every window size up to m + 1 passed; with
    ``at_least`` set, no failure was found up to the probe bound and the
    true order may be larger (subnormal shifts probe as at_least).
    ``first_failure`` records (matrix size, start index, sign) of the
    first offending determinant.  ``flat`` marks families whose
    determinants vanish from some size onward, the finitely atomic
    subnormal pattern, which counts as passing as long as no nonzero
    determinant shows up after the zeros began.
    """

    order: int
    at_least: bool
    first_failure: Optional[tuple[int, int, int]]
    flat: bool = False

    def to_json(self) -> dict:
        failure = None
        if self.first_failure is not None:
            size, j, sign = self.first_failure
            failure = {"size": size, "j": j, "sign": sign}
        return {
            "order": self.order,
            "at_least": self.at_least,
            "first_failure": failure,
            "flat": self.flat,
        }

    def describe(self) -> str:
        prefix = "at-least-" if self.at_least else ""
        return f"{prefix}{self.order}"


def hyponormality_order(params: ShiftParams, k_probe: int = 6, j_probe: int = 12,
                        engine: Literal["closed-form", "bareiss"] = "closed-form") -> HypoVerdict:
    """Largest hyponormality order certified by window determinants.

    Scans window sizes 2 .. k_probe + 1 and start indices 0 .. j_probe in
    lexicographic order.  A negative determinant at size s caps the order
    at s - 2.  A zero determinant switches the scan into the flat regime,
    where every later determinant must also vanish; a nonzero value after
    that is reported as a failure at the size where the zeros began.
    ``engine`` selects the determinant route; both are exact.
    """
    if k_probe < 1 or j_probe < 0:
        raise ValueError("k_probe must be >= 1 and j_probe >= 0")
    if engine == "closed-form":
        def det_at(size: int, j: int) -> Fraction:
            return det_closed_form(params, size, j)
    elif engine == "bareiss":
        g = moments(params)

        def det_at(size: int, j: int) -> Fraction:
            return det_exact(hankel(g, size, j))
    else:
        raise ValueError(f"unknown determinant engine {engine!r}")

    flat_from: Optional[int] = None
    for size in range(2, k_probe + 2):
        for j in range(j_probe + 1):
            d = det_at(size, j)
            if flat_from is not None:
                if d != 0:
                    return HypoVerdict(
                        order=flat_from - 2,
                        at_least=False,
                        first_failure=(size, j, 1 if d > 0 else -1),
                        flat=True,
                    )
            elif d < 0:
                return HypoVerdict(
                    order=size - 2, at_least=False, first_failure=(size, j, -1)
                )
            elif d == 0:
                flat_from = size
    return HypoVerdict(order=k_probe, at_least=True, first_failure=None,
                       flat=flat_from is not None)


def sector_iv_predicted_order(params: ShiftParams) -> Optional[int]:
    """Hyponormality order predicted from the ray geometry, for 0 <= N <= D.

    Off the rays the order is the k with N * p**(k-1) < D < N * p**k.
    On the diagonal, on a ray D == p**k * N, or with N == 0 the shift is
    subnormal and None is returned (every order passes).
    """
    n_off, d_off = params.num_offset, params.den_offset
    if not (0 <= n_off <= d_off):
        raise ValueError(
            f"point ({n_off}, {d_off}) is outside the closed upper sector 0 <= N <= D"
        )
    if n_off == 0 or n_off == d_off:
        return None
    t = n_off
    k = 0
    while True:
        k += 1
        t *= params.p
        if t == d_off:
            return None
        if t > d_off:
            return k


def det_table(params: ShiftParams, k_max: int, j_max: int,
              engine: Literal["closed-form", "bareiss"] = "closed-form"
              ) -> list[tuple[int, int, Fraction]]:
    """Rows (size, start, determinant) over 2 <= size <= k_max, 0 <= start <= j_max."""
    if engine == "bareiss":
        g = moments(params)
        rows = [
            (size, j, det_exact(hankel(g, size, j)))
            for size in range(2, k_max + 1)
            for j in range(j_max + 1)
        ]
    else:
        rows = [
            (size, j, det_closed_form(params, size, j))
            for size in range(2, k_max + 1)
            for j in range(j_max + 1)
        ]
    return rows


def det_table_json(rows: list[tuple[int, int, Fraction]]) -> list[dict]:
    def sign(x: Fraction) -> int:
        return 0 if x == 0 else (1 if x > 0 else -1)

    return [
        {"k": size, "j": j, "det": format_rational(d), "sign": sign(d)}
        for size, j, d in rows
    ]
