"""Z^a on the square {0..N}^2: axis recurrence plus cross-ratio wavefront."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath as mp

from .numerics import PrecisionContext, default_context, real


class DegenerateError(ArithmeticError):
    def __init__(self, msg, site=None):
        super().__init__(msg if site is None else f"{msg} at site {site}")
        self.site = site


class AxisKind(enum.Enum):
    horizontal = "horizontal"
    vertical = "vertical"


def guard_bits(a, N) -> int:
    """Extra bits needed so that the wavefront's error growth (about 1.25
    bits per anti-diagonal, measured) stays below the context precision."""
    g = math.ceil(1.5 * 2 * N) + 64
    a = float(a)
    if a < 1:
        g += math.ceil(math.log2(1 / a))
    if a > 1:
        g += math.ceil(math.log2(1 / (2 - a)))
    return g


def axis_step(f_prev, f_cur, k, a, axis: AxisKind = AxisKind.horizontal):
    """Next value along an axis from the constraint with the off-axis term
    dropped.  The formula is the same on both axes."""
    d = f_cur - f_prev
    den = a * f_cur - 2 * k * d
    if den == 0:
        raise DegenerateError(f"zero denominator in {axis.value} axis step k={k}")
    return f_cur * (a * f_prev - 2 * k * d) / den


def cross_ratio(p, q, x, s):
    return (p - q) * (x - s) / ((q - x) * (s - p))


def cross_ratio_fill(p, q, s):
    """x with cross-ratio(p, q, x, s) = -1."""
    if p == q or p == s or q == s:
        raise DegenerateError("coincident vertices")
    den = 2 * p - q - s
    if den == 0:
        raise DegenerateError("zero denominator in cross-ratio fill")
    return (p * s + q * p - 2 * q * s) / den


def constraint_residual(f, n, m, a):
    """|a f - 2n(...)-2m(...)| at an interior point of a value table f[n][m]."""
    c = f[n][m]
    rhs = 0
    if n > 0:
        fp, fm = f[n + 1][m], f[n - 1][m]
        rhs += 2 * n * (fp - c) * (c - fm) / (fp - fm)
    if m > 0:
        fp, fm = f[n][m + 1], f[n][m - 1]
        rhs += 2 * m * (fp - c) * (c - fm) / (fp - fm)
    return abs(a * c - rhs)


@dataclass(frozen=True)
class PowerMapGrid:
    a: mp.mpf
    N: int
    values: tuple
    bits: int
    residual_cr: mp.mpf
    residual_constraint: mp.mpf

    def __getitem__(self, nm):
        n, m = nm
        if not (0 <= n <= self.N and 0 <= m <= self.N):
            raise IndexError(f"site {(n, m)} outside grid 0..{self.N}")
        return self.values[n][m]

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.bits, min(1e-40, 2.0 ** (-self.bits / 2)))

    def sites(self):
        for n in range(self.N + 1):
            for m in range(self.N + 1):
                yield n, m


def residuals(values, a, N):
    """(max |cross-ratio + 1|, max constraint residual) over the grid."""
    rc = mp.mpf(0)
    rk = mp.mpf(0)
    for n in range(N):
        for m in range(N):
            cr = cross_ratio(values[n][m], values[n + 1][m], values[n + 1][m + 1], values[n][m + 1])
            rc = max(rc, abs(cr + 1))
    for n in range(1, N):
        for m in range(1, N):
            rk = max(rk, constraint_residual(values, n, m, a))
    return rc, rk


def _wavefront(a, N):
    f = [[None] * (N + 1) for _ in range(N + 1)]
    f[0][0] = mp.mpc(0)
    f[1][0] = mp.mpc(1)
    f[0][1] = mp.expjpi(a / 2)
    for k in range(1, N):
        try:
            f[k + 1][0] = axis_step(f[k - 1][0], f[k][0], k, a, AxisKind.horizontal)
        except DegenerateError as e:
            raise DegenerateError(str(e), (k + 1, 0)) from None
        try:
            f[0][k + 1] = axis_step(f[0][k - 1], f[0][k], k, a, AxisKind.vertical)
        except DegenerateError as e:
            raise DegenerateError(str(e), (0, k + 1)) from None
    for d in range(2, 2 * N + 1):
        for n in range(max(1, d - N), min(N, d - 1) + 1):
            m = d - n
            try:
                f[n][m] = cross_ratio_fill(f[n - 1][m - 1], f[n][m - 1], f[n - 1][m])
            except DegenerateError as e:
                raise DegenerateError(str(e), (n, m)) from None
    return f


def evolve_grid(a, N, ctx: PrecisionContext | None = None) -> PowerMapGrid:
    ctx = ctx or default_context()
    if N < 2 or int(N) != N:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    with ctx.work(guard_bits(1, N)):
        a = real(a)
    if not 0 < a < 2:
        raise ValueError(f"exponent a must lie in (0, 2), got {a}")
    with ctx.work(guard_bits(a, N)):
        # a is promoted exactly; pi and the wavefront run with guard bits
        raw = _wavefront(a, N)
    with ctx.work():
        vals = tuple(tuple(+v for v in row) for row in raw)
        rc, rk = residuals(vals, a, N)
    return PowerMapGrid(a, N, vals, ctx.bits, rc, rk)


def from_values(a, N, bits, values) -> PowerMapGrid:
    """Rebuild a grid from stored values and recompute its residuals."""
    with mp.workprec(bits):
        a = real(a)
        vals = tuple(tuple(mp.mpc(v) for v in row) for row in values)
        rc, rk = residuals(vals, a, N)
    return PowerMapGrid(a, N, vals, bits, rc, rk)
