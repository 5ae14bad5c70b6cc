"""Large-(n,m) law for Z^a and the g-function toolkit behind it."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

import mpmath as mp

from .lattice import PowerMapGrid
from .numerics import (CUT_DOWN, CUT_UP, BranchError, PrecisionContext,
                       default_context, gamma_real, real)


@dataclass(frozen=True)
class GContext:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.n + self.m == 0:
            raise ValueError("need n, m >= 0, not both zero")

    @property
    def r(self):
        return mp.sqrt(self.n ** 2 + self.m ** 2)

    @property
    def theta(self):
        """-arg(m - i n), in [0, pi/2]."""
        return -mp.arg(mp.mpc(self.m, -self.n))


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    m: int
    r: mp.mpf
    predicted: mp.mpc
    actual: mp.mpc
    rel_error: mp.mpf


def c_of_a(a, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.work():
        a = real(a)
        if not 0 < a < 2:
            raise ValueError("a must lie in (0, 2)")
        return gamma_real(1 - a / 2, ctx) / gamma_real(1 + a / 2, ctx)


def predict(n, m, a, ctx: PrecisionContext | None = None):
    """c(a) ((n + i m)/2)^a, principal branch (arg in [0, pi/2])."""
    ctx = ctx or default_context()
    if n == 0 and m == 0:
        raise ValueError("no prediction at the origin")
    with ctx.work():
        a = real(a)
        return c_of_a(a, ctx) * mp.power(mp.mpc(n, m) / 2, a)


def asymptotic_row(grid: PowerMapGrid, n, m, ctx: PrecisionContext | None = None) -> AsymptoticRow:
    ctx = ctx or grid.ctx
    with ctx.work():
        p = predict(n, m, grid.a, ctx)
        f = grid[n, m]
        return AsymptoticRow(n, m, mp.sqrt(n * n + m * m), p, f, abs(f / p - 1))


def ray_sites(N, ray):
    """Lattice points on the rays n=m, n=2m, m=2n inside {0..N}^2."""
    if ray == "diag":
        return [(k, k) for k in range(1, N + 1)]
    if ray == "n2m":
        return [(2 * k, k) for k in range(1, N // 2 + 1)]
    if ray == "m2n":
        return [(k, 2 * k) for k in range(1, N // 2 + 1)]
    raise ValueError(f"unknown ray {ray!r}")


def loglog_slope(rows):
    """Least-squares slope of log(rel_error) against log r."""
    xs = [float(mp.log(row.r)) for row in rows]
    ys = [float(mp.log(row.rel_error)) for row in rows]
    return statistics.linear_regression(xs, ys).slope


def _sqrt_on(lam, spec):
    t = spec.arg(lam)
    return mp.sqrt(abs(lam)) * mp.expj(t / 2)


def g_eval(lam, gctx: GContext, ctx: PrecisionContext | None = None):
    """m log(1+sqrt(lam)) + n log(i+sqrt(lam)), cut [0,-i inf)."""
    ctx = ctx or default_context()
    with ctx.work():
        lam = mp.mpc(lam)
        if lam == 0 or CUT_DOWN.on_cut(lam):
            raise BranchError("lambda on the cut of g")
        s = _sqrt_on(lam, CUT_DOWN)
        return gctx.m * mp.log(1 + s) + gctx.n * mp.log(mp.mpc(0, 1) + s)


def g_boundary(lam, gctx: GContext, side, ctx: PrecisionContext | None = None):
    """Boundary value of g on the cut from the right ('+') or left ('-')."""
    ctx = ctx or default_context()
    with ctx.work():
        lam = mp.mpc(lam)
        if not CUT_DOWN.on_cut(lam) or lam == 0:
            raise BranchError("point is not on the cut")
        t = -mp.pi / 2 if side == "+" else 3 * mp.pi / 2
        s = mp.sqrt(abs(lam)) * mp.expj(t / 2)
        return gctx.m * mp.log(1 + s) + gctx.n * mp.log(mp.mpc(0, 1) + s)


def H_eval(lam, gctx: GContext, ctx: PrecisionContext | None = None):
    """((1+s)/(1-s))^m ((i+s)/(i-s))^n with s = sqrt(lam), cut [0,+i inf)."""
    ctx = ctx or default_context()
    with ctx.work():
        lam = mp.mpc(lam)
        if lam == 0 or CUT_UP.on_cut(lam):
            raise BranchError("lambda on the cut of H")
        s = _sqrt_on(lam, CUT_UP)
        i = mp.mpc(0, 1)
        return ((1 + s) / (1 - s)) ** gctx.m * ((i + s) / (i - s)) ** gctx.n


def h_eval(lam, gctx: GContext, ctx: PrecisionContext | None = None):
    """log H on the H-branch."""
    ctx = ctx or default_context()
    with ctx.work():
        lam = mp.mpc(lam)
        s = _sqrt_on(lam, CUT_UP)
        i = mp.mpc(0, 1)
        return gctx.m * mp.log((1 + s) / (1 - s)) + gctx.n * mp.log((i + s) / (i - s))


def jump_modulus_violations(gctx: GContext, points_q1, points_q2, ctx=None):
    """Count samples where |H| <= 1 in the first or >= 1 in the second quadrant."""
    bad = 0
    for lam in points_q1:
        if abs(H_eval(lam, gctx, ctx)) <= 1:
            bad += 1
    for lam in points_q2:
        if abs(H_eval(lam, gctx, ctx)) >= 1:
            bad += 1
    return bad


def h0_sqrt_coeffs(gctx: GContext, K):
    """d_j with h0(lam) = 2 sum_j d_j lam^{j+1/2}."""
    n, m = gctx.n, gctx.m
    return [mp.mpc(m, -n * (-1) ** j) / (2 * j + 1) for j in range(K)]


def xi_coeffs(gctx: GContext, K):
    """Taylor coefficients e_1..e_K of xi(lam) = h0(lam)^2 = sum_k e_k lam^k."""
    d = h0_sqrt_coeffs(gctx, K)
    return [4 * mp.fsum(d[i] * d[k - 1 - i] for i in range(k)) for k in range(1, K + 1)]


def xi_normalized_coeffs(gctx: GContext, K):
    """c_k with xi = 4(m-in)^2 (lam + sum_{k>=2} c_k lam^k); c_1 = 1."""
    e = xi_coeffs(gctx, K)
    lead = e[0]
    return [x / lead for x in e]


def xi_map(lam, gctx: GContext, ctx: PrecisionContext | None = None):
    """xi(lam) from the convergent series; |lam| < 1 only."""
    ctx = ctx or default_context()
    with ctx.work(16):
        lam = mp.mpc(lam)
        if abs(lam) >= 1:
            raise ValueError("xi_map is only defined for |lambda| < 1")
        if lam == 0:
            return mp.mpc(0)
        eps = mp.mpf(2) ** (-ctx.bits - 16)
        n, m = gctx.n, gctx.m
        # sum_j d_j lam^j, then xi = 4 lam (...)^2
        acc = mp.mpc(0)
        p = mp.mpc(1)
        j = 0
        while True:
            term = mp.mpc(m, -n * (-1) ** j) / (2 * j + 1) * p
            acc += term
            if abs(term) <= eps * abs(acc) and j > 2:
                break
            j += 1
            p *= lam
            if j > 200000:
                raise ArithmeticError("xi series did not converge")
        out = 4 * lam * acc ** 2
    return ctx.round(out)


def xi_derivative_at_zero(gctx: GContext):
    return xi_coeffs(gctx, 1)[0]
