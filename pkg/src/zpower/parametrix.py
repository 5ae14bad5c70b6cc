"""Bessel-type model solution near lambda = 0 and the constants it produces.

Psi0(xi) = (sqrt(pi)/2) diag(1/2, 2 xi) [[H2, H1], [H2', H1']]((i/2) sqrt(xi))
           e^{(i pi a/4) sigma3} S_sector,        order -a/2, ' = d/dxi.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .numerics import (PrecisionContext, _hankel_pair, _series_guard, _check_cap,
                       default_context, det2, diag2, mat2, maxnorm, real)

SECTORS = ("S1", "S2", "S3")


class SectorError(ValueError):
    pass


@dataclass(frozen=True)
class SectorSpec:
    theta: mp.mpf
    sector: str

    def __post_init__(self):
        if self.sector not in SECTORS:
            raise ValueError(f"unknown sector {self.sector!r}")
        if not 0 <= self.theta <= mp.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")

    @property
    def bounds(self):
        t2 = 2 * mp.mpf(self.theta)
        edges = {"S1": (-mp.pi / 2, mp.pi / 4), "S2": (mp.pi / 4, 3 * mp.pi / 4),
                 "S3": (3 * mp.pi / 4, 3 * mp.pi / 2)}[self.sector]
        return edges[0] - t2, edges[1] - t2

    def lift(self, xi, slack=None):
        """arg xi chosen in the closed sector (small slack allowed at the edges)."""
        lo, hi = self.bounds
        slack = mp.mpf(2) ** (-mp.mp.prec // 2) if slack is None else slack
        t = mp.arg(xi)
        for k in (-2, -1, 0, 1, 2):
            u = t + 2 * k * mp.pi
            if lo - slack <= u <= hi + slack:
                return u
        raise SectorError(f"arg xi = {mp.nstr(t, 8)} not in sector {self.sector} "
                          f"({mp.nstr(lo, 6)}, {mp.nstr(hi, 6)})")


def sector_of(arg, theta) -> str:
    """Sector containing a given (lifted) argument."""
    for s in SECTORS:
        lo, hi = SectorSpec(theta, s).bounds
        if lo <= arg < hi or (s == "S3" and arg == hi):
            return s
    raise SectorError("argument outside (-pi/2-2theta, 3pi/2-2theta]")


def auto_sector(xi, theta) -> SectorSpec:
    """Sector holding xi, lifting its principal argument as needed."""
    t = mp.arg(mp.mpc(xi))
    lo = -mp.pi / 2 - 2 * mp.mpf(theta)
    while t <= lo:
        t += 2 * mp.pi
    while t > lo + 2 * mp.pi:
        t -= 2 * mp.pi
    return SectorSpec(theta, sector_of(t, theta))


def sector_factor(a, sector):
    if sector == "S1":
        return mp.eye(2)
    if sector == "S2":
        return mat2(1, 0, mp.expjpi(a / 2), 1)
    return mat2(1, 0, 2 * mp.cospi(a / 2), 1)


def _psi0_core(r, t, a):
    """Psi0 without the sector factor at xi = r e^{it}; caller sets precision."""
    nu = -a / 2
    zabs = mp.sqrt(r) / 2
    zarg = mp.pi / 2 + t / 2
    h1, h2, zdh1, zdh2 = _hankel_pair(nu, zabs, zarg, mp.mp.prec)
    xi = mp.mpc(r * mp.cos(t), r * mp.sin(t))
    # dz/dxi = z/(2 xi)
    d1, d2 = zdh1 / (2 * xi), zdh2 / (2 * xi)
    M = mat2(h2, h1, d2, d1)
    pre = diag2(mp.mpf(1) / 2, 2 * xi) * (mp.sqrt(mp.pi) / 2)
    return pre * M * diag2(mp.expjpi(a / 4), mp.expjpi(-a / 4))


def psi0_eval(xi, a, sector: SectorSpec, ctx: PrecisionContext | None = None, arg=None):
    """Model solution at xi; ``arg`` pins arg xi on the universal cover,
    otherwise it is lifted into the sector."""
    ctx = ctx or default_context()
    with ctx.work():
        a = real(a)
        xi = mp.mpc(xi)
        if xi == 0:
            raise ValueError("xi = 0 is the branch point")
        r = abs(xi)
        t = sector.lift(xi) if arg is None else mp.mpf(arg)
        lo, hi = sector.bounds
        slack = mp.mpf(2) ** (-ctx.bits // 2)
        if not lo - slack <= t <= hi + slack:
            raise SectorError(f"arg {mp.nstr(t, 8)} outside sector {sector.sector}")
        _check_cap(mp.sqrt(r) / 2)
    with ctx.work(_series_guard(mp.sqrt(r) / 2) + 32):
        P = _psi0_core(r, t, a) * sector_factor(a, sector.sector)
    return ctx.round(P)


def ode_matrix(xi, a):
    return mat2(0, 1 / xi, 1 + a * a / xi, 0) / 4


def psi1(a):
    p = (1 - a * a) / 4
    return mat2(0, p, p - 1, 0)


LIMIT_MATRIX = ((mp.mpf(1) / 2, mp.mpc(0, -0.5)), (mp.mpf(1) / 2, mp.mpc(0, 0.5)))


def large_xi_defect(r, a, theta, ctx: PrecisionContext | None = None):
    """|xi| * ||xi^{s3/4} Psi0 e^{-sqrt(xi) s3/2} M^{-1} - I - Psi1/sqrt(xi)|| on arg xi = 0."""
    ctx = ctx or default_context()
    r = mp.mpf(r)
    sec = SectorSpec(theta, sector_of(mp.mpf(0), theta))
    with ctx.work():
        a = real(a)
    with ctx.work(_series_guard(mp.sqrt(r) / 2) + 32):
        P = _psi0_core(r, mp.mpf(0), a) * sector_factor(a, sec.sector)
        s = mp.sqrt(r)
        M = mat2(LIMIT_MATRIX[0][0], LIMIT_MATRIX[0][1], LIMIT_MATRIX[1][0], LIMIT_MATRIX[1][1])
        L = diag2(r ** mp.mpf(0.25), r ** mp.mpf(-0.25)) * P * diag2(mp.exp(-s / 2), mp.exp(s / 2)) \
            * sector_factor(a, sec.sector) ** -1 * M ** -1
        out = maxnorm(L - mp.eye(2) - psi1(a) / s) * r
    return ctx.round(out)


def c0_matrix(a, sector):
    base = mat2(1, 1 / (2 * mp.mpc(0, 1) * mp.sinpi(a / 2)), 0, 1)
    if sector == "S1":
        return base * mat2(1, 0, -mp.expjpi(a / 2), 1)
    if sector == "S3":
        return base * mat2(1, 0, mp.expjpi(-a / 2), 1)
    return base


def b0_matrix(a, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.work():
        a = real(a)
        g = mp.gamma(-a / 2)
        sp = mp.sqrt(mp.pi)
        i = mp.mpc(0, 1)
        return mat2(-(2 ** a) * sp / (a * g), -(2 ** (-a - 2)) * i * g / sp,
                    (2 ** a) * sp / g, -(2 ** (-a - 2)) * i * a * g / sp)


def b0_from_psi0(xi, a, sector: SectorSpec, ctx: PrecisionContext | None = None, arg=None):
    """Psi0(xi) (xi^{-(a/4) s3} C0)^{-1}; tends to B0 as xi -> 0."""
    ctx = ctx or default_context()
    P = psi0_eval(xi, a, sector, ctx, arg)
    with ctx.work(32):
        a = real(a)
        xi = mp.mpc(xi)
        t = sector.lift(xi) if arg is None else mp.mpf(arg)
        e = mp.exp(-(a / 4) * mp.mpc(mp.log(abs(xi)), t))
        out = P * (diag2(e, 1 / e) * c0_matrix(a, sector.sector)) ** -1
    return ctx.round(out)


def eta(a):
    """sqrt(e^{i pi a} - 1), continued from the principal root at small a."""
    return mp.sqrt(2 * mp.sinpi(a / 2)) * mp.expjpi((a + 1) / 4)


def delta(n, m):
    return mp.mpc(2 * m, -2 * n)


def b_matrix(a, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.work():
        e = eta(real(a))
        return b0_matrix(a, ctx) * diag2(1 / e, e)


def p0_hat_zero(a, n, m, ctx: PrecisionContext | None = None):
    """Delta^{s3/2} B Delta^{-(a/2) s3}."""
    ctx = ctx or default_context()
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    with ctx.work():
        a = real(a)
        D = delta(n, m)
        h = mp.sqrt(D)
        p = mp.power(D, -a / 2)
        return diag2(h, 1 / h) * b_matrix(a, ctx) * diag2(p, 1 / p)


def leading_constant(a, n, m, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    P = p0_hat_zero(a, n, m, ctx)
    with ctx.work():
        return -P[0, 1] / P[0, 0]


def pinf_hat(a, n, m, ctx: PrecisionContext | None = None):
    """Constant at infinity, entries in closed form with conj(Delta) = 2(m+in)."""
    ctx = ctx or default_context()
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    with ctx.work():
        a = real(a)
        Db = mp.mpc(2 * m, 2 * n)
        e = eta(a)
        g = mp.gamma(a / 2)
        sp = mp.sqrt(mp.pi)
        i = mp.mpc(0, 1)
        pw = lambda x: mp.power(Db, x)
        return mat2(2 ** (-a) * sp / (e * g) * pw(-mp.mpf(1) / 2 + a / 2),
                    -(2 ** (a - 2)) * i * e * a * g / sp * pw(-mp.mpf(1) / 2 - a / 2),
                    2 ** (-a) * sp / (e * a * g) * pw(mp.mpf(1) / 2 + a / 2),
                    2 ** (a - 2) * i * e * g / sp * pw(mp.mpf(1) / 2 - a / 2))


@dataclass(frozen=True)
class ParametrixConstants:
    a: mp.mpf
    n: int
    m: int
    eta: mp.mpc
    delta: mp.mpc
    theta: mp.mpf
    psi1: mp.matrix
    B0: mp.matrix
    B: mp.matrix
    P0_hat: mp.matrix
    Pinf_hat: mp.matrix


def parametrix_constants(a, n, m, ctx: PrecisionContext | None = None) -> ParametrixConstants:
    ctx = ctx or default_context()
    with ctx.work():
        a = real(a)
        return ParametrixConstants(
            a, n, m, eta(a), delta(n, m), -mp.arg(mp.mpc(m, -n)), psi1(a),
            b0_matrix(a, ctx), b_matrix(a, ctx), p0_hat_zero(a, n, m, ctx), pinf_hat(a, n, m, ctx))


def gamma0_jump_residual(r, a, theta, ctx: PrecisionContext | None = None):
    """||Psi_+ - Psi_- [[0,1],[-1,0]]|| across Gamma0 at |xi| = r."""
    ctx = ctx or default_context()
    lo, hi = SectorSpec(theta, "S1").bounds[0], SectorSpec(theta, "S3").bounds[1]
    plus = psi0_eval(mp.mpf(r) * mp.expj(lo), a, SectorSpec(theta, "S1"), ctx, arg=lo)
    minus = psi0_eval(mp.mpf(r) * mp.expj(hi), a, SectorSpec(theta, "S3"), ctx, arg=hi)
    with ctx.work():
        return maxnorm(plus - minus * mat2(0, 1, -1, 0))


def ray_jump(r, a, theta, ray, ctx: PrecisionContext | None = None):
    """Psi_-^{-1} Psi_+ across one of the three rays at |xi| = r.

    ray 0 is Gamma0 (S3 -> S1 after a full turn), ray 1 is S1|S2, ray 2 is S2|S3.
    """
    ctx = ctx or default_context()
    if ray == 0:
        lo = SectorSpec(theta, "S1").bounds[0]
        left, lt = SectorSpec(theta, "S3"), lo + 2 * mp.pi
        right, rt = SectorSpec(theta, "S1"), lo
    else:
        s_lo, s_hi = ("S1", "S2") if ray == 1 else ("S2", "S3")
        edge = SectorSpec(theta, s_lo).bounds[1]
        left, lt = SectorSpec(theta, s_lo), edge
        right, rt = SectorSpec(theta, s_hi), edge
    Pm = psi0_eval(mp.mpf(r) * mp.expj(lt), a, left, ctx, arg=lt)
    Pp = psi0_eval(mp.mpf(r) * mp.expj(rt), a, right, ctx, arg=rt)
    with ctx.work():
        return Pm ** -1 * Pp


def det_psi0(xi, a, sector: SectorSpec, ctx: PrecisionContext | None = None):
    P = psi0_eval(xi, a, sector, ctx)
    with (ctx or default_context()).work():
        return det2(P)
