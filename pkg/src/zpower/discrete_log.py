"""Discrete logarithm, Hirota radii and the discrete Green's function.

Derivatives in the exponent a are difference quotients of evolved grids,
Richardson-extrapolated.  Grids are cached per (a, N, bits) because every
lattice site in a window reuses the same handful of evolutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .lattice import PowerMapGrid, evolve_grid
from .numerics import PrecisionContext, default_context, real

DEFAULT_EPS = mp.mpf("1e-12")


class ParityError(ValueError):
    pass


@lru_cache(maxsize=32)
def _grid(a_str, N, bits):
    return evolve_grid(a_str, N, PrecisionContext(bits, min(1e-40, 2.0 ** (-bits / 2))))


def _grid_at(a, N, ctx):
    # mpf values hash by value; the repr keeps the key exact
    return _grid(mp.nstr(a, ctx.bits // 3 + 10, strip_zeros=False), N, ctx.bits)


def _a_values(base, eps, ctx, signs):
    with ctx.work(64):
        return [real(base) + s * eps for s in signs]


@dataclass(frozen=True)
class Estimate:
    value: object
    error: mp.mpf
    eps: mp.mpf


def hirota_W(grid: PowerMapGrid, n, m):
    """|Z(n+1,m) - Z(n,m)| at an even site."""
    if (n + m) % 2:
        raise ParityError(f"Hirota radius needs n+m even, got {(n, m)}")
    with grid.ctx.work():
        return abs(grid[n + 1, m] - grid[n, m])


def _L_quotients(n, m, N, ctx, eps):
    out = []
    for k in (1, 2, 4):
        with ctx.work(64):
            a = real(eps) * k
        g = _grid_at(a, N, ctx)
        with ctx.work(64):
            out.append((g[n, m] - 1) / a)
    return out


def discrete_log_L(n, m, ctx: PrecisionContext | None = None, eps=DEFAULT_EPS, N=None) -> Estimate:
    """lim_{a->0} (Z^a(n,m) - 1)/a from a = eps, 2 eps (first-order
    Richardson); the error estimate uses a third quotient at 4 eps."""
    ctx = ctx or default_context()
    N = max(N or 0, n + 1, m + 1, 2)
    d1, d2, d4 = _L_quotients(n, m, N, ctx, eps)
    with ctx.work(64):
        r1 = 2 * d1 - d2
        r2 = 2 * d2 - d4
        err = abs(r1 - r2) / 3
    return Estimate(ctx.round(r1), ctx.round(err), mp.mpf(eps))


def green_ell(n, m, ctx: PrecisionContext | None = None, eps=DEFAULT_EPS, N=None) -> Estimate:
    """d/da W^a(n,m) at a = 1 by central differences with Richardson over
    eps and 2 eps; the error estimate uses the step 4 eps."""
    if (n + m) % 2:
        raise ParityError(f"Green's function needs n+m even, got {(n, m)}")
    ctx = ctx or default_context()
    N = max(N or 0, n + 1, m + 1, 2)
    D = []
    for k in (1, 2, 4):
        with ctx.work(64):
            h = real(eps) * k
            ap, am = 1 + h, 1 - h
        gp, gm = _grid_at(ap, N, ctx), _grid_at(am, N, ctx)
        with ctx.work(64):
            D.append((hirota_W(gp, n, m) - hirota_W(gm, n, m)) / (2 * h))
    with ctx.work(64):
        r1 = (4 * D[0] - D[1]) / 3
        r2 = (4 * D[1] - D[2]) / 3
        err = abs(r1 - r2) / 15
    return Estimate(ctx.round(r1), ctx.round(err), mp.mpf(eps))


def L_asymptote(n, m):
    return mp.log(mp.mpc(n, m)) + mp.euler - mp.log(2)


def ell_asymptote(n, m):
    return mp.log(mp.sqrt(n * n + m * m)) + mp.euler + mp.log(2)


def W_asymptote(n, m, a, ctx: PrecisionContext | None = None):
    """c(a) (a/2) |(n+im)/2|^{a-1}, the lattice derivative of the predictor."""
    from .asymptotics import c_of_a
    ctx = ctx or default_context()
    with ctx.work():
        a = real(a)
        return c_of_a(a, ctx) * (a / 2) * abs(mp.mpc(n, m) / 2) ** (a - 1)


def clear_cache():
    _grid.cache_clear()
