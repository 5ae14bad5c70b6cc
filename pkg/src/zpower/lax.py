"""Lax matrices, the wave function Psi_{n,m}(lambda) and the Fuchsian system."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .lattice import PowerMapGrid
from .numerics import CUT_DOWN, BranchError, det2, diag2, mat2, maxnorm


class SingularPointError(ValueError):
    pass


def u_at(grid: PowerMapGrid, n, m):
    u = grid[n + 1, m] - grid[n, m]
    if u == 0:
        raise ZeroDivisionError(f"u vanishes at {(n, m)}")
    return u


def v_at(grid: PowerMapGrid, n, m):
    v = grid[n, m + 1] - grid[n, m]
    if v == 0:
        raise ZeroDivisionError(f"v vanishes at {(n, m)}")
    return v


def U_mat(grid, n, m, lam):
    u = u_at(grid, n, m)
    return mat2(1, -u, lam / u, 1)


def V_mat(grid, n, m, lam):
    v = v_at(grid, n, m)
    return mat2(1, -v, -lam / v, 1)


def build_UV(grid: PowerMapGrid, n, m, lam):
    with grid.ctx.work():
        lam = mp.mpc(lam)
        return U_mat(grid, n, m, lam), V_mat(grid, n, m, lam)


def _lambda_factor(a, lam):
    if lam == 0:
        raise BranchError("lambda = 0 is a branch point")
    if CUT_DOWN.on_cut(lam):
        raise BranchError("lambda on the cut [0,-i inf)")
    t = CUT_DOWN.arg(lam)
    e = mp.exp(-(a / 4) * mp.mpc(mp.log(abs(lam)), t))
    return diag2(e, 1 / e)


def psi_eval(grid: PowerMapGrid, n, m, lam):
    """U_{n-1,m}...U_{0,m} V_{0,m-1}...V_{0,0} lambda^{-(a/4) sigma3}."""
    with grid.ctx.work(32):
        lam = mp.mpc(lam)
        P = _lambda_factor(grid.a, lam)
        for j in range(m):
            P = V_mat(grid, 0, j, lam) * P
        for k in range(n):
            P = U_mat(grid, k, m, lam) * P
    with grid.ctx.work():
        return +P


def psi_eval_alt(grid: PowerMapGrid, n, m, lam):
    """The other path: V_{n,m-1}...V_{n,0} U_{n-1,0}...U_{0,0} lambda^{-(a/4) sigma3}."""
    with grid.ctx.work(32):
        lam = mp.mpc(lam)
        P = _lambda_factor(grid.a, lam)
        for k in range(n):
            P = U_mat(grid, k, 0, lam) * P
        for j in range(m):
            P = V_mat(grid, n, j, lam) * P
    with grid.ctx.work():
        return +P


def det_psi_error(grid: PowerMapGrid, n, m, lam):
    """Relative deviation of det Psi from (lambda+1)^n (1-lambda)^m."""
    P = psi_eval(grid, n, m, lam)
    with grid.ctx.work():
        lam = mp.mpc(lam)
        want = (lam + 1) ** n * (1 - lam) ** m
        return abs(det2(P) - want) / abs(want)


def check_compatibility(grid: PowerMapGrid, n, m, lam):
    with grid.ctx.work():
        lam = mp.mpc(lam)
        left = U_mat(grid, n, m + 1, lam) * V_mat(grid, n, m, lam)
        right = V_mat(grid, n + 1, m, lam) * U_mat(grid, n, m, lam)
        return maxnorm(left - right)


@dataclass(frozen=True)
class IsomonodromyData:
    B: mp.matrix
    C: mp.matrix
    D: mp.matrix

    def A(self, lam):
        return -self.B / (1 + lam) + self.C / (1 - lam) + self.D / lam


def isomonodromy_data(grid: PowerMapGrid, n, m) -> IsomonodromyData:
    with grid.ctx.work():
        a = grid.a
        if n == 0:
            B = mp.zeros(2, 2)
        else:
            u, um = u_at(grid, n, m), u_at(grid, n - 1, m)
            B = (-n / (u + um)) * mat2(u, u * um, 1, um)
        if m == 0:
            C = mp.zeros(2, 2)
        else:
            v, vm = v_at(grid, n, m), v_at(grid, n, m - 1)
            C = (-m / (v + vm)) * mat2(v, v * vm, 1, vm)
        D = mat2(-a / 4, -(a / 2) * grid[n, m], 0, a / 4)
        return IsomonodromyData(B, C, D)


def check_lambda_equation(grid: PowerMapGrid, n, m, lam):
    """max of the (U) and (V) residuals of dX/dlambda = A' X - X A."""
    with grid.ctx.work():
        lam = mp.mpc(lam)
        if lam == 0 or lam == 1 or lam == -1:
            raise SingularPointError(f"lambda={lam} is a singular point")
        A0 = isomonodromy_data(grid, n, m).A(lam)
        An = isomonodromy_data(grid, n + 1, m).A(lam)
        Am = isomonodromy_data(grid, n, m + 1).A(lam)
        U = U_mat(grid, n, m, lam)
        V = V_mat(grid, n, m, lam)
        dU = mat2(0, 0, 1 / u_at(grid, n, m), 0)
        dV = mat2(0, 0, -1 / v_at(grid, n, m), 0)
        ru = maxnorm(dU - (An * U - U * A0))
        rv = maxnorm(dV - (Am * V - V * A0))
        return max(ru, rv)


def _taylor_step(data: IsomonodromyData, lam0, Y0, h, eps):
    """Advance Y' = A(lambda) Y from lam0 to lam0+h by a Taylor series."""
    # Taylor coefficients of 1/(1+l), 1/(1-l), 1/l about lam0, scaled by h^j
    rb, rc, rd = -h / (1 + lam0), h / (1 - lam0), -h / lam0
    pb, pc, pd = -1 / (1 + lam0), 1 / (1 - lam0), 1 / lam0
    A = []
    Y = [Y0]
    out = Y0.copy()
    k = 0
    while True:
        A.append(pb * data.B + pc * data.C + pd * data.D)
        pb, pc, pd = pb * rb, pc * rc, pd * rd
        # Y_{k+1} (in units of h^{k+1}) = h/(k+1) sum_j A_j Y_{k-j}
        acc = A[0] * Y[k]
        for j in range(1, k + 1):
            acc += A[j] * Y[k - j]
        Yk = acc * (h / (k + 1))
        Y.append(Yk)
        out += Yk
        k += 1
        if k > 4 and maxnorm(Yk) <= eps * maxnorm(out):
            return out
        if k > 5000:
            raise ArithmeticError("Taylor step did not converge")


def monodromy_loop(grid: PowerMapGrid, n, m, center=-1, radius=mp.mpf("0.1"), steps=64):
    """Continue Psi along a circle by integrating the lambda-equation.

    Returns (max deviation from psi_eval at the sample points, deviation of
    the continued value after the full loop from the starting value).
    """
    ctx = grid.ctx
    with ctx.work(32):
        data = isomonodromy_data(grid, n, m)
        center = mp.mpc(center)
        radius = mp.mpf(radius)
        pts = [center + radius * mp.expjpi(mp.mpf(2 * j) / steps) for j in range(steps + 1)]
        Y = psi_eval(grid, n, m, pts[0])
        start = Y.copy()
        scale = maxnorm(start)
        eps = mp.mpf(2) ** (-ctx.bits - 16)
        worst = mp.mpf(0)
        for j in range(steps):
            Y = _taylor_step(data, pts[j], Y, pts[j + 1] - pts[j], eps)
            if j + 1 < steps:
                worst = max(worst, maxnorm(Y - psi_eval(grid, n, m, pts[j + 1])) / scale)
        closure = maxnorm(Y - start) / scale
    return ctx.round(worst), ctx.round(closure)
