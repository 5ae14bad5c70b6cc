"""Extended-precision scalars, branch-aware powers and the special functions.

Everything is built on mpmath.  Precision is carried by a PrecisionContext;
each public function evaluates under ``mp.workprec(ctx.bits)`` (plus private
guard bits where cancellation is known) and returns values rounded to the
context precision.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

BigComplex = mp.mpc

DEFAULT_BITS = 256
DEFAULT_TOL = 1e-40
PRECISION_ENV = "ZPOWER_BITS"

# Bessel series are only used inside this disc (see bessel_j).
SERIES_ARG_CAP = 200
SERIES_TERM_CAP = 20000


class PoleError(ValueError):
    """Gamma (or a quantity built on it) evaluated at a pole."""


class BranchError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PrecisionContext:
    bits: int = DEFAULT_BITS
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise ValueError(f"mantissa bits must be an integer >= 64, got {self.bits}")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.tol > 2.0 ** (-self.bits / 2):
            raise ValueError(
                f"tolerance {self.tol:g} too loose for {self.bits} bits "
                f"(must be <= 2^-{self.bits / 2:g})")

    def work(self, extra: int = 0):
        return mp.workprec(self.bits + extra)

    def round(self, x):
        with mp.workprec(self.bits):
            return +x


def default_context() -> PrecisionContext:
    bits = int(os.environ.get(PRECISION_ENV, DEFAULT_BITS))
    tol = DEFAULT_TOL if bits >= DEFAULT_BITS else 2.0 ** (-bits / 2)
    return PrecisionContext(bits, tol)


@dataclass(frozen=True)
class BranchSpec:
    """Cut along a vertical half-line from the origin.

    ``cut="down"`` is the cut [0,-i inf) with arg in (-pi/2, 3pi/2];
    ``cut="up"`` is [0,+i inf) with arg in (-3pi/2, pi/2].
    """

    cut: str

    def __post_init__(self):
        if self.cut not in ("down", "up"):
            raise ValueError(f"unknown cut {self.cut!r}")

    @property
    def arg_range(self):
        if self.cut == "down":
            return (-mp.pi / 2, 3 * mp.pi / 2)
        return (-3 * mp.pi / 2, mp.pi / 2)

    def arg(self, z) -> mp.mpf:
        z = mp.mpc(z)
        if z == 0:
            raise BranchError("arg of zero")
        t = mp.arg(z)
        if self.cut == "down":
            if t <= -mp.pi / 2:
                t += 2 * mp.pi
        elif t > mp.pi / 2:
            t -= 2 * mp.pi
        return t

    def on_cut(self, z, tol=0) -> bool:
        z = mp.mpc(z)
        if abs(z.real) > tol:
            return False
        return z.imag <= 0 if self.cut == "down" else z.imag >= 0


CUT_DOWN = BranchSpec("down")
CUT_UP = BranchSpec("up")


@dataclass(frozen=True)
class MathConstants:
    euler_gamma: mp.mpf
    pi: mp.mpf


def constants(ctx: PrecisionContext | None = None) -> MathConstants:
    ctx = ctx or default_context()
    with ctx.work():
        return MathConstants(+mp.euler, +mp.pi)


def branch_log(z, spec: BranchSpec, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.work():
        z = mp.mpc(z)
        if z == 0:
            raise BranchError("log of zero")
        return mp.mpc(mp.log(abs(z)), spec.arg(z))


def branch_power(z, p, spec: BranchSpec, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.work(16):
        z = mp.mpc(z)
        if z == 0:
            raise BranchError("power of zero")
        w = mp.exp(mp.mpf(p) * mp.mpc(mp.log(abs(z)), spec.arg(z)))
    return ctx.round(w)


def polar_power(r, t, p):
    """(r e^{it})^p with the argument t taken literally (universal cover)."""
    return mp.exp(p * mp.mpc(mp.log(r), t))


def real(x) -> mp.mpf:
    """Parse an exponent-like real exactly at the current precision.

    Accepts mpf, int, Fraction and strings such as "0.5" or "2/3"; floats
    are taken at face value.
    """
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        x = x.strip()
        if "/" in x:
            num, den = x.split("/", 1)
            return mp.mpf(num.strip()) / mp.mpf(den.strip())
        return mp.mpf(x)
    return mp.mpf(x)


def is_nonpositive_integer(x) -> bool:
    return x <= 0 and mp.isint(x)


def gamma_real(x, ctx: PrecisionContext | None = None) -> mp.mpf:
    ctx = ctx or default_context()
    with ctx.work():
        x = mp.mpf(x)
        if is_nonpositive_integer(x):
            raise PoleError(f"Gamma has a pole at {mp.nstr(x, 10)}")
        return mp.gamma(x)


def _series_guard(zabs) -> int:
    # terms grow like e^{|z|} before the alternating sum settles; hankel
    # combinations cancel another e^{|z|}
    return int(2.9 * float(zabs)) + 32


def _j_series(nu, zabs, zarg, bits):
    """J_nu and z J_nu'(z) for z = zabs e^{i zarg}, at working precision bits.

    zarg is used literally so that callers can sit on any sheet of z^nu.
    """
    with mp.workprec(bits):
        nu = mp.mpf(nu)
        half = mp.mpf(zabs) / 2
        lead = polar_power(half, mp.mpf(zarg), nu)
        w = -polar_power(half, mp.mpf(zarg), 2)
        if is_nonpositive_integer(nu + 1):
            # 1/Gamma(nu+1) vanishes; shift to the first nonzero term
            raise ValueError("negative integer order not supported")
        t = mp.rgamma(nu + 1)
        s = t
        d = nu * t
        eps = mp.mpf(2) ** (-bits - 8)
        j = 0
        while True:
            j += 1
            if j > SERIES_TERM_CAP:
                raise ConvergenceError(
                    f"Bessel series did not converge in {SERIES_TERM_CAP} terms")
            t = t * w / (j * (nu + j))
            s += t
            d += (2 * j + nu) * t
            if j > abs(half) and abs(t) * (2 * j + abs(nu) + 1) <= eps * (abs(s) + abs(d)):
                break
        return s * lead, d * lead


def _check_cap(zabs):
    if zabs > SERIES_ARG_CAP:
        raise ConvergenceError(
            f"|z|={mp.nstr(zabs, 6)} exceeds the series cap {SERIES_ARG_CAP}")


def _resolve_arg(z, spec, arg):
    if arg is not None:
        return mp.mpf(arg)
    if spec is not None:
        return spec.arg(z)
    return mp.arg(z)


def bessel_j_deriv(nu, z, ctx: PrecisionContext | None = None,
                   spec: BranchSpec | None = None, arg=None):
    """(J_nu(z), J_nu'(z)).  The sheet of z^nu is fixed by ``arg`` if given,
    else by ``spec``, else the principal branch."""
    ctx = ctx or default_context()
    with ctx.work():
        z = mp.mpc(z)
        zabs = abs(z)
        _check_cap(zabs)
        if zabs == 0:
            if nu == 0:
                return mp.mpc(1), mp.mpc(0)
            if nu > 0:
                return mp.mpc(0), (mp.mpc(0.5) if nu == 1 else mp.mpc(0))
            raise BranchError("J_nu(0) is singular for negative order")
        zarg = _resolve_arg(z, spec, arg)
    j, zdj = _j_series(nu, zabs, zarg, ctx.bits + _series_guard(zabs))
    with mp.workprec(ctx.bits + _series_guard(zabs)):
        dj = zdj / polar_power(zabs, zarg, 1)
    return ctx.round(j), ctx.round(dj)


def bessel_j(nu, z, ctx: PrecisionContext | None = None,
             spec: BranchSpec | None = None, arg=None):
    return bessel_j_deriv(nu, z, ctx, spec, arg)[0]


def _hankel_pair(nu, zabs, zarg, bits):
    """H1, H2 and z H1', z H2' at precision bits (guard already included)."""
    with mp.workprec(bits):
        nu = mp.mpf(nu)
        if mp.isint(nu):
            raise ValueError("integer order is not supported for Hankel functions")
        jp, djp = _j_series(nu, zabs, zarg, bits)
        jm, djm = _j_series(-nu, zabs, zarg, bits)
        sn = mp.mpc(0, 1) * mp.sinpi(nu)
        ep, em = mp.expjpi(nu), mp.expjpi(-nu)
        h1 = (jm - jp * em) / sn
        h2 = (jp * ep - jm) / sn
        dh1 = (djm - djp * em) / sn
        dh2 = (djp * ep - djm) / sn
        return h1, h2, dh1, dh2


def hankel_h_deriv(kind, nu, z, ctx: PrecisionContext | None = None,
                   spec: BranchSpec | None = None, arg=None):
    """(H^{(kind)}_nu(z), d/dz of it) from the J series."""
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    ctx = ctx or default_context()
    with ctx.work():
        z = mp.mpc(z)
        zabs = abs(z)
        _check_cap(zabs)
        if zabs == 0:
            raise BranchError("Hankel functions are singular at 0")
        zarg = _resolve_arg(z, spec, arg)
    bits = ctx.bits + _series_guard(zabs)
    h1, h2, dh1, dh2 = _hankel_pair(nu, zabs, zarg, bits)
    with mp.workprec(bits):
        zz = polar_power(zabs, zarg, 1)
        h, dh = (h1, dh1 / zz) if kind == 1 else (h2, dh2 / zz)
    return ctx.round(h), ctx.round(dh)


def hankel_h(kind, nu, z, ctx: PrecisionContext | None = None,
             spec: BranchSpec | None = None, arg=None):
    return hankel_h_deriv(kind, nu, z, ctx, spec, arg)[0]


def maxnorm(M) -> mp.mpf:
    """Largest entry modulus of an mpmath matrix."""
    return max(abs(M[i, j]) for i in range(M.rows) for j in range(M.cols))


def mat2(a, b, c, d) -> mp.matrix:
    M = mp.matrix(2, 2)
    M[0, 0], M[0, 1], M[1, 0], M[1, 1] = a, b, c, d
    return M


def diag2(a, b) -> mp.matrix:
    return mat2(a, 0, 0, b)


def det2(M):
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def bits_for_digits(digits: float) -> int:
    return int(math.ceil(digits * math.log2(10)))
