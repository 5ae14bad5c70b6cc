"""Moments of the weight, Hankel systems, monic orthogonal polynomials and
the recovery of Z^a from them."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .numerics import (CUT_DOWN, BranchError, PoleError, PrecisionContext,
                       default_context, gamma_real, real)


class JetSeries:
    """Truncated Taylor jet sum_k c_k (x - x0)^k, k < order."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    @property
    def order(self):
        return len(self.c)

    @classmethod
    def variable(cls, x0, order):
        c = [mp.mpc(0)] * order
        c[0] = mp.mpc(x0)
        if order > 1:
            c[1] = mp.mpc(1)
        return cls(c)

    @classmethod
    def constant(cls, v, order):
        return cls([mp.mpc(v)] + [mp.mpc(0)] * (order - 1))

    def _lift(self, other):
        if isinstance(other, JetSeries):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other
        return JetSeries.constant(other, self.order)

    def __add__(self, other):
        o = self._lift(other)
        return JetSeries([x + y for x, y in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return JetSeries([-x for x in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, JetSeries):
            return JetSeries([x * other for x in self.c])
        o = self._lift(other)
        n = self.order
        return JetSeries([mp.fsum(self.c[j] * o.c[k - j] for j in range(k + 1)) for k in range(n)])

    __rmul__ = __mul__

    def reciprocal(self):
        f = self.c
        if f[0] == 0:
            raise ZeroDivisionError("jet with zero constant term")
        g = [1 / f[0]]
        for k in range(1, self.order):
            g.append(-mp.fsum(f[j] * g[k - j] for j in range(1, k + 1)) / f[0])
        return JetSeries(g)

    def __truediv__(self, other):
        if not isinstance(other, JetSeries):
            return JetSeries([x / other for x in self.c])
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def power(self, p, base=None):
        """self**p for real p.  ``base`` is f0**p on the wanted branch; the
        principal value is used when omitted."""
        f = self.c
        if f[0] == 0:
            raise ZeroDivisionError("power of a jet with zero constant term")
        g = [base if base is not None else mp.mpc(f[0]) ** p]
        for k in range(1, self.order):
            s = mp.fsum((p * j - (k - j)) * f[j] * g[k - j] for j in range(1, k + 1))
            g.append(s / (k * f[0]))
        return JetSeries(g)

    def __pow__(self, p):
        if int(p) == p and p >= 0:
            out = JetSeries.constant(1, self.order)
            for _ in range(int(p)):
                out = out * self
            return out
        if int(p) == p:
            return (self ** (-int(p))).reciprocal()
        return self.power(p)

    def coeff(self, k):
        return self.c[k]


def _lam_power_jet(x0, p, order):
    """Jet of lambda^p at x0 on the cut [0,-i inf)."""
    lam = JetSeries.variable(x0, order)
    t = CUT_DOWN.arg(x0)
    base = mp.exp(p * mp.mpc(mp.log(abs(x0)), t))
    return lam.power(p, base)


def _residues(poly, p, n, m):
    """Residues at lambda = 1 and -1 of poly(lambda) lambda^p (lambda-1)^-m (lambda+1)^-n."""
    total = mp.mpc(0)
    if m > 0:
        lam = JetSeries.variable(1, m)
        f = _lam_power_jet(mp.mpf(1), p, m) * (lam + 1) ** (-n)
        if poly is not None:
            f = f * _poly_jet(poly, lam)
        total += f.coeff(m - 1)
    if n > 0:
        lam = JetSeries.variable(-1, n)
        f = _lam_power_jet(mp.mpf(-1), p, n) * (lam - 1) ** (-m)
        if poly is not None:
            f = f * _poly_jet(poly, lam)
        total += f.coeff(n - 1)
    return total


def _poly_jet(coeffs, lam: JetSeries):
    out = JetSeries.constant(0, lam.order)
    for c in reversed(coeffs):
        out = out * lam + c
    return out


def _check_indices(s, n, m):
    if n < 0 or m < 0 or n + m < 1:
        raise ValueError(f"need n, m >= 0 and n+m >= 1, got {(n, m)}")
    if not 0 <= s <= n + m - 1:
        raise ValueError(f"moment index s={s} outside 0..{n + m - 1}")


def _moment(s, n, m, a):
    return 2 * mp.pi * mp.mpc(0, 1) * mp.expjpi(a / 2) * _residues(None, s - a / 2, n, m)


def moment_residue(s, n, m, a, ctx: PrecisionContext | None = None):
    """H_s by residues at lambda = +-1 (a side is dropped when its order is 0)."""
    ctx = ctx or default_context()
    _check_indices(s, n, m)
    with ctx.work(32):
        v = _moment(s, n, m, real(a))
    return ctx.round(v)


def hyp2f1_series(a, b, c, z, eps):
    """Gauss series; |z| < 1 or a terminating numerator parameter."""
    term = mp.mpc(1)
    total = mp.mpc(1)
    k = 0
    terminating = (mp.isint(a) and a <= 0) or (mp.isint(b) and b <= 0)
    if not terminating and abs(z) >= 1:
        raise ValueError("series outside the unit disc")
    while True:
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        k += 1
        total += term
        if term == 0:
            return total
        if not terminating and abs(term) <= eps * abs(total) and k > 2:
            return total
        if k > 100000:
            raise ArithmeticError("hypergeometric series did not converge")


def hyp2f1_beyond_one(a, b, c, x, eps):
    """F(a,b;c;x - i0) for real x > 1 through the 1/z connection formula.

    Requires b - a not an integer.  Evaluated below the cut, so arg(-z) = pi.
    """
    if mp.isint(b - a):
        raise ArithmeticError("connection formula degenerate for integer b-a")
    g = mp.gamma
    w = 1 / mp.mpf(x)
    mz = mp.mpc(x, 0)  # |-z|, arg(-z) = pi
    t1 = g(c) * g(b - a) / (g(b) * g(c - a)) * mp.exp(-a * mp.mpc(mp.log(mz.real), mp.pi)) \
        * hyp2f1_series(a, a - c + 1, a - b + 1, w, eps)
    t2 = g(c) * g(a - b) / (g(a) * g(c - b)) * mp.exp(-b * mp.mpc(mp.log(mz.real), mp.pi)) \
        * hyp2f1_series(b, b - c + 1, b - a + 1, w, eps)
    return t1 + t2


@dataclass(frozen=True)
class HypergeometricMoment:
    value: mp.mpc
    verified: bool


def moment_hypergeometric(s, n, m, a, ctx: PrecisionContext | None = None) -> HypergeometricMoment:
    """H_s in closed hypergeometric form, F(m, 1-a/2+s; m+n; 2-i0).

    ``verified`` records agreement with moment_residue to 1e-10 relative.
    """
    ctx = ctx or default_context()
    if n < 1 or m < 1:
        raise ValueError("hypergeometric form needs n, m >= 1")
    _check_indices(s, n, m)
    with ctx.work(64):
        a = real(a)
        for x in (a / 2 - s, m + n - 1 + a / 2 - s):
            if x <= 0 and mp.isint(x):
                raise PoleError(f"Gamma pole at {x}")
        eps = mp.mpf(2) ** (-ctx.bits - 32)
        pref = (-1) ** (s + m) * 2 * mp.pi * mp.mpc(0, 1) * mp.gamma(m + n - 1 + a / 2 - s) \
            / (mp.gamma(a / 2 - s) * mp.gamma(n + m))
        val = pref * hyp2f1_beyond_one(mp.mpf(m), 1 - a / 2 + s, mp.mpf(m + n), 2, eps)
        ref = _moment(s, n, m, a)
        ok = abs(val - ref) <= mp.mpf("1e-10") * max(1, abs(ref))
    return HypergeometricMoment(ctx.round(val), bool(ok))


class SingularHankelError(ArithmeticError):
    def __init__(self, l):
        super().__init__(f"Hankel determinant of size {l} vanishes")
        self.l = l


@dataclass(frozen=True)
class MomentTable:
    n: int
    m: int
    a: mp.mpf
    H: tuple


@dataclass(frozen=True)
class HankelSystem:
    moments: MomentTable
    dets: tuple          # det H_l for l = 0..k (det H_0 = 1)
    polys: tuple         # P_l coefficient tuples, low degree first, l = 0..k
    norms: tuple         # h_l for l = 0..k-1
    orthogonality: mp.mpf

    @property
    def k(self):
        return len(self.polys) - 1


def _hankel_bits(ctx, n, m):
    # the Hankel matrices are badly conditioned; spend bits in proportion
    return ctx.bits + 8 * (n + m) + 64


def moment_table(n, m, a, ctx: PrecisionContext | None = None) -> MomentTable:
    ctx = ctx or default_context()
    with ctx.work():
        a = real(a)
    H = tuple(moment_residue(s, n, m, a, ctx) for s in range(n + m))
    return MomentTable(n, m, a, H)


def _build(n, m, a, bits):
    """Hankel data at the given working precision (no final rounding)."""
    with mp.workprec(bits):
        k = (n + m) // 2
        H = [_moment(s, n, m, a) for s in range(n + m)]
        dets = [mp.mpc(1)]
        polys = [(mp.mpc(1),)]
        for l in range(1, k + 1):
            M = mp.matrix(l, l)
            rhs = mp.matrix(l, 1)
            for i in range(l):
                for j in range(l):
                    M[i, j] = H[i + j]
                rhs[i] = -H[i + l]
            d = mp.det(M)
            if d == 0:
                raise SingularHankelError(l)
            dets.append(d)
            c = mp.lu_solve(M, rhs)
            polys.append(tuple(c[j] for j in range(l)) + (mp.mpc(1),))
        norms = tuple(dets[l + 1] / dets[l] for l in range(k))
        worst = mp.mpf(0)
        for l in range(1, k + 1):
            P = polys[l]
            for j in range(l):
                terms = [P[i] * H[i + j] for i in range(l + 1)]
                scale = abs(norms[l]) if l < k else max(abs(t) for t in terms)
                worst = max(worst, abs(mp.fsum(terms)) / scale)
        return H, dets, polys, norms, worst


def orthopoly_build(n, m, a, ctx: PrecisionContext | None = None) -> HankelSystem:
    ctx = ctx or default_context()
    if (n + m) % 2:
        raise ValueError("n+m must be even")
    with ctx.work():
        a = real(a)
    H, dets, polys, norms, worst = _build(n, m, a, _hankel_bits(ctx, n, m))
    r = ctx.round
    return HankelSystem(
        MomentTable(n, m, a, tuple(r(h) for h in H)),
        tuple(r(d) for d in dets),
        tuple(tuple(r(c) for c in P) for P in polys),
        tuple(r(h) for h in norms),
        r(worst),
    )


def norm_from_moments(system: HankelSystem, l):
    """h_l as the moment combination sum_j c_j H_{l+j} of P_l."""
    P = system.polys[l]
    H = system.moments.H
    return mp.fsum(P[j] * H[l + j] for j in range(l + 1))


def za_from_polys(n, m, a, ctx: PrecisionContext | None = None):
    """Z^a(n,m) from the monic polynomial P_k, k = (n+m)/2."""
    ctx = ctx or default_context()
    if (n + m) % 2:
        raise ValueError("n+m must be even")
    if n + m == 0:
        return mp.mpc(0)
    with ctx.work():
        a = real(a)
    bits = _hankel_bits(ctx, n, m)
    _, _, polys, _, _ = _build(n, m, a, bits)
    with mp.workprec(bits):
        P = polys[-1]
        if P[0] == 0:
            raise ZeroDivisionError("P_k(0) = 0")
        res = _residues(P, -1 - a / 2, n, m)
        z = (-1) ** m * (-mp.expjpi(a / 2) * res / P[0])
    return ctx.round(z)
