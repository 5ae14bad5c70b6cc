import random

import mpmath as mp
import pytest

from zpower.asymptotics import c_of_a, predict
from zpower.numerics import det2, maxnorm
from zpower.parametrix import (SectorError, SectorSpec, auto_sector, b0_from_psi0, b0_matrix,
                               delta, eta, gamma0_jump_residual, large_xi_defect,
                               leading_constant, ode_matrix, p0_hat_zero, parametrix_constants,
                               pinf_hat, psi0_eval, ray_jump)

A = mp.mpf("0.7")
TH = mp.mpf("0.3")
HALF_I = mp.mpc(0, "0.5")


@pytest.mark.parametrize("r", ["0.1", "1", "10"])
def test_gamma0_jump(r):
    assert gamma0_jump_residual(mp.mpf(r), A, TH) <= mp.mpf("1e-20")


def test_gauge_preserves_jump():
    k = mp.matrix([[1, 0], [mp.mpf("0.37"), 1]])
    lo = SectorSpec(TH, "S1").bounds[0]
    hi = SectorSpec(TH, "S3").bounds[1]
    P = k * psi0_eval(mp.expj(lo), A, SectorSpec(TH, "S1"), arg=lo)
    M = k * psi0_eval(mp.expj(hi), A, SectorSpec(TH, "S3"), arg=hi)
    assert maxnorm(P - M * mp.matrix([[0, 1], [-1, 0]])) <= mp.mpf("1e-20")


def test_ray_jumps_compose():
    want = {1: mp.matrix([[1, 0], [mp.expjpi(A / 2), 1]]),
            2: mp.matrix([[1, 0], [mp.expjpi(-A / 2), 1]]),
            0: mp.matrix([[0, 1], [-1, 0]])}
    total = mp.eye(2)
    for ray in (1, 2):
        J = ray_jump("0.01", A, TH, ray)
        assert maxnorm(J - want[ray]) <= mp.mpf("1e-20")
        total = total * J
    # after S1 -> S2 -> S3 the product equals the sector factor of S3
    assert maxnorm(total - mp.matrix([[1, 0], [2 * mp.cospi(A / 2), 1]])) <= mp.mpf("1e-20")
    assert maxnorm(ray_jump("0.01", A, TH, 0) - want[0]) <= mp.mpf("1e-20")


def test_ode_residual():
    xi = mp.mpc(2, 1)
    sec = auto_sector(xi, TH)
    h = mp.mpf("1e-10")
    dP = (psi0_eval(xi + h, A, sec) - psi0_eval(xi - h, A, sec)) / (2 * h)
    assert maxnorm(dP - ode_matrix(xi, A) * psi0_eval(xi, A, sec)) <= mp.mpf("1e-18")


def test_det_constant_per_sector():
    pts = {"S1": [mp.mpc(2, -1), mp.mpc("0.3", "-1.5"), mp.mpc(5, 0)],
           "S2": [mp.mpc("-0.2", 3), mp.mpc(1, 1), mp.mpc("0.1", 7)],
           "S3": [mp.mpc(-4, "0.2"), mp.mpc(-1, -1), mp.mpc(-3, 2)]}
    for s, xs in pts.items():
        ds = [det2(psi0_eval(x, A, SectorSpec(TH, s))) for x in xs]
        for d in ds:
            assert abs(d - HALF_I) <= mp.mpf("1e-20")


def test_sector_mismatch():
    with pytest.raises(SectorError):
        psi0_eval(mp.mpc(2, 1), A, SectorSpec(TH, "S1"))


def test_large_xi_defect_bounded():
    ds = [large_xi_defect(R, A, TH) for R in (100, 1000, 10000)]
    assert max(ds) < 1
    assert abs(ds[2] - ds[1]) < abs(ds[1] - ds[0])


def test_b0_a1():
    assert maxnorm(b0_matrix(1) - mp.matrix([[1, 0.25j], [-1, 0.25j]])) < mp.mpf("1e-70")


@pytest.mark.parametrize("a", ["0.3", "1", "1.7"])
def test_b0_det(a):
    assert abs(det2(b0_matrix(a)) - HALF_I) <= mp.mpf("1e-25")


def test_b0_small_xi_limit_is_linear_in_xi():
    # the remainder is O(xi): the defect divided by |xi| settles to a constant
    b0 = b0_matrix(A)
    ratios = []
    for e in ("1e-8", "1e-12", "1e-16"):
        x = mp.mpf(e)
        ratios.append(maxnorm(b0_from_psi0(x, A, SectorSpec(TH, "S1")) - b0) / x)
    assert max(ratios) / min(ratios) < 1.01
    for s, t in (("S1", 0), ("S2", 1), ("S3", 3)):
        x = mp.mpf("1e-20") * mp.expj(t)
        assert maxnorm(b0_from_psi0(x, A, SectorSpec(TH, s)) - b0) <= mp.mpf("1e-15")


def test_leading_constant_identities():
    v = leading_constant("0.8", 5, 3)
    assert abs(v - c_of_a("0.8") * mp.power(mp.mpc(5, 3) / 2, mp.mpf("0.8"))) <= mp.mpf("1e-25")
    for n, m in [(1, 1), (4, 9)]:
        assert abs(leading_constant(1, n, m) - mp.mpc(n, m)) < mp.mpf("1e-60")


def test_eta_delta_identity():
    a = mp.mpf("0.6")
    lhs = eta(a) ** 2 * mp.power(delta(2, 7), a)
    rhs = 2 ** (a + 1) * 1j * mp.sinpi(a / 2) * mp.power(mp.mpc(2, 7), a)
    assert abs(lhs - rhs) < mp.mpf("1e-60")


def test_eta_squares_to_definition():
    for a in ("0.3", "1", "1.9"):
        x = mp.mpf(a)
        assert abs(eta(x) ** 2 - (mp.expjpi(x) - 1)) < mp.mpf("1e-60")


def test_pinf_hat():
    Q = pinf_hat("0.9", 4, 4)
    assert abs(det2(Q) - HALF_I) <= mp.mpf("1e-25")
    assert abs(Q[0, 1] / Q[1, 1] + mp.mpf("0.9") / mp.mpc(8, 8)) < mp.mpf("1e-60")
    Q1 = pinf_hat(1, 2, 3)
    assert all(mp.isfinite(Q1[i, j]) for i in range(2) for j in range(2))


def test_pinf_hat_is_sigma1_conjugate_of_reflected_p0():
    # direct substitution a -> -a in the P0 closed form, with eta(-a) = conj(eta(a))
    a, n, m = mp.mpf("0.9"), 3, 5
    e = mp.conj(eta(a))
    g = mp.gamma(a / 2)
    sp = mp.sqrt(mp.pi)
    D = delta(n, m)
    b = -a
    P = mp.matrix([[-(2 ** b) * sp / (e * b * g) * mp.power(D, (1 - b) / 2),
                    -(2 ** (-b - 2)) * 1j * e * g / sp * mp.power(D, (1 + b) / 2)],
                   [2 ** b * sp / (e * g) * mp.power(D, (-1 - b) / 2),
                    -(2 ** (-b - 2)) * 1j * e * b * g / sp * mp.power(D, (-1 + b) / 2)]])
    s1 = mp.matrix([[0, 1], [1, 0]])
    conj = mp.matrix([[mp.conj(P[i, j]) for j in range(2)] for i in range(2)])
    assert maxnorm(s1 * conj - pinf_hat(a, n, m)) < mp.mpf("1e-60")


def test_random_constants():
    rnd = random.Random(2024)
    for _ in range(10):
        a = mp.mpf(rnd.randint(5, 195)) / 100
        n, m = rnd.randint(1, 40), rnd.randint(1, 40)
        pc = parametrix_constants(a, n, m)
        assert abs(det2(pc.P0_hat) - HALF_I) <= mp.mpf("1e-25")
        assert abs(det2(pc.Pinf_hat) - HALF_I) <= mp.mpf("1e-25")
        lc = leading_constant(a, n, m)
        assert abs(lc - predict(n, m, a)) <= mp.mpf("1e-25") * abs(lc)
        assert abs(pc.psi1[0, 1] - (1 - a * a) / 4) < mp.mpf("1e-70")
