import mpmath as mp
import pytest

from zpower.lattice import evolve_grid
from zpower.lax import (SingularPointError, build_UV, check_compatibility,
                        check_lambda_equation, det_psi_error, isomonodromy_data,
                        monodromy_loop, psi_eval, psi_eval_alt)
from zpower.numerics import det2, maxnorm

LAMS = [mp.mpc("0.7", "-0.3"), mp.mpc(2, 1), mp.mpc("-0.5", "0.1")]


@pytest.fixture(scope="module")
def g1():
    with mp.workprec(256):
        return evolve_grid(1, 8)


def test_a1_lax_matrices(g1):
    lam = mp.mpc("0.3", "0.8")
    for n, m in [(0, 0), (3, 5)]:
        U, V = build_UV(g1, n, m, lam)
        assert maxnorm(U - mp.matrix([[1, -1], [lam, 1]])) == 0
        assert maxnorm(V - mp.matrix([[1, -1j], [1j * lam, 1]])) < mp.mpf("1e-70")


def test_uv_determinants_and_lambda_zero(grids22):
    g = grids22["2/3"]
    lam = mp.mpc("1.1", "-0.2")
    U, V = build_UV(g, 4, 7, lam)
    assert abs(det2(U) - (1 + lam)) < mp.mpf("1e-70")
    assert abs(det2(V) - (1 - lam)) < mp.mpf("1e-70")
    U0, V0 = build_UV(g, 4, 7, 0)
    for M in (U0, V0):
        assert M[1, 0] == 0 and M[0, 0] == 1 and M[1, 1] == 1


def test_psi_origin_and_det(grids22):
    g = grids22["0.5"]
    lam = mp.mpc("0.4", "0.9")
    P = psi_eval(g, 0, 0, lam)
    e = mp.exp(-(g.a / 4) * mp.log(lam))
    assert maxnorm(P - mp.matrix([[e, 0], [0, 1 / e]])) < mp.mpf("1e-70")
    assert abs(det2(psi_eval(g, 1, 1, 2)) + 3) < mp.mpf("1e-70")


def test_psi_orderings_agree():
    g = evolve_grid("0.7", 8)
    lam = mp.mpc("0.3", "0.2")
    assert maxnorm(psi_eval(g, 5, 5, lam) - psi_eval_alt(g, 5, 5, lam)) <= mp.mpf("1e-30")


def test_det_psi_identity(grids22):
    for g in grids22.values():
        worst = max(det_psi_error(g, n, m, l) for n in range(0, 21, 4) for m in range(0, 21, 5) for l in LAMS)
        assert worst <= mp.mpf("1e-30")


def test_compatibility_examples(g1, grids22):
    assert check_compatibility(g1, 2, 3, mp.mpc(1, 1)) == 0
    assert check_compatibility(grids22["2/3"], 3, 4, mp.mpc("1.7", "-0.4")) <= mp.mpf("1e-30")
    assert check_compatibility(grids22["2/3"], 3, 4, 0) <= mp.mpf("1e-70")


def test_lambda_equation(grids22):
    assert check_lambda_equation(grids22["0.5"], 2, 3, mp.mpc("0.6", "0.6")) <= mp.mpf("1e-28")
    for bad in (0, 1, -1):
        with pytest.raises(SingularPointError):
            check_lambda_equation(grids22["0.5"], 2, 3, bad)


def test_isomonodromy_structure(grids22):
    g = grids22["0.5"]
    d = isomonodromy_data(g, 2, 3)
    ev = sorted(mp.eig(-d.B)[0], key=lambda z: abs(z))
    assert abs(ev[0]) < mp.mpf("1e-60") and abs(ev[1] - 2) < mp.mpf("1e-60")
    a = g.a
    assert d.D[0, 0] == -a / 4 and d.D[1, 1] == a / 4 and d.D[1, 0] == 0
    assert abs(d.D[0, 1] + a / 2 * g[2, 3]) < mp.mpf("1e-70")
    assert abs(d.B[0, 0] + d.B[1, 1] + 2) < mp.mpf("1e-70")
    assert abs(d.C[0, 0] + d.C[1, 1] + 3) < mp.mpf("1e-70")
    assert abs(det2(d.B)) < mp.mpf("1e-70") and abs(det2(d.C)) < mp.mpf("1e-70")


def test_trace_A_times_polynomial_is_quadratic(grids22):
    # lambda(1-lambda^2) tr A is a polynomial of degree <= 2
    d = isomonodromy_data(grids22["1.5"], 4, 6)
    pts = [mp.mpc(k, 1) / 3 for k in range(1, 6)]
    vals = [l * (1 - l * l) * (d.A(l)[0, 0] + d.A(l)[1, 1]) for l in pts]
    coef = mp.lu_solve(mp.matrix([[p ** j for j in range(3)] for p in pts[:3]]), mp.matrix(vals[:3]))
    for p, v in zip(pts[3:], vals[3:]):
        assert abs(sum(coef[j] * p ** j for j in range(3)) - v) < mp.mpf("1e-60")


def test_monodromy_loop_around_minus_one(grids22):
    along, closure = monodromy_loop(grids22["2/3"], 3, 4)
    assert along <= mp.mpf("1e-25")
    assert closure <= mp.mpf("1e-25")
