"""Independent reference computations used only by the tests."""

import mpmath as mp


def moment_quadrature(s, n, m, a, bits=96):
    """H_s by direct quadrature along the ray lambda = -i t, t in [0, inf).

    The weight is taken on the right-hand side of the ray, where
    arg lambda = -pi/2, so lambda^{-a/2} = t^{-a/2} e^{i pi a/4}.
    """
    with mp.workprec(bits):
        a = mp.mpf(a)
        i = mp.mpc(0, 1)
        w = 2 * i * mp.sinpi(a / 2) * mp.expjpi(a / 4)

        def f(t):
            lam = -i * t
            return (lam ** s) * t ** (-a / 2) * w * (lam - 1) ** (-m) * (lam + 1) ** (-n) * (-i)

        # t = u^2 on [0,1] and t = 1/u^2 on [1,inf) soften the t^{-a/2}
        # endpoint and the algebraic tail
        head = mp.quad(lambda u: f(u * u) * 2 * u, [0, 1])
        tail = mp.quad(lambda u: f(1 / (u * u)) * 2 / u ** 3, [0, 1])
        return head + tail


def evolve_reference(a, N, bits):
    """Plain dictionary evolution at a fixed precision, for cross-checks."""
    with mp.workprec(bits):
        a = mp.mpf(a) if not isinstance(a, mp.mpf) else a
        f = {(0, 0): mp.mpc(0), (1, 0): mp.mpc(1), (0, 1): mp.expjpi(a / 2)}
        for k in range(1, N):
            for key, prev, cur in (((k + 1, 0), (k - 1, 0), (k, 0)), ((0, k + 1), (0, k - 1), (0, k))):
                p, c = f[prev], f[cur]
                f[key] = c * (a * p - 2 * k * (c - p)) / (a * c - 2 * k * (c - p))
        for n in range(1, N + 1):
            for m in range(1, N + 1):
                p, q, s = f[(n - 1, m - 1)], f[(n, m - 1)], f[(n - 1, m)]
                f[(n, m)] = (p * s + q * p - 2 * q * s) / (2 * p - q - s)
        return f
