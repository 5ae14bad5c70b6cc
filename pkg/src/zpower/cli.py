"""Command-line front end and the grid file format.

Grid file (text, UTF-8)::

    # zpower grid
    version 1
    a <decimal>
    N <int>
    bits <int>
    <n> <m> <re> <im>        one row per site, n-major

Decimals carry enough digits to reproduce every value bit for bit at the
stored precision.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import random
import sys
from dataclasses import dataclass

import mpmath as mp
from mpmath.libmp import to_str

from . import asymptotics as asy
from . import circle_pattern as cp
from . import discrete_log as dl
from . import lattice, lax, ortho, parametrix
from .numerics import (DEFAULT_TOL, PRECISION_ENV, PrecisionContext,
                       default_context, real)

FORMAT_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    a: str
    N: int
    bits: int
    tol: float
    out: str | None = None
    eps: str = "1e-12"
    window: int | None = None

    def __post_init__(self):
        try:
            a = float(real(self.a))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"cannot parse a={self.a!r}") from e
        if not 0 < a < 2:
            raise ConfigError(f"a must lie in (0, 2), got {self.a}")
        if self.N < 2:
            raise ConfigError(f"N must be >= 2, got {self.N}")
        if self.bits < 64:
            raise ConfigError(f"precision must be >= 64 bits, got {self.bits}")

    @property
    def ctx(self) -> PrecisionContext:
        try:
            return PrecisionContext(self.bits, self.tol)
        except ValueError as e:
            raise ConfigError(str(e)) from e


def _digits(bits):
    return int(math.ceil(bits * math.log10(2))) + 3


def format_real(x, bits) -> str:
    with mp.workprec(bits):
        x = mp.mpf(x)
        if mp.isint(x) and abs(x) < 2 ** 53:
            return str(int(x))
        return to_str(x._mpf_, _digits(bits))


def save_grid(grid: lattice.PowerMapGrid, fh, a_text=None):
    fh.write("# zpower grid\n")
    fh.write(f"version {FORMAT_VERSION}\n")
    fh.write(f"a {a_text if a_text is not None else format_real(grid.a, grid.bits + 64)}\n")
    fh.write(f"N {grid.N}\n")
    fh.write(f"bits {grid.bits}\n")
    for n, m in grid.sites():
        v = grid[n, m]
        fh.write(f"{n} {m} {format_real(v.real, grid.bits)} {format_real(v.imag, grid.bits)}\n")


def load_grid(fh) -> lattice.PowerMapGrid:
    header = {}
    rows = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) == 2:
            header[parts[0]] = parts[1]
        elif len(parts) == 4:
            rows.append(parts)
        else:
            raise ValueError(f"malformed grid line: {line!r}")
    if int(header.get("version", -1)) != FORMAT_VERSION:
        raise ValueError("unsupported grid file version")
    N, bits = int(header["N"]), int(header["bits"])
    if len(rows) != (N + 1) ** 2:
        raise ValueError(f"expected {(N + 1) ** 2} rows, found {len(rows)}")
    vals = [[None] * (N + 1) for _ in range(N + 1)]
    with mp.workprec(bits):
        for n, m, re, im in rows:
            vals[int(n)][int(m)] = mp.mpc(mp.mpf(re), mp.mpf(im))
    with mp.workprec(bits + 64):
        a = real(header["a"])
    return lattice.from_values(a, N, bits, vals)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _sci(x, digits=6):
    return mp.nstr(mp.mpf(x), digits, min_fixed=0, max_fixed=0)


def cmd_evolve(cfg: RunConfig, stdout):
    ctx = cfg.ctx
    with ctx.work():
        grid = lattice.evolve_grid(cfg.a, cfg.N, ctx)
        fh, close = _open_out(cfg.out)
        try:
            save_grid(grid, fh)
        finally:
            if close:
                fh.close()
        print(f"# a={cfg.a} N={cfg.N} bits={cfg.bits}", file=stdout)
        print(f"residual_cross_ratio {_sci(grid.residual_cr)}", file=stdout)
        print(f"residual_constraint {_sci(grid.residual_constraint)}", file=stdout)
    return 0


@dataclass
class Check:
    name: str
    residual: object
    tolerance: float
    detail: str = ""

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    def as_dict(self):
        return {"name": self.name, "residual": _sci(self.residual), "tolerance": f"{self.tolerance:g}",
                "pass": self.passed, "detail": self.detail}


def worst_cross_ratio(grid):
    worst, site = mp.mpf(0), None
    for n in range(grid.N):
        for m in range(grid.N):
            cr = lattice.cross_ratio(grid[n, m], grid[n + 1, m], grid[n + 1, m + 1], grid[n, m + 1])
            d = abs(cr + 1)
            if d > worst:
                worst, site = d, (n, m)
    return worst, site


def worst_constraint(grid):
    worst, site = mp.mpf(0), None
    for n in range(1, grid.N):
        for m in range(1, grid.N):
            d = lattice.constraint_residual(grid.values, n, m, grid.a)
            if d > worst:
                worst, site = d, (n, m)
    return worst, site


LAMBDAS = (mp.mpc("0.7", "-0.3"), mp.mpc(2, 1), mp.mpc("-0.5", "0.1"))


def run_checks(grid: lattice.PowerMapGrid, ctx: PrecisionContext, a_text: str):
    checks = []
    with ctx.work():
        r, s = worst_cross_ratio(grid)
        checks.append(Check("cross_ratio", r, 1e-35, f"worst site {s}"))
        r, s = worst_constraint(grid)
        checks.append(Check("constraint", r, 1e-30, f"worst site {s}"))
        K = min(20, grid.N - 2)
        sites = [(n, m) for n in range(K + 1) for m in range(K + 1)]
        checks.append(Check("det_psi", max(lax.det_psi_error(grid, n, m, l) for n, m in sites for l in LAMBDAS),
                            1e-30, f"n,m <= {K}"))
        checks.append(Check("compatibility",
                            max(lax.check_compatibility(grid, n, m, l) for n, m in sites for l in LAMBDAS),
                            1e-30, f"n,m <= {K}"))
        checks.append(Check("lambda_equation",
                            max(lax.check_lambda_equation(grid, n, m, l) for n, m in sites for l in LAMBDAS),
                            1e-28, f"n,m <= {K}"))
        S = min(16, grid.N)
        worst = mp.mpf(0)
        orth = mp.mpf(0)
        for n in range(S + 1):
            for m in range(S + 1 - n):
                if (n + m) % 2 or n + m == 0:
                    continue
                z = ortho.za_from_polys(n, m, grid.a, ctx)
                worst = max(worst, abs(z / grid[n, m] - 1))
                orth = max(orth, ortho.orthopoly_build(n, m, grid.a, ctx).orthogonality)
        checks.append(Check("orthopoly_vs_recursion", worst, 1e-12, f"even n+m <= {S}"))
        checks.append(Check("orthogonality", orth, 1e-20, f"even n+m <= {S}"))
        mw = mp.mpf(0)
        for n in range(1, 5):
            for m in range(1, 5):
                for s in range(n + m):
                    h = ortho.moment_hypergeometric(s, n, m, grid.a, ctx)
                    ref = ortho.moment_residue(s, n, m, grid.a, ctx)
                    mw = max(mw, abs(h.value - ref) / max(1, abs(ref)))
        checks.append(Check("moments_residue_vs_hypergeometric", mw, 1e-10, "n,m <= 4"))
        viol = 0
        for n, m in ((1, 1), (3, 7), (10, 2)):
            g = asy.GContext(n, m)
            q1 = [mp.mpc(x, y) for x in _lin(0.05, 2, 20) for y in _lin(0.05, 2, 20)]
            q2 = [mp.mpc(-x, y) for x in _lin(0.05, 2, 20) for y in _lin(0.05, 2, 20)]
            viol += asy.jump_modulus_violations(g, q1, q2, ctx)
        checks.append(Check("jump_modulus_violations", mp.mpf(viol), 0, "20x20 per quadrant"))
        a = grid.a
        th = mp.mpf("0.3")
        checks.append(Check("parametrix_jump", max(parametrix.gamma0_jump_residual(mp.mpf(r), a, th, ctx)
                                                   for r in ("0.1", 1, 10)), 1e-20, "theta=0.3"))
        xi = mp.mpc(2, 1)
        h = mp.mpf("1e-10")
        sec = parametrix.auto_sector(xi, th)
        dP = (parametrix.psi0_eval(xi + h, a, sec, ctx) - parametrix.psi0_eval(xi - h, a, sec, ctx)) / (2 * h)
        ode = dP - parametrix.ode_matrix(xi, a) * parametrix.psi0_eval(xi, a, sec, ctx)
        from .numerics import det2, maxnorm
        checks.append(Check("parametrix_ode", maxnorm(ode), 1e-18, "xi=2+i"))
        b0 = parametrix.b0_matrix(a, ctx)
        bm = max(maxnorm(parametrix.b0_from_psi0(mp.mpf("1e-20") * mp.expj(t), a,
                                                 parametrix.SectorSpec(th, s), ctx) - b0)
                 for s, t in (("S1", 0), ("S2", 1), ("S3", 3)))
        checks.append(Check("parametrix_b0_limit", bm, 1e-15, "|xi|=1e-20"))
        dets = [det2(b0)]
        lc = mp.mpf(0)
        for n, m in ((1, 1), (5, 3), (2, 7)):
            dets += [det2(parametrix.p0_hat_zero(a, n, m, ctx)), det2(parametrix.pinf_hat(a, n, m, ctx))]
            lc = max(lc, abs(parametrix.leading_constant(a, n, m, ctx) / asy.predict(n, m, a, ctx) - 1))
        checks.append(Check("parametrix_dets", max(abs(d - mp.mpc(0, 0.5)) for d in dets), 1e-25))
        checks.append(Check("leading_constant", lc, 1e-25))
    return checks


def _lin(lo, hi, k):
    return [mp.mpf(lo) + (mp.mpf(hi) - mp.mpf(lo)) * j / (k - 1) for j in range(k)]


def cmd_verify(cfg: RunConfig, stdout, grid_path=None):
    ctx = cfg.ctx
    with ctx.work():
        if grid_path:
            with open(grid_path, encoding="utf-8") as fh:
                grid = load_grid(fh)
            ctx = grid.ctx
        else:
            grid = lattice.evolve_grid(cfg.a, cfg.N, ctx)
        checks = run_checks(grid, ctx, cfg.a)
    report = {"a": cfg.a if not grid_path else format_real(grid.a, grid.bits),
              "N": grid.N, "bits": grid.bits,
              "checks": [c.as_dict() for c in checks],
              "pass": all(c.passed for c in checks)}
    text = json.dumps(report, indent=1) + "\n"
    fh, close = _open_out(cfg.out)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()
    if close:
        for c in checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name} {_sci(c.residual)} <= {c.tolerance:g} {c.detail}",
                  file=stdout)
    return 0 if report["pass"] else 1


TABLE_COLUMNS = "ray,n,m,r,pred_re,pred_im,actual_re,actual_im,rel_error"
LOGGREEN_COLUMNS = "ray,n,m,r,L_re,L_im,L_err_est,L_dev,L_bound,ell,ell_err_est,ell_dev,ell_bound"
MOMENT_COLUMNS = "s,residue_re,residue_im,hyp_re,hyp_im,hyp_verified"


def _fit(rows_r, rows_e):
    import statistics
    xs = [math.log(float(r)) for r in rows_r]
    ys = [math.log(float(e)) for e in rows_e]
    return statistics.linear_regression(xs, ys).slope


def cmd_table(cfg: RunConfig, stdout):
    ctx = cfg.ctx
    with ctx.work():
        grid = lattice.evolve_grid(cfg.a, cfg.N, ctx)
        fh, close = _open_out(cfg.out)
        try:
            fh.write(f"# a={cfg.a} N={cfg.N} bits={cfg.bits}\n")
            fh.write(TABLE_COLUMNS + "\n")
            fit = {}
            for ray in ("diag", "n2m", "m2n"):
                rs, es = [], []
                for n, m in asy.ray_sites(cfg.N, ray):
                    row = asy.asymptotic_row(grid, n, m, ctx)
                    fh.write(",".join([ray, str(n), str(m), mp.nstr(row.r, 12),
                                       mp.nstr(row.predicted.real, 20), mp.nstr(row.predicted.imag, 20),
                                       mp.nstr(row.actual.real, 20), mp.nstr(row.actual.imag, 20),
                                       _sci(row.rel_error, 8)]) + "\n")
                    if row.r >= 20:
                        rs.append(row.r)
                        es.append(row.rel_error)
                if len(rs) >= 2:
                    fit[ray] = _fit(rs, es)
            fh.write("# slope log(rel_error) vs log(r), r >= 20: "
                     + " ".join(f"{k}={v:.4f}" for k, v in fit.items()) + "\n")
        finally:
            if close:
                fh.close()
    return 0


def loggreen_sites(window, rmin=30, rmax=120):
    out = []
    for ray in ("diag", "n2m", "m2n"):
        for n, m in asy.ray_sites(window - 1, ray):
            r = math.hypot(n, m)
            if (n + m) % 2 == 0 and rmin <= r <= rmax:
                out.append((ray, n, m))
    return out


def cmd_loggreen(cfg: RunConfig, stdout):
    ctx = cfg.ctx
    window = cfg.window or cfg.N
    eps = mp.mpf(cfg.eps)
    with ctx.work():
        fh, close = _open_out(cfg.out)
        try:
            fh.write(f"# N={window} bits={cfg.bits} eps={cfg.eps}\n")
            fh.write(LOGGREEN_COLUMNS + "\n")
            rs, Ld, ld = [], [], []
            worst_L = worst_l = 0.0
            for ray, n, m in loggreen_sites(window):
                r = mp.sqrt(n * n + m * m)
                L = dl.discrete_log_L(n, m, ctx, eps, N=window)
                ell = dl.green_ell(n, m, ctx, eps, N=window)
                Ldev = abs(L.value - dl.L_asymptote(n, m))
                ldev = abs(ell.value - dl.ell_asymptote(n, m))
                Lb = 10 * mp.log(r) / r ** 2
                lb = 10 * mp.log(r) / r
                worst_L = max(worst_L, float(Ldev / Lb))
                worst_l = max(worst_l, float(ldev / lb))
                rs.append(r)
                Ld.append(Ldev)
                ld.append(ldev)
                fh.write(",".join([ray, str(n), str(m), mp.nstr(r, 12),
                                   mp.nstr(L.value.real, 20), mp.nstr(L.value.imag, 20), _sci(L.error),
                                   _sci(Ldev), _sci(Lb), mp.nstr(ell.value, 20), _sci(ell.error),
                                   _sci(ldev), _sci(lb)]) + "\n")
            if len(rs) >= 2:
                fh.write(f"# slope L_dev vs r: {_fit(rs, Ld):.4f}; slope ell_dev vs r: {_fit(rs, ld):.4f}\n")
            fh.write(f"# max dev/bound: L {worst_L:.4f} ell {worst_l:.4f}\n")
        finally:
            if close:
                fh.close()
    return 0


def cmd_pattern(cfg: RunConfig, stdout, scale=100.0):
    ctx = cfg.ctx
    with ctx.work():
        grid = lattice.evolve_grid(cfg.a, cfg.N, ctx)
        pat = cp.extract_pattern(grid)
        data = cp.render_svg(pat, cp.SvgOptions(scale=scale))
    if cfg.out is None or cfg.out == "-":
        stdout.write(data.decode("utf-8"))
    else:
        with open(cfg.out, "wb") as fh:
            fh.write(data)
        print(f"circles {len(pat.circles)} spread {_sci(pat.max_spread)} "
              f"orthogonality {_sci(pat.max_orthogonality)}", file=stdout)
    return 0


def cmd_moments(cfg: RunConfig, stdout, n, m):
    ctx = cfg.ctx
    with ctx.work():
        fh, close = _open_out(cfg.out)
        try:
            fh.write(f"# a={cfg.a} n={n} m={m} bits={cfg.bits}\n")
            fh.write(MOMENT_COLUMNS + "\n")
            for s in range(n + m):
                r = ortho.moment_residue(s, n, m, cfg.a, ctx)
                h = ortho.moment_hypergeometric(s, n, m, cfg.a, ctx)
                fh.write(",".join([str(s), mp.nstr(r.real, 30), mp.nstr(r.imag, 30),
                                   mp.nstr(h.value.real, 30), mp.nstr(h.value.imag, 30),
                                   str(h.verified).lower()]) + "\n")
        finally:
            if close:
                fh.close()
    return 0


def build_parser():
    env_bits = int(os.environ.get(PRECISION_ENV, 256))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", default="1", help="exponent in (0,2); fractions like 2/3 are exact")
    common.add_argument("--n", type=int, default=None, help="grid size N")
    common.add_argument("--bits", type=int, default=env_bits,
                        help=f"mantissa bits (default from ${PRECISION_ENV} or 256)")
    common.add_argument("--tol", type=float, default=None, help="default tolerance")
    common.add_argument("--out", default=None, help="output file ('-' or omitted: stdout)")
    p = argparse.ArgumentParser(prog="zpower", description="Discrete power map Z^a toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("evolve", parents=[common], help="evolve the grid and write a grid file")
    v = sub.add_parser("verify", parents=[common], help="run the identity checks, JSON report")
    v.add_argument("--grid", default=None, help="verify a stored grid file instead of evolving")
    sub.add_parser("table", parents=[common], help="Z^a vs predictor along three rays (CSV)",
                   epilog="columns: " + TABLE_COLUMNS)
    lg = sub.add_parser("loggreen", parents=[common], help="discrete log L and Green's function (CSV)",
                        epilog="columns: " + LOGGREEN_COLUMNS)
    lg.add_argument("--eps", default="1e-12", help="difference step in a")
    lg.add_argument("--window", type=int, default=None, help="grid window (default --n)")
    pt = sub.add_parser("pattern", parents=[common], help="circle pattern as SVG")
    pt.add_argument("--scale", type=float, default=100.0)
    mo = sub.add_parser("moments", parents=[common], help="moments H_s (CSV)",
                        epilog="columns: " + MOMENT_COLUMNS)
    mo.add_argument("--m", type=int, default=None, help="second index (default: same as --n)")
    return p


DEFAULT_N = {"evolve": 20, "verify": 22, "table": 100, "loggreen": 108, "pattern": 10, "moments": 2}


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    N = args.n if args.n is not None else DEFAULT_N[args.cmd]
    tol = args.tol if args.tol is not None else (DEFAULT_TOL if args.bits >= 256 else 2.0 ** (-args.bits / 2))
    try:
        if args.cmd == "moments":
            m = args.m if args.m is not None else N
            cfg = RunConfig(args.a, max(N, 2), args.bits, tol, args.out)
            return cmd_moments(cfg, stdout, N, m)
        cfg = RunConfig(args.a, N, args.bits, tol, args.out,
                        getattr(args, "eps", "1e-12"), getattr(args, "window", None))
        if args.cmd == "evolve":
            return cmd_evolve(cfg, stdout)
        if args.cmd == "verify":
            return cmd_verify(cfg, stdout, args.grid)
        if args.cmd == "table":
            return cmd_table(cfg, stdout)
        if args.cmd == "loggreen":
            return cmd_loggreen(cfg, stdout)
        if args.cmd == "pattern":
            return cmd_pattern(cfg, stdout, args.scale)
    except (ConfigError, lattice.DegenerateError, cp.PatternError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
