"""Command-line interface: eigenvalue tables, normal forms, densities,
kernel synthesis/reconstruction, transform-kernel slices, verification.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 domain
error (inputs outside an operation's mathematical domain).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import abelian, se2, verify
from .grids import KernelGrid
from .mathieu import (
    AmbiguousZeroError,
    ParityClass,
    SpectralBranch,
    TruncationError,
    asymptotic_profile,
    dlambda_dq,
    solve_branch,
)
from .multipliers import parse_named

USAGE_ERROR = 2
DOMAIN_ERROR = 3


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def _emit_table(header: list[str], rows: list[list[float]], out: str | None, fmt: str) -> None:
    if fmt == "json":
        payload = {"columns": header, "rows": [[float(v) for v in row] for row in rows]}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_class(s: str) -> ParityClass:
    try:
        return ParityClass.from_string(s)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_grid_spec(s: str) -> np.ndarray:
    parts = s.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be a:b:n, got {s!r}")
    a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1 or b < a:
        raise UsageError(f"empty grid {s!r}")
    return np.linspace(a, b, n)


def _threads() -> int:
    raw = os.environ.get("SUBSPEC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _threads()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_mathieu(args) -> int:
    pc = _parse_class(args.parity_class)
    if args.action == "eig":
        pairs = solve_branch(args.q, pc, args.kmax)
        rows = [[float(k), p.lam, dlambda_dq(p)] for k, p in enumerate(pairs)]
        _emit_table(["k", "lambda", "dlambda_dq"], rows, args.out, args.format)
        return 0
    qs = _parse_grid_spec(args.q_grid)
    branch = SpectralBranch(pc, args.k)
    rows_nested = _map_ordered(
        lambda q: asymptotic_profile(branch, [float(q)])[0], list(qs)
    )
    rows = [[q, r1, r2] for (q, r1, r2) in rows_nested]
    _emit_table(["q", "lambda_over_sqrt_q", "q_dlambda_over_lambda"], rows, args.out, args.format)
    return 0


def _read_generators(path: str) -> list[tuple[float, float, float]]:
    gens = []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("a,"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise UsageError(f"generator rows need three fields a,b,c: {line!r}")
            gens.append((float(parts[0]), float(parts[1]), float(parts[2])))
    if not gens:
        raise UsageError(f"no generators found in {path}")
    return gens


def cmd_se2(args) -> int:
    if args.action == "normal-form":
        nf = se2.normalize_sublaplacian(_read_generators(args.gens))
        if nf.kind == "generic":
            sys.stdout.write(f"Generic alpha={_fmt(nf.alpha)} beta={_fmt(nf.beta)}\n")
        else:
            sys.stdout.write(f"Elliptic alpha={_fmt(nf.alpha)}\n")
        return 0
    if args.action == "density":
        if args.lam is None and args.lambda_grid is None:
            raise UsageError("density needs --lambda or --lambda-grid")
        lams = [args.lam] if args.lam is not None else list(_parse_grid_spec(args.lambda_grid))
        dens = _map_ordered(lambda l: se2.plancherel_density(float(l), args.beta), lams)
        counts = [len(se2.contributing_branches(float(l), args.beta)) for l in lams]
        rows = [[l, d, float(c)] for l, d, c in zip(lams, dens, counts)]
        _emit_table(["lambda", "density", "contributing_branches"], rows, args.out, args.format)
        return 0
    if args.action == "kernel":
        F = parse_named(args.multiplier)
        form = se2.SE2NormalForm(kind="generic", alpha=1.0, beta=args.beta)
        grid = se2.GridSpec(radius=args.radius, step=args.step, n_theta=args.ntheta)
        kern = se2.synthesize_kernel(F, form, grid)
        kern.write_csv(args.out)
        sys.stdout.write(f"wrote {args.out} ({kern.x.size}x{kern.y.size}x{kern.theta.size})\n")
        return 0
    # reconstruct
    kern = KernelGrid.read_csv(args.kernel)
    r_list = [float(s) for s in args.r_list.split(",") if s]
    if not r_list:
        raise UsageError("empty --r-list")
    rows = [[r, lam, fh] for r, (lam, fh) in zip(r_list, se2.multiplier_reconstruct(kern, r_list, args.beta))]
    _emit_table(["r", "lambda", "F_hat"], rows, args.out, args.format)
    return 0


def cmd_abelian(args) -> int:
    if args.action == "chi":
        val = abelian.chi_rt(args.lam, args.x, args.y)
        sys.stdout.write(f"{_fmt(val)}\n")
        return 0
    if args.action == "chi-slice":
        lams = _parse_grid_spec(args.lambda_grid)
        samples = abelian.chi_rt_samples(lams, args.x, args.y)
        rows = [[s.lam, s.point[0], s.point[1], s.value] for s in samples]
        _emit_table(["lambda", "x", "y", "value"], rows, args.out, args.format)
        return 0
    if args.action == "chi-limits":
        eps_list = [float(s) for s in args.eps.split(",") if s]
        ys = np.arange(args.ny) * (2.0 * math.pi / args.ny)
        rows = []
        for y in ys:
            row = [float(y), abelian.chi_rt_left(args.h, args.x, float(y)),
                   abelian.chi_rt_right(args.h, args.x, float(y))]
            for eps in eps_list:
                row.append(abelian.chi_rt(args.h * args.h - eps, args.x, float(y)))
                row.append(abelian.chi_rt(args.h * args.h + eps, args.x, float(y)))
            rows.append(row)
        header = ["y", "left_limit", "right_limit"]
        for eps in eps_list:
            header += [f"chi_below_eps={eps:g}", f"chi_above_eps={eps:g}"]
        _emit_table(header, rows, args.out, args.format)
        return 0
    # kernel
    F = parse_named(args.multiplier)
    if args.m == 0:
        spec = abelian.AbelianSpec(args.n, 0)
    else:
        a = np.eye(args.m) if args.a_diag is None else np.diag(
            [float(s) for s in args.a_diag.split(",")]
        )
        spec = abelian.AbelianSpec(args.n, args.m, a)
    kern = abelian.kernel_synthesize(
        F, spec, abelian.BoxGridSpec(radius=args.radius, step=args.step, n_y=args.ny)
    )
    kern.write_csv(args.out)
    sys.stdout.write(f"wrote {args.out}\n")
    return 0


def cmd_verify(args) -> int:
    results = verify.run_suite(args.suite)
    for r in results:
        sys.stdout.write(r.line() + "\n")
    report = verify.report_dict(results, args.suite)
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    sys.stdout.write(f"report written to {args.report}\n")
    return 0 if report["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subspec", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("mathieu", help="eigenvalue tables for the circle operator")
    sm = pm.add_subparsers(dest="action", required=True)
    eig = sm.add_parser("eig", help="eigenvalues and q-derivatives at one q")
    eig.add_argument("--q", type=float, required=True)
    eig.add_argument("--class", dest="parity_class", required=True, metavar="IJ")
    eig.add_argument("--kmax", type=int, default=0)
    scan = sm.add_parser("scan", help="large-q profile along one branch")
    scan.add_argument("--class", dest="parity_class", required=True, metavar="IJ")
    scan.add_argument("--k", type=int, default=0)
    scan.add_argument("--q-grid", dest="q_grid", required=True, metavar="A:B:N")
    for sp in (eig, scan):
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    ps = sub.add_parser("se2", help="motion-group sub-Laplacian calculus")
    ss = ps.add_subparsers(dest="action", required=True)
    nf = ss.add_parser("normal-form", help="classify a generator list")
    nf.add_argument("--gens", required=True, help="CSV file of rows a,b,c")
    dens = ss.add_parser("density", help="spectral Plancherel density")
    dens.add_argument("--beta", type=float, required=True)
    dens.add_argument("--lambda", dest="lam", type=float, default=None)
    dens.add_argument("--lambda-grid", dest="lambda_grid", default=None, metavar="A:B:N")
    kern = ss.add_parser("kernel", help="synthesize a convolution kernel grid")
    kern.add_argument("--multiplier", required=True, help="gaussian:T | bump:A:B | table:PATH")
    kern.add_argument("--beta", type=float, required=True)
    kern.add_argument("--radius", type=float, default=8.0)
    kern.add_argument("--step", type=float, default=0.26)
    kern.add_argument("--ntheta", type=int, default=48)
    kern.add_argument("--out", required=True)
    rec = ss.add_parser("reconstruct", help="recover multiplier values from a kernel grid")
    rec.add_argument("--kernel", required=True)
    rec.add_argument("--r-list", dest="r_list", required=True, metavar="R1,R2,...")
    rec.add_argument("--beta", type=float, required=True)
    for sp in (nf, dens, rec):
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    pa = sub.add_parser("abelian", help="kernel transform on R^n x T^m")
    sa = pa.add_subparsers(dest="action", required=True)
    chi = sa.add_parser("chi", help="transform kernel of R x T at one point")
    chi.add_argument("--lambda", dest="lam", type=float, required=True)
    chi.add_argument("--x", type=float, required=True)
    chi.add_argument("--y", type=float, required=True)
    slc = sa.add_parser("chi-slice", help="chi on a lambda grid at a fixed point")
    slc.add_argument("--lambda-grid", dest="lambda_grid", required=True, metavar="A:B:N")
    slc.add_argument("--x", type=float, required=True)
    slc.add_argument("--y", type=float, required=True)
    lim = sa.add_parser("chi-limits", help="one-sided limit tables at lambda = h^2")
    lim.add_argument("--h", type=int, required=True)
    lim.add_argument("--x", type=float, default=0.0)
    lim.add_argument("--eps", default="1e-4", metavar="E1,E2,...")
    lim.add_argument("--ny", type=int, default=64)
    akern = sa.add_parser("kernel", help="synthesize an abelian kernel grid")
    akern.add_argument("--multiplier", required=True)
    akern.add_argument("--n", type=int, required=True)
    akern.add_argument("--m", type=int, required=True)
    akern.add_argument("--a-diag", dest="a_diag", default=None, metavar="D1,...")
    akern.add_argument("--radius", type=float, default=12.0)
    akern.add_argument("--step", type=float, default=0.05)
    akern.add_argument("--ny", type=int, default=32)
    akern.add_argument("--out", required=True)
    for sp in (lim, slc):
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    pv = sub.add_parser("verify", help="run the acceptance checks")
    pv.add_argument("--suite", choices=("all", "mathieu", "se2", "abelian"), default="all")
    pv.add_argument("--report", default="subspec_verify_report.json")

    return p


_DOMAIN_ERRORS = (
    se2.NotASubLaplacian,
    abelian.DiscreteSpectrumError,
    TruncationError,
    AmbiguousZeroError,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "mathieu": cmd_mathieu,
        "se2": cmd_se2,
        "abelian": cmd_abelian,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return USAGE_ERROR
    except _DOMAIN_ERRORS as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return DOMAIN_ERROR
    except ValueError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
