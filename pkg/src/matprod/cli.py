"""Command-line surface: sampling, density evaluation, kernel grids,
verification suites, and crystallization, with CSV output plus a JSON sidecar.

CSV carries one header row and 17-significant-digit values; the sidecar
(schema "matprod/1") records the full parameter set, seed and build string so
every artifact is reproducible byte for byte from its sidecar.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import subprocess
import sys

import numpy as np

from . import __version__, crystal, density, haar, pfaffian, sampler
from .core import ChainParams, ConstraintError, DegenerateConfigError, \
    validate_chain_params

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

SCHEMA = "matprod/1"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _build_string() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"matprod-{__version__}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_sidecar(path: str, command: str, params: dict, extra: dict | None = None) -> None:
    doc = {"schema": SCHEMA, "command": command, "params": params,
           "build": _build_string()}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _parse_int_list(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v != "")


def _parse_float_list(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v != "")


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("MATPROD_THREADS", "1")))
    except ValueError:
        return 1


def _chain_params(args) -> ChainParams:
    m = _parse_int_list(args.m)
    nu = (0,) + _parse_int_list(args.nu)
    params = ChainParams(theta=args.theta, n=args.n, p=args.p, m=m, nu=nu)
    validate_chain_params(params)
    return params


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    params = _chain_params(args)
    count = args.count
    threads = _thread_count()
    if args.mode == "matrix":
        def draw(stream: int, size: int) -> np.ndarray:
            return haar.sample_product_chains(
                params, size, haar.RngState(args.seed, stream))
    else:
        settings = sampler.GibbsSettings(sweeps=args.sweeps, burn_in=args.burn_in,
                                         grid=args.grid)

        def draw(stream: int, size: int) -> np.ndarray:
            st = sampler.GibbsSettings(sweeps=args.sweeps, burn_in=args.burn_in,
                                       grid=args.grid,
                                       rng=haar.RngState(args.seed, stream))
            return sampler.sample_chain_beta(params, args.x1, st, size=size)
    if threads == 1:
        traj = draw(0, count)
    else:
        sizes = [count // threads + (1 if i < count % threads else 0)
                 for i in range(threads)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(draw, range(threads), sizes))
        traj = np.concatenate(parts, axis=0)
    header = [f"x_{k + 1}_{i + 1}" for k in range(params.p) for i in range(params.n)]
    rows = traj.reshape(count, params.p * params.n)
    _write_csv(args.out + ".csv", header, rows)
    _write_sidecar(args.out + ".meta.json", "sample",
                   {"mode": args.mode, "theta": args.theta, "n": args.n,
                    "p": args.p, "m": list(params.m), "nu": list(params.nu),
                    "count": count, "seed": args.seed,
                    "sweeps": args.sweeps, "burn_in": args.burn_in,
                    "grid": args.grid, "x1": args.x1, "threads": threads})
    return EXIT_OK


def _density_eval(args, points: np.ndarray) -> np.ndarray:
    theta, n = args.theta, args.n
    if args.formula == "jacobi":
        jp = density.JacobiParams(n=n, m=args.m_single, nu=args.nu_single, theta=theta)
        return np.array([density.jacobi_log_density(pt, jp) for pt in points])
    if args.formula == "kernel":
        kp = density.KernelParams(n=n, nu=args.nu_single, theta=theta)
        x = np.asarray(_parse_float_list(args.x))
        return np.array([density.kernel_log_density(pt, x, kp) for pt in points])
    params = _chain_params(args)
    if args.formula == "process":
        return np.array([density.process_log_density(
            pt.reshape(params.p, params.n), params) for pt in points])
    if args.formula == "integral":
        return np.array([density.product_log_density_integral(pt, params)
                         for pt in points])
    if args.formula == "jack":
        data = density.build_mu(params)
        return np.array([density.product_log_density_jack(pt, data) for pt in points])
    if args.formula == "twoproduct":
        if params.p != 2 or theta != 2.0:
            raise ConstraintError("twoproduct formula requires theta=2 and p=2")
        tp = pfaffian.TwoProductParams(n=n, nu1=params.nu[1], nu2=params.nu[2],
                                       m1=params.m[0])
        return np.array([pfaffian.two_product_log_density(pt, tp) for pt in points])
    raise ConstraintError(f"unknown formula {args.formula!r}")


def cmd_density(args) -> int:
    if args.points:
        points = np.array([_parse_float_list(row)
                           for row in args.points.split(";") if row])
    elif args.grid_points:
        if args.formula == "process":
            raise ConstraintError("process formula needs explicit --points")
        dim = args.n
        if dim != 1:
            raise ConstraintError("--grid only supports n=1; use --points")
        g = np.arange(1, args.grid_points + 1) / (args.grid_points + 1.0)
        points = g[:, None]
    else:
        raise ConstraintError("provide --grid or --points")
    vals = _density_eval(args, points)
    header = [f"x_{i + 1}" for i in range(points.shape[1])] + ["logdensity"]
    rows = np.column_stack([points, vals])
    _write_csv(args.out + ".csv", header, rows)
    _write_sidecar(args.out + ".meta.json", "density",
                   {"formula": args.formula, "theta": args.theta, "n": args.n,
                    "p": args.p, "m": args.m, "nu": args.nu,
                    "m_single": args.m_single, "nu_single": args.nu_single,
                    "x": args.x, "grid": args.grid_points})
    return EXIT_OK


def cmd_kernel(args) -> int:
    tp = pfaffian.TwoProductParams(n=args.n, nu1=args.nu1, nu2=args.nu2, m1=args.m1)
    ker = pfaffian.kernel_assemble(tp)
    g = np.arange(1, args.grid_points + 1) / (args.grid_points + 1.0)
    rho1 = ker.rho1(g)
    rho2 = ker.rho2(g, g)
    entries = ker.entries(g, g)
    header = ["x", "y", "rho2", "K11", "K12", "K21", "K22"]
    rows = []
    for i, xi in enumerate(g):
        for j, yj in enumerate(g):
            rows.append([xi, yj, rho2[i, j], entries["K11"][i, j],
                         entries["K12"][i, j], entries["K21"][i, j],
                         entries["K22"][i, j]])
    _write_csv(args.out + ".csv", header, rows)
    _write_csv(args.out + ".rho1.csv", ["x", "rho1"], np.column_stack([g, rho1]))
    _write_sidecar(args.out + ".meta.json", "kernel",
                   {"n": args.n, "nu1": args.nu1, "nu2": args.nu2, "m1": args.m1,
                    "grid": args.grid_points},
                   extra={"C": ker.c_matrix, "Q": ker.q_product})
    return EXIT_OK


def cmd_crystallize(args) -> int:
    nus = _parse_int_list(args.nu)
    if args.x1:
        x1 = np.asarray(_parse_float_list(args.x1))
    else:
        m, nu0 = _parse_int_list(args.jacobi_start)
        x1 = crystal.jacobi_crystal(args.n, m, nu0)
    chain = crystal.crystal_chain(x1, nus)
    field = crystal.gauss_field(chain) if chain.p >= 2 else None
    header = [f"x_{k + 1}_{i + 1}" for k in range(chain.p) for i in range(args.n)]
    rows = [np.concatenate(chain.configs)]
    _write_csv(args.out + ".csv", header, rows)
    extra = {}
    if field is not None:
        extra = {"precision": field.precision, "covariance": field.covariance}
    _write_sidecar(args.out + ".meta.json", "crystallize",
                   {"n": args.n, "p": chain.p, "nu": list(nus),
                    "x1": args.x1, "jacobi_start": args.jacobi_start}, extra=extra)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def _suite_moments(samples: int, seed: int) -> bool:
    from .jack import jack_eval_many, jack_moment, jack_principal
    ok = True
    for theta in (0.5, 1.0, 2.0):
        params = ChainParams(theta=theta, n=2, p=2, m=(6, 4), nu=(0, 1, 1))
        traj = haar.sample_product_chains(params, samples, haar.RngState(seed))
        final = traj[:, -1, :]
        for kappa in ((1,), (2,), (1, 1)):
            vals = jack_eval_many(kappa, final, theta) / jack_principal(kappa, 2, theta)
            want = jack_moment(kappa, params)
            se = vals.std() / np.sqrt(samples)
            dev = abs(vals.mean() - want) / se
            ok &= _report(f"moment theta={theta} kappa={kappa}", dev <= 3.0,
                          f"dev={dev:.2f} SE")
    return ok


def _suite_dixon() -> bool:
    ok = True
    cases = [
        (np.array([0.2, 0.9]), np.array([1.5, 2.0]), np.array([-1.0]),
         np.array([2.5, 1.0])),
        (np.array([0.1, 0.55, 1.0]), np.array([0.8, 1.2, 2.0]),
         np.array([-0.7]), np.array([3.0, 1.0])),
    ]
    for a, alpha, b, beta in cases:
        lhs, rhs = density.dixon_check(a, alpha, b, beta)
        rel = abs(lhs - rhs) / abs(lhs)
        ok &= _report(f"dixon n={a.size - 1} m={b.size}", rel <= 1e-5,
                      f"rel={rel:.2e}")
    return ok


def _suite_normalization() -> bool:
    import math

    from ._quad import log_integral_simplex2, weighted_nodes_01
    ok = True
    jp = density.JacobiParams(n=2, m=6, nu=1, theta=0.5)
    th = jp.theta
    p = th * (jp.nu + 1) - 1
    q = th * (jp.m - 2 * jp.n - jp.nu + 1) - 1

    def logf(x1, x2):
        out = np.empty_like(x1)
        for i, (a, b) in enumerate(zip(x1, x2)):
            out[i] = density.jacobi_log_density(np.array([a, b]), jp)
        return out

    val = math.exp(log_integral_simplex2(logf, p, q, 2 * th, npts=32, panels=12))
    ok &= _report("jacobi n=2 normalization", abs(val - 1) <= 1e-6,
                  f"integral={val:.8f}")
    tp = pfaffian.TwoProductParams(n=1, nu1=0, nu2=1, m1=4)
    u, w = weighted_nodes_01(2.0 * (tp.nu1 + 1) - 1, 0.0, 48, 16)
    dens = np.array([math.exp(pfaffian.two_product_log_density([ui], tp)
                              - (2.0 * (tp.nu1 + 1) - 1) * math.log(ui)) for ui in u])
    val = float(np.dot(w, dens))
    ok &= _report("twoproduct n=1 normalization", abs(val - 1) <= 1e-4,
                  f"integral={val:.8f}")
    return ok


def _suite_hankel() -> bool:
    ok = True
    for n2 in (2, 4, 6, 8):
        worst = 0.0
        for a in (1, 3, 11):
            for b in (1, 5, 11):
                worst = max(worst, pfaffian.hankel_qc_residual(n2 // 2, a, b))
        ok &= _report(f"hankel 2n={n2}", worst <= 1e-8, f"max resid={worst:.2e}")
    return ok


def _suite_pfaffian() -> bool:
    ok = True
    tp = pfaffian.TwoProductParams(n=2, nu1=0, nu2=1, m1=6)
    ker = pfaffian.kernel_assemble(tp)
    g = np.linspace(0.05, 0.95, 12)
    e1 = ker.entries(g, g, form="sum")
    e2 = ker.entries(g, g, form="skew")
    rel = max(np.max(np.abs(e1[k] - e2[k])) / np.max(np.abs(e1[k])) for k in e1)
    ok &= _report("kernel forms agree", rel <= 1e-6, f"rel={rel:.2e}")
    from ._quad import weighted_nodes_01
    u, w = weighted_nodes_01(0.0, 0.0, 48, 16)
    tot = float(np.dot(w, ker.rho1(u)))
    ok &= _report("int rho1 = n", abs(tot - tp.n) <= 1e-3, f"integral={tot:.6f}")
    rng = np.random.default_rng(0)
    b = rng.standard_normal((6, 6))
    amat = b - b.T
    pf = pfaffian.pfaffian(amat)
    rel = abs(pf ** 2 - np.linalg.det(amat)) / abs(np.linalg.det(amat))
    ok &= _report("pfaffian^2 = det", rel <= 1e-10, f"rel={rel:.2e}")
    return ok


def _suite_crystal() -> bool:
    ok = True
    rng = np.random.default_rng(5)
    worst = 0.0
    for n in (2, 3, 4):
        for _ in range(20):
            x = np.sort(rng.uniform(0.05, 0.95, n))
            if np.min(np.diff(x)) < 0.02:
                continue
            nu = int(rng.integers(0, 4))
            worst = max(worst, float(np.max(np.abs(
                crystal.crystal_step(x, nu) - crystal.argmax_solver(x, nu)))))
    ok &= _report("lemma equivalence", worst <= 1e-10, f"max dev={worst:.2e}")
    got = crystal.jacobi_crystal(1, 7, 2)[0]
    ok &= _report("jacobi crystal n=1", abs(got - 3 / 7) <= 1e-12,
                  f"x={got:.12f} vs 3/7")
    return ok


SUITES = {"moments": lambda args: _suite_moments(args.samples, args.seed),
          "dixon": lambda args: _suite_dixon(),
          "normalization": lambda args: _suite_normalization(),
          "hankel": lambda args: _suite_hankel(),
          "pfaffian": lambda args: _suite_pfaffian(),
          "crystal": lambda args: _suite_crystal()}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    all_ok = True
    for name in names:
        all_ok &= SUITES[name](args)
    print("verify:", "PASS" if all_ok else "FAIL")
    return EXIT_OK if all_ok else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matprod",
        description="Squared singular values of products of truncated Haar "
                    "matrices: samplers, densities, kernels, verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sample", help="draw product-chain trajectories")
    ps.add_argument("--mode", choices=("matrix", "gibbs"), default="matrix")
    ps.add_argument("--theta", type=float, required=True)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--p", type=int, required=True)
    ps.add_argument("--m", required=True, help="comma list m_1..m_p")
    ps.add_argument("--nu", required=True, help="comma list nu_1..nu_p")
    ps.add_argument("--count", type=int, default=1000)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--sweeps", type=int, default=10)
    ps.add_argument("--burn-in", dest="burn_in", type=int, default=200)
    ps.add_argument("--grid", type=int, default=96)
    ps.add_argument("--x1", default="jacobi",
                    help='"jacobi" or comma list for a deterministic start')
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_sample)

    pd = sub.add_parser("density", help="evaluate a log density on points")
    pd.add_argument("--formula", required=True,
                    choices=("jacobi", "kernel", "process", "integral", "jack",
                             "twoproduct"))
    pd.add_argument("--theta", type=float, required=True)
    pd.add_argument("--n", type=int, required=True)
    pd.add_argument("--p", type=int, default=1)
    pd.add_argument("--m", default="", help="comma list m_1..m_p (chain formulas)")
    pd.add_argument("--nu", default="", help="comma list nu_1..nu_p (chain formulas)")
    pd.add_argument("--m-single", type=int, default=0, help="m (jacobi formula)")
    pd.add_argument("--nu-single", type=int, default=0,
                    help="nu (jacobi/kernel formulas)")
    pd.add_argument("--x", default="", help="source config (kernel formula)")
    pd.add_argument("--grid", dest="grid_points", type=int, default=0)
    pd.add_argument("--points", default="",
                    help='semicolon-separated comma rows, e.g. "0.1,0.4;0.2,0.6"')
    pd.add_argument("--out", required=True)
    pd.set_defaults(func=cmd_density)

    pk = sub.add_parser("kernel", help="emit the two-product correlation kernel")
    pk.add_argument("--n", type=int, required=True)
    pk.add_argument("--nu1", type=int, required=True)
    pk.add_argument("--nu2", type=int, required=True)
    pk.add_argument("--m1", type=int, required=True)
    pk.add_argument("--grid", dest="grid_points", type=int, default=32)
    pk.add_argument("--out", required=True)
    pk.set_defaults(func=cmd_kernel)

    pv = sub.add_parser("verify", help="run verification suites")
    pv.add_argument("--suite", default="all",
                    choices=tuple(SUITES) + ("all",))
    pv.add_argument("--samples", type=int, default=20000)
    pv.add_argument("--seed", type=int, default=0)
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("crystallize", help="beta=infinity chain and Gauss field")
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--nu", required=True, help="comma list nu_2..nu_p")
    pc.add_argument("--x1", default="", help="comma list initial config")
    pc.add_argument("--jacobi-start", dest="jacobi_start", default="",
                    help='"m,nu" to start from the Jacobi crystal')
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=cmd_crystallize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConstraintError, DegenerateConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
