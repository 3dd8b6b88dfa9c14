"""Command line front end.

    threepoint forward COEFFS.json --modes 8 -o spectral.json --csv eigenvalues.csv
    threepoint invert spectral.json -o coeffs.json --report convergence.csv
    threepoint gradcheck --modes 2 --radius 0.05
    threepoint asymptotics --modes 8
    threepoint oracle --modes 6

Exit status: 0 when every invoked check passes, 1 on a numeric failure,
2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from . import forwardmap as fm
from . import inverse as inv
from . import ode
from .coeffs import CoefficientPair, random_direction
from .quadrature import gauss_legendre
from .spectrum import DEFAULT_BALL_RADIUS, NewtonOptions, winding_number

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

NUMERIC_ERRORS = (ArithmeticError, RuntimeError, ode.IntegrationError)


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return f"{x:.17g}"


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=float))


def _ode_tol(args) -> ode.Tolerances:
    if args.tol is None:
        return ode.DEFAULT_TOL
    return ode.Tolerances(rtol=args.tol, atol=args.tol * 1e-2)


def _grid(args):
    return gauss_legendre(args.grid, 8)


def _load_coeffs(path) -> CoefficientPair:
    try:
        return CoefficientPair.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read coefficients from {path}: {exc}") from None


def _write_rows(path, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) if isinstance(v, float) else v for k, v in r.items()})


def _failures(failures: list) -> int:
    _emit({"status": "fail" if failures else "pass", "failures": failures})
    return EXIT_NUMERIC if failures else EXIT_OK


# subcommands


def cmd_forward(args) -> int:
    u = _load_coeffs(args.coeffs)
    newton = NewtonOptions(ball_radius=args.ball_radius)
    data = fm.forward(u, args.modes, _ode_tol(args), newton, args.jobs)
    if args.out:
        data.save(args.out)
    else:
        _emit(data.to_json())
    if args.csv:
        data.write_eigenvalue_csv(args.csv)
    if args.diagnostics:
        rows = [{"n": n, "disc_margin": r.disc_margin, "newton_iters": r.newton_iters,
                 "winding": winding_number(u, n, tol=_ode_tol(args))} for n, r in sorted(data.records.items())]
        _emit({"diagnostics": rows, "linear_residual": fm.linear_residual(u, args.modes, data).total})
    return EXIT_OK


def cmd_invert(args) -> int:
    try:
        data = fm.SpectralData.load(args.spectral)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read spectral data from {args.spectral}: {exc}") from None
    report = inv.invert(data, args.mode, args.tol if args.tol is not None else 1e-10, args.max_iters,
                        args.ball_radius, grid=_grid(args), jobs=args.jobs)
    if args.out:
        report.final_u.save(args.out)
    if args.report:
        report.write_csv(args.report)
    summary = {"converged": report.converged, "iterations": report.iterations,
               "final_residual": float(report.residual_history[-1]) if report.residual_history.size else None,
               "ball_violations": report.ball_violations, "message": report.message}
    if not args.out:
        summary["coefficients"] = report.final_u.to_json()
    if args.truth:
        summary["coefficient_error"] = inv.coefficient_error(report.final_u, _load_coeffs(args.truth))
    _emit(summary)
    return EXIT_OK if report.converged else EXIT_NUMERIC


def _pair_for(args) -> CoefficientPair:
    if args.coeffs:
        return _load_coeffs(args.coeffs)
    return args.radius * random_direction(max(args.modes, 8), args.seed)


def cmd_gradcheck(args) -> int:
    u = _pair_for(args)
    modes = [m for n in range(1, args.modes + 1) for m in (n, -n)]
    dirs = dg.random_directions(u.N, args.directions, args.seed + 1000)
    rows = dg.gradient_check(u, modes, dirs, step=args.step, grid=_grid(args), tol=_ode_tol(args))
    if args.out:
        _write_rows(args.out, rows)
    worst = {}
    for r in rows:
        worst[r["quantity"]] = max(worst.get(r["quantity"], 0.0), r["rel_error"])
    for q, e in worst.items():
        print(f"{q:10s} max rel error {_fmt(e)}", file=sys.stderr)
    bad = [r for r in rows if not r["rel_error"] <= args.threshold]
    return _failures(bad)


def cmd_asymptotics(args) -> int:
    u0 = random_direction(args.modes, args.seed)
    tol = _ode_tol(args)
    sweep = dg.epsilon_sweep(u0, args.modes, tol=tol)
    ratios = np.array([r["ratio"] for r in sweep])
    spread = float(ratios.max() / ratios.min() - 1)
    C, per_mode = dg.decay_constant(args.radius * u0, args.modes, tol=tol)
    grads = dg.gradient_asymptotic_constants(0.5 * args.radius * u0, args.modes, _grid(args), tol)
    report = {"epsilon_sweep": sweep, "ratio_spread": spread, "decay_constant": C,
              "decay_per_mode": {str(n): v for n, v in per_mode.items()}, "gradient_constants": grads}
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    else:
        _emit(report)
    failures = []
    if not spread <= args.spread:
        failures.append({"check": "quadratic residual spread", "value": spread, "threshold": args.spread})
    if not np.isfinite(C):
        failures.append({"check": "decay constant", "value": C})
    return _failures(failures)


def cmd_oracle(args) -> int:
    worst = dg.oracle_deviations(args.modes, _grid(args), _ode_tol(args))
    for k, v in worst.items():
        print(f"{k:24s} {_fmt(v)}", file=sys.stderr)
    return _failures([{"check": k, "deviation": v} for k, v in worst.items() if not v <= args.threshold])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="threepoint", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, modes=8):
        sp.add_argument("--modes", type=int, default=modes, help="largest |n| (N)")
        sp.add_argument("--tol", type=float, default=None, help="integration rtol (residual tol for invert)")
        sp.add_argument("--ball-radius", type=float, default=DEFAULT_BALL_RADIUS)
        sp.add_argument("--grid", type=int, default=32, help="Gauss-Legendre panels (8 nodes each)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--diagnostics", action="store_true")

    f = sub.add_parser("forward", help="spectral data of a coefficient file")
    f.add_argument("coeffs")
    f.add_argument("-o", "--out")
    f.add_argument("--csv", help="eigenvalue table")
    common(f)
    f.set_defaults(func=cmd_forward)

    i = sub.add_parser("invert", help="coefficients from spectral data")
    i.add_argument("spectral")
    i.add_argument("-o", "--out")
    i.add_argument("--report", help="convergence CSV")
    i.add_argument("--mode", choices=("quasi", "full"), default="quasi")
    i.add_argument("--max-iters", type=int, default=50)
    i.add_argument("--truth", help="coefficient file to compare against")
    common(i)
    i.set_defaults(func=cmd_invert)

    g = sub.add_parser("gradcheck", help="analytic gradients against finite differences")
    g.add_argument("--coeffs")
    g.add_argument("--radius", type=float, default=0.05)
    g.add_argument("--directions", type=int, default=3)
    g.add_argument("--step", type=float, default=1e-2)
    g.add_argument("--threshold", type=float, default=1e-4)
    g.add_argument("-o", "--out", help="CSV of all comparisons")
    common(g, modes=2)
    g.set_defaults(func=cmd_gradcheck)

    a = sub.add_parser("asymptotics", help="fitted constants of the linearisation residuals")
    a.add_argument("--radius", type=float, default=0.1)
    a.add_argument("--spread", type=float, default=0.25)
    a.add_argument("-o", "--out")
    common(a)
    a.set_defaults(func=cmd_asymptotics)

    o = sub.add_parser("oracle", help="closed forms at zero coefficients")
    o.add_argument("--threshold", type=float, default=1e-8)
    common(o, modes=6)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.modes < 1:
        parser.error("--modes must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
