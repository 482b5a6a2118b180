"""Command-line interface.

Exit codes: 0 success, 1 solver/numerical failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analysis import ConvergenceRecord
from .demos import demo_2x2, demo_ode
from .errors import InputError, NumericalError
from .problem_io import FORMAT_VERSION, converge_file, solve_file

log = logging.getLogger("parmspec")

EXIT_OK, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2


def _table(records: dict) -> str:
    names = list(records)
    ns = records[names[0]].ns
    head = f"{'n':>4}" + "".join(f"  {name:>24}" for name in names)
    rows = [head]
    for i, n in enumerate(ns):
        cells = []
        for name in names:
            e = records[name].entries[i]
            err = "" if e.true_error_l2 is None else f" / {e.true_error_l2:.3e}"
            cells.append(f"  {e.residual_l2:.3e}{err:>13}".rjust(26))
        rows.append(f"{n:>4}" + "".join(cells))
    return "\n".join(rows)


def _fit_line(name: str, rec: ConvergenceRecord) -> str:
    f = rec.fitted_rate
    if f is None:
        return f"{name}: too few points above round-off to fit a rate"
    return f"{name}: fitted rate {f.rate:.4f} (R^2 = {f.r_squared:.4f}, slope stderr {f.slope_stderr:.2e})"


def _write_records(out_dir, prefix: str, records: dict, extra: dict | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, rec in records.items():
        (out / f"{prefix}_{name}.csv").write_text(rec.to_csv())
    payload = {"format_version": FORMAT_VERSION, **(extra or {})}
    payload["records"] = {k: r.to_dict(timings=False) for k, r in records.items()}
    (out / f"{prefix}.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_solve(args) -> int:
    paths = solve_file(args.input, args.method, args.n, args.out_dir, quad_order=args.quad_order,
                       sample_points=args.sample_points)
    for p in paths.values():
        print(p)
    return EXIT_OK


def cmd_converge(args) -> int:
    records = converge_file(args.input, args.n_min, args.n_max, args.out_dir, quad_order=args.quad_order)
    print(_table(records))
    for name, rec in records.items():
        print(_fit_line(name, rec))
    return EXIT_OK


def cmd_demo2x2(args) -> int:
    for eps in args.eps:
        res = demo_2x2(eps, args.n_max)
        print(f"# eps = {eps:g}   residual / true error")
        print(_table({"pseudospectral": res.record}))
        rf = res.residual_fit.rate if res.residual_fit else float("nan")
        ef = res.error_fit.rate if res.error_fit else float("nan")
        print(f"predicted rate {res.predicted_rate:.4f}, fitted from error {ef:.4f}, from residual {rf:.4f}")
        print(f"max |X_g - X_p| over n: {max(res.galerkin_max_diff):.2e}")
        if args.out_dir:
            _write_records(args.out_dir, f"demo2x2_eps{eps:g}", {"pseudospectral": res.record},
                           {"eps": eps, "predicted_rate": res.predicted_rate,
                            "galerkin_max_diff": res.galerkin_max_diff})
    return EXIT_OK


def cmd_demo_ode(args) -> int:
    for eps in args.eps:
        res = demo_ode(eps, args.elements, args.n_max, args.quad_order, poly_degree=args.poly_degree)
        records = {"galerkin": res.galerkin, "pseudospectral": res.pseudospectral}
        if res.truncated is not None:
            records[f"truncated_d{args.poly_degree}"] = res.truncated
        print(f"# eps = {eps:g}, {args.elements} elements   residual")
        print(_table(records))
        for name, rec in records.items():
            print(_fit_line(name, rec))
        if args.out_dir:
            _write_records(args.out_dir, f"demo_ode_eps{eps:g}", records,
                           {"eps": eps, "elements": args.elements, "poly_degree": args.poly_degree})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parmspec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["pseudospectral", "galerkin"], default="pseudospectral")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--quad-order", type=int, default=None,
                   help="Galerkin quadrature points (default: exact Jacobi route)")
    p.add_argument("--sample-points", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="convergence table for both methods on a problem file")
    p.add_argument("--input", required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--quad-order", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("demo2x2", help="2x2 example convergence study")
    p.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.01, 0.001, 0.0001])
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_demo2x2)

    p = sub.add_parser("demo-ode", help="parameterized FEM example convergence study")
    p.add_argument("--eps", type=float, nargs="+", default=[0.2])
    p.add_argument("--elements", type=int, default=64)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--quad-order", type=int, default=None, help="Galerkin quadrature points (default 2n+10)")
    p.add_argument("--poly-degree", type=int, default=None,
                   help="also run Galerkin on the degree-d interpolant of A")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_demo_ode)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except NumericalError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
