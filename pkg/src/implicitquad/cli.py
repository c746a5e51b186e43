"""``quad`` command line: single runs, convergence studies, builtins, oracles."""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .errors import QuadError


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _add_problem_args(p):
    p.add_argument("--dim", type=int, choices=(2, 3), required=True)
    p.add_argument("--mode", choices=harness.MODES, required=True)
    p.add_argument("--levelset", required=True, help="expression for F; the region is F <= 0")
    p.add_argument("--integrand", default="1")
    p.add_argument("--box", type=_floats, required=True, help='"x0,x1,y0,y1[,z0,z1]"')
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--c", type=float, default=0.25)
    p.add_argument("--exact", type=float, default=None)


def _add_output_args(p):
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="quad", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate once")
    _add_problem_args(p)
    p.add_argument("--n", type=int, required=True)
    _add_output_args(p)

    p = sub.add_parser("convergence", help="refinement study over several n")
    _add_problem_args(p)
    p.add_argument("--n-list", type=_ints, required=True)
    _add_output_args(p)

    p = sub.add_parser("builtin", help="refinement study for a builtin test")
    p.add_argument("id")
    p.add_argument("--n-list", type=_ints, default=None)
    p.add_argument("--q", type=int, default=None)
    _add_output_args(p)

    p = sub.add_parser("oracle", help="recompute a builtin's reference value")
    p.add_argument("id")

    sub.add_parser("list", help="list builtin tests")
    return parser


def _config(args, n):
    return harness.RunConfig(dim=args.dim, mode=args.mode, levelset=args.levelset, integrand=args.integrand,
                             box=tuple(args.box), n=n, q=args.q, c=args.c, exact=args.exact)


def _write_report(report, args):
    if args.out:
        harness.emit(report, args.format, args.out)
    elif args.format == "json":
        sys.stdout.write(harness.report_json(report))
    else:
        sys.stdout.write(harness.report_csv(report))
    median = report.median_order()
    if median is not None:
        print(f"median observed order: {median:.3f}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            result = harness.run(_config(args, args.n))
            if args.out:
                report = harness.ConvergenceReport(
                    [harness.ConvergenceRow(args.n, result.h, args.q, result.value, result.error, None)],
                    args.exact)
                harness.emit(report, args.format, args.out)
            print(json.dumps(result.to_dict(), indent=2))
        elif args.command == "convergence":
            report = harness.convergence(_config(args, args.n_list[0] if args.n_list else 1), args.n_list)
            _write_report(report, args)
        elif args.command == "builtin":
            config = harness.builtin_config(args.id, q=args.q)
            n_list = args.n_list or harness.builtin_n_list(args.id)
            _write_report(harness.convergence(config, n_list), args)
        elif args.command == "oracle":
            entry = harness.load_builtins()[args.id]
            value = harness.run_oracle(args.id)
            stored = float(entry["oracle"]["value"])
            print(json.dumps({"id": args.id, "value": value, "stored": stored,
                              "difference": value - stored}, indent=2))
        elif args.command == "list":
            for test_id, entry in harness.load_builtins().items():
                print(f"{test_id:20s} {entry['mode']:8s} F = {entry['levelset']}, f = {entry['integrand']}")
    except QuadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
