"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import lookup
from .alpha import ALPHA0, alpha_test
from .model import DomainError, OrbitPoint
from .solver import ConvergenceError, solve
from .starters import StarterKind, starter
from .sweep import (
    sweep,
    write_region_csv,
    write_region_mask_csv,
    write_region_pgm,
)
from .verify import SUITES, run_suite

DEFAULT_TABLE_EPS = 0.09


def _starter_kind(text: str) -> StarterKind:
    try:
        return StarterKind.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kepler-alpha",
        description="Certified starters for Kepler's equation E - e sin E = M.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve Kepler's equation for one (e, M)")
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--m-raw", type=float, required=True, help="mean anomaly, any real (radians)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--digits", type=int, help="run the Newton budget for 10^-N accuracy")
    mode.add_argument("--tol", type=float, help="iterate until |f(E)| <= TOL")
    p.add_argument("--table", help="use a lookup table file for the starter")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("alpha", help="alpha-test report for one starter")
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--m", type=float, required=True, help="mean anomaly in [0, pi]")
    p.add_argument("--starter", type=_starter_kind, default=StarterKind.THM1)

    p = sub.add_parser("sweep", help="alpha-test a starter on the full grid")
    p.add_argument("--starter", type=_starter_kind, required=True)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "pgm"), default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--region-mask", help="also write the analytic region of the starter as CSV")

    p = sub.add_parser("table", help="build or query lookup tables")
    tsub = p.add_subparsers(dest="table_command", required=True)
    g = tsub.add_parser("gen")
    g.add_argument("--eps", type=float, default=DEFAULT_TABLE_EPS)
    g.add_argument("--out", required=True)
    g.add_argument("--json", action="store_true", help="write the JSON export instead of binary")
    q = tsub.add_parser("query")
    q.add_argument("--table", required=True)
    q.add_argument("--e", type=float, required=True)
    q.add_argument("--m", type=float, required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="time a full sweep and a batch of solves")
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _cmd_solve(args) -> int:
    table = lookup.load(args.table) if args.table else None
    res = solve(args.e, args.m_raw, digits=args.digits, tol=args.tol, table=table)
    branch = res.starter.branch.name.lower() if res.starter.branch else ("table" if table else None)
    if args.json:
        print(json.dumps({
            "e": args.e,
            "m_raw": args.m_raw,
            "E": res.E,
            "iterations": res.iterations,
            "residual": res.residual,
            "starter_branch": branch,
            "certified": res.certified,
        }))
    else:
        print(f"E={res.E!r}")
        print(f"iterations={res.iterations}")
        print(f"residual={res.residual:.3e}")
        print(f"starter={res.starter.value!r} branch={branch}")
        print(f"certified={str(res.certified).lower()}")
        if res.digits_capped:
            print("note: digits capped at 15 (binary64)")
    return 0


def _cmd_alpha(args) -> int:
    p = OrbitPoint(args.e, args.m)
    st = starter(args.starter, p)
    rep = alpha_test(p, st.value)
    print(f"starter={args.starter.value} value={st.value!r}"
          + (f" branch={st.branch.name.lower()}" if st.branch else ""))
    print(f"beta={rep.beta!r}")
    print(f"gamma={rep.gamma!r} (k={rep.gamma_argmax_k})")
    print(f"alpha={rep.alpha!r} alpha0={ALPHA0!r}")
    print(f"passes={str(rep.passes).lower()}")
    return 0


def _cmd_sweep(args) -> int:
    m = sweep(args.starter, args.grid, workers=args.workers)
    if args.format == "csv":
        write_region_csv(m, args.out)
    else:
        write_region_pgm(m, args.out)
    if args.region_mask:
        write_region_mask_csv(args.starter, args.grid, args.region_mask)
    s = m.summary()
    print(f"starter={args.starter.value} grid={args.grid} cells={m.alpha.size}")
    print(f"pass_fraction={s.pass_fraction:.6f} failures={s.failures} "
          f"not_applicable={s.not_applicable} corner_failures={len(s.corner_failures)}")
    return 0


def _cmd_table(args) -> int:
    if args.table_command == "gen":
        t0 = time.perf_counter()
        t = lookup.build_table(args.eps)
        if args.json:
            with open(args.out, "w", encoding="ascii") as fh:
                fh.write(lookup.to_json(t))
        else:
            lookup.save(t, args.out)
        print(f"eps={t.eps!r} N={t.N} entries={t.entries.size} "
              f"built in {time.perf_counter() - t0:.2f}s -> {args.out}")
        return 0
    t = lookup.load(args.table)
    p = OrbitPoint(args.e, args.m)
    st = lookup.table_starter(t, p)
    rep = alpha_test(p, st.value)
    where = st.branch.name.lower() if st.branch else "cell %d,%d" % lookup.cell_index(t, p)
    print(f"starter={st.value!r} source={where}")
    print(f"alpha={rep.alpha!r} passes={str(rep.passes).lower()}")
    return 0


def _cmd_verify(args) -> int:
    res = run_suite(args.suite, args.samples, args.seed)
    for line in res.lines:
        print(line)
    print(f"suite {res.name}: {'PASS' if res.passed else 'FAIL'}")
    return 0 if res.passed else 1


def _cmd_bench(args) -> int:
    t0 = time.perf_counter()
    m = sweep(StarterKind.THM1, args.grid, workers=args.workers)
    dt = time.perf_counter() - t0
    print(f"sweep thm1 grid={args.grid}: {m.alpha.size} cells in {dt:.2f}s "
          f"({m.alpha.size / dt:,.0f} cells/s), pass_fraction={m.pass_fraction:.6f}")
    n = 20_000
    t0 = time.perf_counter()
    for k in range(n):
        solve((k % 1000) / 1000, 0.001 * k, digits=15)
    dt = time.perf_counter() - t0
    print(f"solve digits=15: {n} solves in {dt:.2f}s ({n / dt:,.0f} solves/s)")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "alpha": _cmd_alpha,
    "sweep": _cmd_sweep,
    "table": _cmd_table,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, lookup.TableFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
