"""``cspath`` command line.

Exit codes: 0 success / feasible, 1 infeasible (or cycle budget hit),
2 usage or input error, 3 engine/oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .analysis import bench, bench_json, format_bench_table, trace_run, write_bench_csv, write_trace_csv
from .engine import InvalidInstance, Reached, SolverConfig, solve
from .generators import BadSpec, FractalSpec, GridSpec, gen_fractal, gen_grid, gen_speedway
from .graph import GraphError, InstanceFormatError, format_instance, read_instance, write_instance
from .oracle import InstanceTooLarge, SearchSpaceTooLarge, compare, dp_constrained_shortest, enumerate_paths
from .reconstruct import ReconstructionMismatch, reconstruct_path

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3

_INPUT_ERRORS = (
    OSError,
    InstanceFormatError,
    GraphError,
    InvalidInstance,
    BadSpec,
    InstanceTooLarge,
    SearchSpaceTooLarge,
)


def _dumps(obj: dict) -> str:
    return json.dumps({"format": 1, **obj}, sort_keys=True)


def _config(args) -> SolverConfig:
    return SolverConfig(time_mode=args.mode, workers=args.workers, cycle_budget=args.cycle_budget)


def _outcome_dict(outcome) -> dict:
    if isinstance(outcome, Reached):
        return {"status": outcome.status, "F1": outcome.F1, "F2": outcome.F2, "terminal": outcome.terminal}
    return {"status": outcome.status, "F1": None, "F2": None, "terminal": None, "t": outcome.t}


def cmd_solve(args) -> int:
    outcome = solve(read_instance(args.file), _config(args))
    print(_dumps(_outcome_dict(outcome)))
    return EXIT_OK if isinstance(outcome, Reached) else EXIT_INFEASIBLE


def cmd_reconstruct(args) -> int:
    inst = read_instance(args.file)
    outcome = solve(inst, _config(args))
    if not isinstance(outcome, Reached):
        print(_dumps(_outcome_dict(outcome)))
        return EXIT_INFEASIBLE
    try:
        witness = reconstruct_path(inst, _config(args))
    except ReconstructionMismatch as exc:
        print(f"reconstruction failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    print(witness.to_json())
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = read_instance(args.file)
    res = enumerate_paths(inst) if args.enumerate else dp_constrained_shortest(inst)
    print(_dumps({"feasible": res.feasible, "F1": res.F1, "F2": res.F2, "path": list(res.path)}))
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_verify(args) -> int:
    cfg = _config(args)
    code = EXIT_OK
    for path in args.files:
        inst = read_instance(path)
        cmp = compare(inst, solve(inst, cfg))
        row = json.loads(cmp.to_json())
        row["file"] = path
        print(json.dumps(row, sort_keys=True))
        if not cmp.agree:
            print(f"mismatch on {path}:\n{cmp.dump}", file=sys.stderr)
            code = EXIT_MISMATCH
    return code


def _emit_instance(inst, out: str | None) -> None:
    if out is None:
        sys.stdout.write(format_instance(inst))
    else:
        write_instance(inst, out)


def cmd_gen(args) -> int:
    if args.family == "grid":
        spec = GridSpec(
            tuple(args.dims), f1_rule=args.f1, f2_rule=args.f2,
            A_rule=args.A, B_rule=args.B, seed=args.seed, M=args.M,
        )
        _emit_instance(gen_grid(spec), args.output)
    elif args.family == "speedway":
        _emit_instance(gen_speedway(args.n), args.output)
    else:
        final, levels = gen_fractal(FractalSpec(args.k, args.n))
        if not args.levels:
            _emit_instance(final, args.output)
            return EXIT_OK
        if args.output is None:
            raise BadSpec("--levels needs --output DIR")
        os.makedirs(args.output, exist_ok=True)
        for j, inst in enumerate(levels, start=1):
            write_instance(inst, os.path.join(args.output, f"fractal-k{args.k}-level{j}.txt"))
    return EXIT_OK


def cmd_trace(args) -> int:
    cfg = _config(args)
    write_trace_csv(trace_run(read_instance(args.file), cfg), sys.stdout)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = SolverConfig(time_mode=args.mode, workers=args.workers)
    rows = bench(args.sides, cfg, repeats=args.repeats, warmup=not args.no_warmup, seed=args.seed, p=args.p)
    if args.json:
        print(bench_json(rows))
    elif args.table:
        print(format_bench_table(rows))
    else:
        write_bench_csv(rows, sys.stdout)
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["unit", "jump"], default="jump", help="clock advance rule")
    p.add_argument("--workers", type=int, default=1, help="worker slots per bulk step")
    p.add_argument("--cycle-budget", type=int, default=None, help="stop after this many cycles")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cspath", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimum time, weight and terminal as JSON")
    p.add_argument("file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reconstruct", help="minimizing path as JSON")
    p.add_argument("file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("oracle", help="reference optimum (product-graph Dijkstra)")
    p.add_argument("file")
    p.add_argument("--enumerate", action="store_true", help="brute-force simple paths instead")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="engine vs oracle; exit 3 on any disagreement")
    p.add_argument("files", nargs="+")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write instance files")
    fam = p.add_subparsers(dest="family", required=True)
    g = fam.add_parser("grid", help="nearest-neighbour box lattice")
    g.add_argument("--dims", type=int, nargs="+", required=True)
    g.add_argument("--f1", default="const:1", help="const:c | uniform:lo:hi | bernoulli:p")
    g.add_argument("--f2", default="const:1")
    g.add_argument("--A", default="boundary", help="boundary | axis_x")
    g.add_argument(
        "--B", default="center",
        help="center (odd sides only) | center_floor (vertex at floor(side/2) per axis)",
    )
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--M", type=int, default=None, help="budget; omitted means unconstrained")
    g.add_argument("-o", "--output")
    s = fam.add_parser("speedway", help="half-plane with a fast vertical axis")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("-o", "--output")
    f = fam.add_parser("fractal", help="recursive fast-edge triangle construction")
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--n", type=int, default=None, help="half-width (default 2**k + 1)")
    f.add_argument("--levels", action="store_true", help="write every level 1..k into --output DIR")
    f.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("trace", help="per-cycle counts as CSV")
    p.add_argument("file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", help="cube benchmark (boundary to centre)")
    p.add_argument("--sides", type=int, nargs="+", default=[20, 30, 40, 50])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--no-warmup", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5, help="probability of passage time 1")
    p.add_argument("--mode", choices=["unit", "jump"], default="jump")
    p.add_argument("--workers", type=int, default=1)
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true")
    out.add_argument("--table", action="store_true", help="markdown table")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"cspath: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"cspath: {exc}", file=sys.stderr)
        return EXIT_USAGE
