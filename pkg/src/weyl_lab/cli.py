"""weyl-lab command line.

Experiments are subcommands named after the registry in
:mod:`weyl_lab.bench`; each experiment parameter is also a ``--flag``.
Parameters can come from ``--config`` (key=value lines), flags win.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .expsums import complete_weyl_sum
from .io import WeylCache, read_path_csv, read_signal_csv, signal_to_csv
from .kernels import DEFAULT_BUDGET_BYTES, MemoryBudgetError, build_kernel, convolve, maximal_operator
from .major_arc import multiplier_error
from .multifreq import DEFAULT_K_FLOOR, log2N_experiment
from .signals import RationalFreq
from .variation import jump_count, r_variation


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=argparse.SUPPRESS if suppress else ".",
                        help="output directory for experiment artifacts")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                        help="unsigned 64-bit master seed")
    parser.add_argument("--config", default=d, help="key=value parameter file")
    parser.add_argument("--cache", default=d, help="Weyl-sum cache CSV (d,A,Q,re,im)")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weyl-lab", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    for name, (_, defaults) in bench.EXPERIMENTS.items():
        p = sub.add_parser(name, parents=[common], help=f"run the {name} experiment")
        for key in defaults:
            p.add_argument("--" + key.replace("_", "-"), dest="param_" + key, default=None,
                           metavar="VALUE")

    p = sub.add_parser("weyl-sum", parents=[common], help="complete Weyl sum S(A/Q)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)

    p = sub.add_parser("kernel", parents=[common], help="atoms of K_k or K_k' as signal CSV")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--budget-bytes", type=int, default=DEFAULT_BUDGET_BYTES)
    p.add_argument("-o", "--output", help="file to write instead of stdout")

    for name, helptext in (("convolve", "K_k * f"), ("maximal", "sup_k |K_k * f|")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--k" if name == "convolve" else "--k-max", type=int, required=True)
        p.add_argument("--smooth", action="store_true")
        p.add_argument("--input", required=True, help="signal CSV (index,re,im)")
        p.add_argument("--budget-bytes", type=int, default=DEFAULT_BUDGET_BYTES)
        p.add_argument("-o", "--output")
        if name == "maximal":
            p.add_argument("--all-lengths", action="store_true",
                           help="sup over every N <= 2^k_max instead of dyadic N")

    p = sub.add_parser("approximant", parents=[common], help="sup |K_k'^ - L_k'^| per k (JSON lines)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=_int_list, required=True, help="comma-separated scales")
    p.add_argument("--c", type=float, default=0.2)
    p.add_argument("--grid-refine", type=int, default=0)

    p = sub.add_parser("jumps", parents=[common], help="greedy jump count of a path")
    p.add_argument("--input", required=True, help="path CSV (t,v1[,v2,...])")
    p.add_argument("--lam", type=float, required=True)

    p = sub.add_parser("variation", parents=[common], help="r-variation of a path")
    p.add_argument("--input", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--allow-small-r", action="store_true")

    p = sub.add_parser("multifreq", parents=[common], help="multi-frequency maximal ratios")
    p.add_argument("--N", type=_int_list, default=[2, 4, 8, 16, 32])
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--M", type=int, default=2**16)
    p.add_argument("--k-floor", type=int, default=DEFAULT_K_FLOOR)
    return parser


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _jsonl(rows) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def _run_experiment(args) -> int:
    defaults = bench.EXPERIMENTS[args.command][1]
    overrides = bench.parse_config_file(args.config) if args.config else {}
    for key in defaults:
        val = getattr(args, "param_" + key)
        if val is not None:
            overrides[key] = val
    spec = bench.ExperimentSpec.parse(args.command, overrides, args.seed, args.out)
    status, result = bench.run_experiment(spec)
    for row in result.failures:
        print(f"FAILED: {json.dumps(row, sort_keys=True)}", file=sys.stderr)
    print(f"{spec.name}: {len(result.rows)} rows -> {spec.out}  [{'ok' if status == 0 else 'FAIL'}]")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cache = WeylCache(args.cache) if args.cache else None
    try:
        if args.command in bench.EXPERIMENTS:
            return _run_experiment(args)
        if args.command == "weyl-sum":
            v = complete_weyl_sum(args.d, RationalFreq.reduce(args.A, args.Q), cache=cache)
            print(json.dumps({"d": args.d, "A": args.A, "Q": args.Q, "re": v.real, "im": v.imag}))
        elif args.command == "kernel":
            K = build_kernel(args.d, args.k, args.smooth, args.budget_bytes)
            text = "index,re,im\n" + "".join(f"{p},{w!r},0.0\n" for p, w in K.atoms)
            _emit(text, args.output)
        elif args.command == "convolve":
            K = build_kernel(args.d, args.k, args.smooth, args.budget_bytes)
            _emit(signal_to_csv(convolve(K, read_signal_csv(args.input), args.budget_bytes)), args.output)
        elif args.command == "maximal":
            out = maximal_operator(args.d, args.k_max, read_signal_csv(args.input), args.smooth,
                                   dyadic=not args.all_lengths, budget_bytes=args.budget_bytes)
            _emit(signal_to_csv(out), args.output)
        elif args.command == "approximant":
            rows = [{"k": k, "sup_error": multiplier_error(args.d, k, args.c, refine=args.grid_refine,
                                                          cache=cache)} for k in args.k]
            sys.stdout.write(_jsonl(rows))
        elif args.command == "jumps":
            prof = jump_count(read_path_csv(args.input), args.lam)
            print(json.dumps({"lambda": prof.lam, "count": prof.count, "witness": list(prof.witness)}))
        elif args.command == "variation":
            v = r_variation(read_path_csv(args.input), args.r, args.allow_small_r)
            print(json.dumps({"r": args.r, "variation": v}))
        elif args.command == "multifreq":
            rows, _ = log2N_experiment(args.N, args.trials, None, args.seed, args.M, k_floor=args.k_floor)
            sys.stdout.write(_jsonl(r.as_dict() for r in rows))
    except (bench.ExperimentError, MemoryBudgetError, ValueError) as exc:
        print(f"weyl-lab: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
