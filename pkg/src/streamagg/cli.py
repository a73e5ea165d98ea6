"""Command-line interface: trace tooling and experiment drivers.

Subcommands:
  generate  write a synthetic heavy-tailed trace to CSV
  mix       interleave traces with per-window byte-volume shares
  run       multi-trial accuracy experiment across aggregation modes
  bench     per-item cost and reservoir churn across reservoir sizes
"""

from __future__ import annotations

import argparse
import sys
from random import Random

from .harness import (
    accuracy_experiment,
    bench_experiment,
    fit_power_law,
    summarize,
    write_means_csv,
    write_results_csv,
)
from .model import MODES
from .traces import gen_synthetic, mix_traces, read_csv_trace, write_csv_trace


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _modes(text: str) -> list[str]:
    modes = [t.strip() for t in text.split(",") if t.strip()]
    for mode in modes:
        if mode not in MODES:
            raise argparse.ArgumentTypeError(f"unknown mode {mode!r}; choose from {','.join(MODES)}")
    return modes


def _print_means(rows) -> None:
    means = summarize(rows)
    width = max((len(r.metric) for r in means), default=6)
    print(f"{'algorithm':<10} {'m':>6} {'metric':<{width}} {'mean':>14} {'stddev':>14}")
    for r in means:
        print(f"{r.algorithm:<10} {r.m:>6} {r.metric:<{width}} {r.mean:>14.6g} {r.stddev:>14.6g}")


def _trace_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trace", help="input trace CSV (key,size or 5-tuple flow schema)")
    p.add_argument("--keys", type=int, help="synthesize a trace with this many distinct keys")
    p.add_argument("--alpha", type=float, default=1.2, help="Pareto tail index for synthesis")


def cmd_generate(args) -> int:
    items = gen_synthetic(args.keys, args.alpha, args.seed, shuffle=not args.sorted)
    write_csv_trace(items, args.out)
    print(f"wrote {len(items)} items / {args.keys} keys to {args.out}")
    return 0


def cmd_mix(args) -> int:
    traces = [read_csv_trace(path) for path in args.inputs]
    fractions = args.fractions
    if fractions is not None and fractions != "random":
        fractions = _floats(fractions)
    out = mix_traces(
        traces,
        fractions,
        window_items=args.window,
        seed=args.seed,
        total_items=args.total,
        cycle=not args.no_cycle,
    )
    write_csv_trace(out, args.out)
    print(f"wrote {len(out)} items mixed from {len(traces)} traces to {args.out}")
    return 0


def _make_factory(args):
    if (args.trace is None) == (args.keys is None):
        raise SystemExit("exactly one of --trace / --keys is required")
    if args.trace is not None:
        base = read_csv_trace(args.trace)
        if getattr(args, "reshuffle", False):

            def factory(trial_seed: int):
                items = list(base)
                Random(trial_seed).shuffle(items)
                return items

        else:
            factory = lambda trial_seed: base
        return factory
    return lambda trial_seed: gen_synthetic(args.keys, args.alpha, trial_seed)


def cmd_run(args) -> int:
    factory = _make_factory(args)
    rows = accuracy_experiment(
        args.modes,
        factory,
        args.m,
        args.trials,
        args.seed,
        subpop_sizes=args.subpop_sizes or (),
        subpop_count=args.subpop_count,
        rank_quantiles=args.rank_quantiles or (),
        rank_precision=args.rank_precision,
        sh_threshold=args.sh_threshold,
        ash_round_impl=args.ash_rounds,
    )
    if args.out:
        write_results_csv(rows, args.out)
    if args.means:
        write_means_csv(rows, args.means)
    _print_means(rows)
    return 0


def cmd_bench(args) -> int:
    factory = _make_factory(args)
    items = factory(args.seed)
    rows = bench_experiment(
        args.modes,
        items,
        args.m_list,
        args.seed,
        sh_threshold=args.sh_threshold,
        ash_round_impl=args.ash_rounds,
        repeats=args.repeats,
    )
    if args.out:
        write_results_csv(rows, args.out)
    _print_means(rows)
    for mode in args.modes:
        pts = sorted(
            (r.m, r.value) for r in rows if r.algorithm == mode and r.metric == "per_item_us"
        )
        if len(pts) >= 2:
            exponent = fit_power_law([p[0] for p in pts], [p[1] for p in pts])
            print(f"{mode}: per-item time ~ m^{exponent:.3f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="streamagg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic trace CSV")
    p.add_argument("--keys", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sorted", action="store_true", help="keep each key's items consecutive")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("mix", help="interleave trace CSVs")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--fractions", help="comma-separated byte shares, or 'random'")
    p.add_argument("--window", type=int, default=1000)
    p.add_argument("--total", type=int, default=None)
    p.add_argument("--no-cycle", action="store_true", help="do not loop exhausted sources")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("run", help="multi-trial accuracy experiment")
    _trace_args(p)
    p.add_argument("--reshuffle", action="store_true", help="reshuffle a file trace per trial")
    p.add_argument("--modes", type=_modes, default=["pba", "pbash", "pbash_ef", "ash"])
    p.add_argument("--m", type=int, default=1000, help="reservoir capacity")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subpop-sizes", type=_ints, default=None)
    p.add_argument("--subpop-count", type=int, default=100)
    p.add_argument("--rank-quantiles", type=_floats, default=None)
    p.add_argument("--rank-precision", type=int, default=0)
    p.add_argument("--sh-threshold", type=float, default=None)
    p.add_argument("--ash-rounds", choices=["scalar", "vector"], default="vector")
    p.add_argument("--out", help="raw per-trial CSV")
    p.add_argument("--means", help="aggregated CSV")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="cost scaling across reservoir sizes")
    _trace_args(p)
    p.add_argument("--modes", type=_modes, default=["pba", "pbash", "ash"])
    p.add_argument("--m-list", type=_ints, default=[100, 200, 400, 700, 1000])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sh-threshold", type=float, default=None)
    p.add_argument("--ash-rounds", choices=["scalar", "vector"], default="scalar")
    p.add_argument("--repeats", type=int, default=1, help="timed passes per point, fastest kept")
    p.add_argument("--out", help="raw CSV")
    p.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
