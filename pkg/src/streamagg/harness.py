"""Experiment harness: seeded multi-trial runs, metrics, CSV output.

Two entry points:

  * :func:`accuracy_experiment` — regenerate a trace per trial (fresh
    randomness, same recipe), run every requested algorithm on the *same*
    trial trace, and score summaries against exact totals.  Paired runs make
    algorithm comparisons much tighter than independent ones.
  * :func:`bench_experiment` — time the reference implementations on a fixed
    trace across a grid of reservoir sizes and report per-item costs plus
    reservoir churn counters.

Every random decision descends from one base seed through labeled substreams
(trial index, algorithm name, purpose), so runs are reproducible and no two
algorithms share randomness within a trial.
"""

from __future__ import annotations

import csv
import gc
import math
import statistics
import time
from random import Random
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from ._seeding import derive_seed
from .metrics import rank_prec_recall, subpop_wre, wre
from .model import AggregatorConfig, Key, StreamAggregator, StreamItem, make_aggregator
from .traces import exact_totals


class ResultRow(NamedTuple):
    """One measurement: (algorithm, reservoir size, trial, metric) -> value."""

    algorithm: str
    m: int
    trial: int
    metric: str
    value: float


class MeanRow(NamedTuple):
    """Per-(algorithm, m, metric) aggregate over trials."""

    algorithm: str
    m: int
    metric: str
    mean: float
    stddev: float


def build_aggregator(
    mode: str,
    m: int,
    seed: int,
    *,
    sh_threshold: float | None = None,
    ash_round_impl: str = "scalar",
) -> StreamAggregator:
    """Construct one aggregator with per-mode options routed appropriately."""
    config = AggregatorConfig(
        capacity=m,
        mode=mode,
        seed=seed,
        sh_threshold=sh_threshold if mode == "sh" else None,
    )
    options = {"round_impl": ash_round_impl} if mode == "ash" else {}
    return make_aggregator(config, **options)


def accuracy_experiment(
    modes: Sequence[str],
    trace_factory: Callable[[int], Sequence[StreamItem]],
    m: int,
    trials: int,
    seed: int = 0,
    *,
    subpop_sizes: Sequence[int] = (),
    subpop_count: int = 100,
    rank_quantiles: Sequence[float] = (),
    rank_precision: int | None = 0,
    sh_threshold: float | None = None,
    ash_round_impl: str = "vector",
) -> list[ResultRow]:
    """Run ``modes`` on ``trials`` freshly generated traces and score them.

    Args:
        modes: aggregation modes to run (see :data:`streamagg.model.MODES`).
        trace_factory: called with a per-trial seed, returns the trial trace.
        m: reservoir capacity for every mode.
        trials: number of independent trials.
        seed: base seed for everything (traces, algorithms, subset draws).
        subpop_sizes: for each size, draw ``subpop_count`` random key subsets
            per trial and record the mean subpopulation relative error as
            metric ``subpop_wre@<size>``.  Subsets are drawn from the trial's
            true key set and shared across modes.
        rank_quantiles: fractions of the maximum true dense rank at which to
            record top-R precision/recall (metrics ``prec@<q>``/``rec@<q>``).
        rank_precision: decimal rounding applied before ranking.
        sh_threshold: fixed threshold, required iff ``"sh"`` in modes.
        ash_round_impl: ASH deletion-round implementation; the default uses
            the vectorized round, which draws from a different (equally
            seeded) stream than the scalar reference but runs large sweeps
            in a fraction of the time.

    Returns one :class:`ResultRow` per (mode, trial, metric).
    """
    rows: list[ResultRow] = []
    for trial in range(trials):
        trial_seed = derive_seed(seed, "trial", trial)
        items = trace_factory(derive_seed(trial_seed, "trace"))
        truth = exact_totals(items)
        true_keys = sorted(truth)
        subsets: dict[int, list[list[Key]]] = {}
        sub_rng = Random(derive_seed(trial_seed, "subpop"))
        for size in subpop_sizes:
            take = min(size, len(true_keys))
            subsets[size] = [sub_rng.sample(true_keys, take) for _ in range(subpop_count)]
        rank_rs: list[tuple[float, int]] = []
        if rank_quantiles:
            from .metrics import dense_rank

            rmax = max(dense_rank(truth, rank_precision).values())
            rank_rs = [(q, max(1, round(q * rmax))) for q in rank_quantiles]
        for mode in modes:
            agg = build_aggregator(
                mode,
                m,
                derive_seed(trial_seed, "alg", mode),
                sh_threshold=sh_threshold,
                ash_round_impl=ash_round_impl,
            )
            agg.observe_all(items)
            est = agg.summary().as_dict()
            rows.append(ResultRow(mode, m, trial, "wre", wre(est, truth)))
            for size, subs in subsets.items():
                val = math.fsum(subpop_wre(est, truth, s) for s in subs) / len(subs)
                rows.append(ResultRow(mode, m, trial, f"subpop_wre@{size}", val))
            for q, r in rank_rs:
                pr = rank_prec_recall(est, truth, r, rank_precision)
                rows.append(ResultRow(mode, m, trial, f"prec@{q:g}", pr.precision))
                rows.append(ResultRow(mode, m, trial, f"rec@{q:g}", pr.recall))
    return rows


def bench_experiment(
    modes: Sequence[str],
    items: Sequence[StreamItem],
    m_values: Sequence[int],
    seed: int = 0,
    *,
    sh_threshold: float | None = None,
    ash_round_impl: str = "scalar",
    repeats: int = 1,
) -> list[ResultRow]:
    """Time each mode over a grid of reservoir sizes on one fixed trace.

    Records per (mode, m): ``per_item_us`` wall-clock cost,
    ``insertions`` / ``evictions`` / ``rejections`` reservoir churn, and for
    the heap-based modes ``sift_swaps_per_item``.  The trial column is 0.

    Timed passes run with the cycle collector paused (collection pauses
    scale with how many objects the *calling* process keeps alive, which
    would add a constant per-item cost and flatten scaling fits).  With
    ``repeats`` > 1 every grid point is timed ``repeats`` times and the
    fastest pass wins; the passes are interleaved across the whole grid so
    a slow spell on a shared machine cannot sit on one point's repeats.
    The churn counters are deterministic for a given seed and come from the
    first pass.

    Benchmarks default to the scalar ASH round: timing the numpy-vectorized
    round against pure-Python reservoir loops would compare interpreter
    overhead, not algorithmic work.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    n = len(items)
    best: dict[tuple[str, int], float] = {}
    churn: dict[tuple[str, int], tuple] = {}
    for rep in range(repeats):
        for mode in modes:
            for m in m_values:
                agg = build_aggregator(
                    mode,
                    m,
                    derive_seed(seed, "bench", mode, m),
                    sh_threshold=sh_threshold,
                    ash_round_impl=ash_round_impl,
                )
                observe = agg.observe
                gc_was_enabled = gc.isenabled()
                gc.disable()
                try:
                    t0 = time.perf_counter()
                    for item in items:
                        observe(item)
                    elapsed = time.perf_counter() - t0
                finally:
                    if gc_was_enabled:
                        gc.enable()
                gc.collect()
                point = (mode, m)
                best[point] = min(best.get(point, math.inf), elapsed)
                if rep == 0:
                    churn[point] = (
                        agg.insertions,
                        agg.evictions,
                        agg.rejections,
                        getattr(agg, "reservoir_swaps", None),
                    )
    rows: list[ResultRow] = []
    for mode in modes:
        for m in m_values:
            insertions, evictions, rejections, swaps = churn[mode, m]
            rows.append(ResultRow(mode, m, 0, "per_item_us", best[mode, m] / n * 1e6))
            rows.append(ResultRow(mode, m, 0, "insertions", float(insertions)))
            rows.append(ResultRow(mode, m, 0, "evictions", float(evictions)))
            rows.append(ResultRow(mode, m, 0, "rejections", float(rejections)))
            if swaps is not None:
                rows.append(ResultRow(mode, m, 0, "sift_swaps_per_item", swaps / n))
    return rows


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares exponent b of y ~ a * x**b (log-log fit)."""
    if len(xs) < 2 or len(xs) != len(ys):
        raise ValueError("need at least two (x, y) points")
    if any(x <= 0 for x in xs) or any(y <= 0 for y in ys):
        raise ValueError("power-law fit needs positive data")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def summarize(rows: Iterable[ResultRow]) -> list[MeanRow]:
    """Collapse result rows over trials into means and sample stddevs."""
    groups: dict[tuple[str, int, str], list[float]] = {}
    order: list[tuple[str, int, str]] = []
    for row in rows:
        key = (row.algorithm, row.m, row.metric)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row.value)
    out = []
    for key in order:
        vals = groups[key]
        mean = statistics.fmean(vals)
        stddev = statistics.stdev(vals) if len(vals) > 1 else 0.0
        out.append(MeanRow(key[0], key[1], key[2], mean, stddev))
    return out


def mean_of(rows: Iterable[ResultRow], algorithm: str, metric: str, m: int | None = None) -> float:
    """Convenience: mean of one metric for one algorithm (and optionally one m)."""
    vals = [
        r.value
        for r in rows
        if r.algorithm == algorithm and r.metric == metric and (m is None or r.m == m)
    ]
    if not vals:
        raise KeyError(f"no rows for {algorithm!r}/{metric!r}")
    return statistics.fmean(vals)


def write_results_csv(rows: Iterable[ResultRow], path: str) -> None:
    """Write raw per-trial rows: ``algorithm,m,trial,metric,value``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "m", "trial", "metric", "value"])
        for row in rows:
            writer.writerow([row.algorithm, row.m, row.trial, row.metric, repr(row.value)])


def write_means_csv(rows: Iterable[ResultRow], path: str) -> None:
    """Write per-(algorithm, m, metric) aggregates: ``algorithm,m,metric,mean,stddev``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "m", "metric", "mean", "stddev"])
        for row in summarize(rows):
            writer.writerow([row.algorithm, row.m, row.metric, repr(row.mean), repr(row.stddev)])
