"""streamagg: fixed-size stream aggregation with unbiased subset-sum estimates.

Feed a stream of ``(key, size)`` items through an aggregator with a hard
memory budget; get back per-key total-size estimates whose errors are
controlled even for keys the reservoir had to drop.  Includes priority-based
reservoir aggregation (with sample-and-hold gating and error-filtered
variants), sample-and-hold baselines, trace tooling, accuracy metrics and a
reproducible experiment harness.
"""

from .baselines import (
    AshAggregator,
    ExactAggregator,
    PrioritySample,
    ShAggregator,
    priority_sample,
)
from .harness import (
    ResultRow,
    accuracy_experiment,
    bench_experiment,
    build_aggregator,
    fit_power_law,
    summarize,
    write_means_csv,
    write_results_csv,
)
from .hashheap import HashHeap
from .metrics import dense_rank, rank_prec_recall, subpop_wre, wre
from .model import (
    MODES,
    AggregatorConfig,
    KeyEstimate,
    StreamAggregator,
    StreamItem,
    Summary,
    fingerprint64,
    make_aggregator,
)
from .pba import PbaAggregator, ReservoirEntry
from .pbash import PbashAggregator
from .traces import (
    exact_totals,
    gen_synthetic,
    mix_traces,
    read_csv_trace,
    write_csv_trace,
)

__version__ = "0.1.0"

__all__ = [
    "MODES",
    "AggregatorConfig",
    "AshAggregator",
    "ExactAggregator",
    "HashHeap",
    "KeyEstimate",
    "PbaAggregator",
    "PbashAggregator",
    "PrioritySample",
    "ReservoirEntry",
    "ResultRow",
    "ShAggregator",
    "StreamAggregator",
    "StreamItem",
    "Summary",
    "accuracy_experiment",
    "bench_experiment",
    "build_aggregator",
    "dense_rank",
    "exact_totals",
    "fingerprint64",
    "fit_power_law",
    "gen_synthetic",
    "make_aggregator",
    "mix_traces",
    "priority_sample",
    "rank_prec_recall",
    "read_csv_trace",
    "subpop_wre",
    "summarize",
    "wre",
    "write_csv_trace",
    "write_means_csv",
    "write_results_csv",
]
