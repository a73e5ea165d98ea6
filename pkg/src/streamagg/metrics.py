"""Accuracy metrics for aggregation summaries.

All metrics take plain ``{key: value}`` mappings: ``est`` from a summary's
:meth:`~streamagg.model.Summary.as_dict`, ``truth`` from
:func:`~streamagg.traces.exact_totals`.  Keys absent from a mapping count as
zero, so estimators are charged both for keys they miss and for phantom keys
they report.

The module docstrings double as executable hand-checked examples::

    >>> wre({"a": 12.0, "b": 27.0}, {"a": 10.0, "b": 30.0})
    0.125
    >>> subpop_wre({"a": 12.0, "b": 27.0}, {"a": 10.0, "b": 30.0}, ["a", "b"])
    0.025
    >>> dense_rank({"a": 5.0, "b": 5.0, "c": 2.0})
    {'a': 1, 'b': 1, 'c': 2}
    >>> dense_rank({"a": 4.6, "b": 5.4}, precision=0)
    {'a': 1, 'b': 1}
"""

from __future__ import annotations

import math
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence


def wre(est: Mapping, truth: Mapping) -> float:
    """Weighted relative error: sum of |error| over the sum of true values.

    >>> wre({"a": 12.0, "b": 27.0}, {"a": 10.0, "b": 30.0})
    0.125

    (|12-10| + |27-30|) / (10 + 30) = 5/40.  One big key's error counts for
    as much as the same absolute error spread over many small keys, which is
    what makes this a *volume*-oriented metric.
    """
    denom = math.fsum(truth.values())
    if denom <= 0:
        raise ValueError("truth must have positive total")
    err = math.fsum(abs(est.get(k, 0.0) - v) for k, v in truth.items())
    err += math.fsum(v for k, v in est.items() if k not in truth)
    return err / denom


def subpop_wre(est: Mapping, truth: Mapping, subset: Iterable[Hashable]) -> float:
    """Relative error of one subpopulation's estimated total.

    >>> subpop_wre({"a": 12.0, "b": 27.0}, {"a": 10.0, "b": 30.0}, ["a", "b"])
    0.025

    |39 - 40| / 40.  Per-key errors inside the subset may cancel — that is
    the point of unbiased estimators, and why subset totals can be far more
    accurate than any individual key.  Returns inf for a subset with zero
    true volume but nonzero estimate, 0.0 if both are zero.
    """
    keys = set(subset)
    true_total = math.fsum(v for k, v in truth.items() if k in keys)
    est_total = math.fsum(v for k, v in est.items() if k in keys)
    if true_total <= 0:
        return 0.0 if est_total == 0.0 else math.inf
    return abs(est_total - true_total) / true_total


def dense_rank(values: Mapping, precision: int | None = None) -> dict:
    """Dense ranking: equal values share a rank; ranks are 1, 2, 3, ... with no gaps.

    >>> dense_rank({"a": 5.0, "b": 5.0, "c": 2.0})
    {'a': 1, 'b': 1, 'c': 2}

    With ``precision`` the values are rounded first, so near-ties collapse
    into honest ties instead of arbitrary orderings:

    >>> dense_rank({"a": 4.6, "b": 5.4}, precision=0)
    {'a': 1, 'b': 1}
    """
    if precision is not None:
        snapped = {k: round(v, precision) for k, v in values.items()}
    else:
        snapped = dict(values)
    ranks: dict = {}
    rank = 0
    prev = None
    for k, v in sorted(snapped.items(), key=lambda kv: -kv[1]):
        if v != prev:
            rank += 1
            prev = v
        ranks[k] = rank
    return ranks


class PrecRecall(NamedTuple):
    precision: float
    recall: float


def rank_prec_recall(
    est: Mapping, truth: Mapping, r: int, precision: int | None = None
) -> PrecRecall:
    """Precision/recall of the estimated top ranks against the true top ranks.

    A key is "top-R" if its dense rank is <= R.  Precision is the fraction of
    estimated top-R keys that are truly top-R; recall is the fraction of true
    top-R keys the estimate recovered.

    >>> est = {"a": 9.0, "b": 7.0, "c": 1.0}
    >>> truth = {"a": 9.0, "b": 1.0, "c": 7.0}
    >>> rank_prec_recall(est, truth, 2)
    PrecRecall(precision=0.5, recall=0.5)

    Estimated top-2 is {a, b}, true top-2 is {a, c}; the overlap {a} is half
    of each.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    est_top = {k for k, rk in dense_rank(est, precision).items() if rk <= r}
    true_top = {k for k, rk in dense_rank(truth, precision).items() if rk <= r}
    hit = len(est_top & true_top)
    prec = hit / len(est_top) if est_top else (1.0 if not true_top else 0.0)
    rec = hit / len(true_top) if true_top else 1.0
    return PrecRecall(prec, rec)
