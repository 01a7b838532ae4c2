"""Convergence diagnostics for (2π/r)·log TV_r.

Orders where TV_r was declared zero are left out of every quantity here; the
remaining orders form R*_M. S_r is the largest distance to the target limit
over the tail k >= r of R*_M.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.arith.bigreal import context_for
from src.services.fitting import FitResult, fit_model1
from src.services.tv_engine import TVRecord, TVSeries
from src.utils.errors import ConventionViolation, InsufficientPoints, MissingTarget

logger = logging.getLogger(__name__)


def log_quantity(rec: TVRecord) -> Optional[float]:
    """(2π/r)·ln TV_r, or None for a declared zero."""
    if rec.declared_zero:
        return None
    ctx = context_for(rec.bits_used)
    value = ctx.mpf(rec.tv)
    if value <= 0:
        raise ConventionViolation(f"TV_{rec.r} = {rec.tv} is not positive; its logarithm is undefined", r=rec.r)
    return float(2 * ctx.pi / rec.r * ctx.log(value))


def log_points(series: TVSeries) -> List[Tuple[int, float]]:
    """(r, log_quantity) over R*_M, in series order."""
    points = []
    for rec in series.records:
        lq = log_quantity(rec)
        if lq is not None:
            points.append((rec.r, lq))
    return points


def s_r(series: TVSeries, target: Optional[float] = None) -> List[Tuple[int, float]]:
    """S_r for every r in R*_M, by one backward pass over the series."""
    limit = series.target_limit if target is None else target
    if limit is None:
        raise MissingTarget("S_r needs a target limit; pass --target or set it on the series")
    out: List[Tuple[int, float]] = []
    running = -math.inf
    for r, lq in reversed(log_points(series)):
        running = max(running, abs(lq - limit))
        out.append((r, running))
    out.reverse()
    return out


def zero_orders(series: TVSeries) -> List[int]:
    return [rec.r for rec in series.records if rec.declared_zero]


@dataclass(frozen=True)
class AggregateCurve:
    """Per-r maximum and median of S_r across several manifolds, each with a Model (1) fit."""

    orders: Tuple[int, ...]
    maximum: Tuple[float, ...]
    median: Tuple[float, ...]
    fit_maximum: Optional[FitResult]
    fit_median: Optional[FitResult]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": list(self.orders),
            "max": list(self.maximum),
            "median": list(self.median),
            "fit_max": self.fit_maximum.to_dict() if self.fit_maximum else None,
            "fit_median": self.fit_median.to_dict() if self.fit_median else None,
        }


def _try_fit(points: Sequence[Tuple[float, float]]) -> Optional[FitResult]:
    try:
        return fit_model1(points)
    except InsufficientPoints:
        logger.info("aggregate curve has %d points; skipping the model fit", len(points))
        return None


def aggregate_s_r(series_list: Sequence[TVSeries], target: Optional[float] = None) -> AggregateCurve:
    by_r: Dict[int, List[float]] = {}
    for series in series_list:
        for r, value in s_r(series, target):
            by_r.setdefault(r, []).append(value)
    orders = tuple(sorted(by_r))
    maximum = tuple(max(by_r[r]) for r in orders)
    median = tuple(float(statistics.median(by_r[r])) for r in orders)
    return AggregateCurve(
        orders=orders,
        maximum=maximum,
        median=median,
        fit_maximum=_try_fit(list(zip(orders, maximum))),
        fit_median=_try_fit(list(zip(orders, median))),
    )


def growth_constant(series: TVSeries) -> Optional[float]:
    """max over R*_M of |log_quantity|·r / log r; observed only, never asserted."""
    values = [abs(lq) * r / math.log(r) for r, lq in log_points(series)]
    return max(values) if values else None


def liminf_limsup_tail(series: TVSeries, tail: int) -> Optional[Tuple[float, float]]:
    """(min, max) of log_quantity over the last `tail` nonzero records."""
    if tail < 1:
        raise ValueError("tail must be at least 1")
    values = [lq for _r, lq in log_points(series)][-tail:]
    if not values:
        return None
    return min(values), max(values)


def series_to_csv(series: TVSeries, target: Optional[float] = None) -> str:
    """CSV with columns r, tv, log_quantity, s_r; missing values are left empty."""
    limit = series.target_limit if target is None else target
    s_values = dict(s_r(series, limit)) if limit is not None else {}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["r", "tv", "log_quantity", "s_r"])
    for rec in series.records:
        lq = log_quantity(rec)
        writer.writerow(
            [
                rec.r,
                rec.tv,
                "" if lq is None else repr(lq),
                repr(s_values[rec.r]) if rec.r in s_values else "",
            ]
        )
    return buffer.getvalue()


__all__ = [
    "log_quantity",
    "log_points",
    "s_r",
    "zero_orders",
    "AggregateCurve",
    "aggregate_s_r",
    "growth_constant",
    "liminf_limsup_tail",
    "series_to_csv",
]
