"""How well vol(P_T)·(r-2)^e predicts the admissible count, and how much the pruned tree overshoots it."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from src.config.settings import DEFAULT_DILATIONS
from src.services.coloring import build_context, enumerate_admissible
from src.services.polytope import (
    VolumeEstimate,
    build_polytope,
    coloring_estimator,
    ehrhart_volume_fit,
    estimate_lower_bound_check,
)
from src.triangulation.gluing import GluingTable
from src.triangulation.skeleton import compute_skeleton

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimatorRow:
    r: int
    admissible: int
    estimator: float
    ratio_estimate: float  # max(est/#Adm, #Adm/est)
    nodes_visited: int
    ratio_tree: float  # nodes_visited / #Adm

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "adm": self.admissible,
            "estimator": self.estimator,
            "ratio_estimate": self.ratio_estimate,
            "nodes": self.nodes_visited,
            "ratio_tree": self.ratio_tree,
        }


def _ratio(estimate: float, count: int) -> float:
    if count == 0 or estimate <= 0:
        return math.inf
    return max(estimate / count, count / estimate)


def estimator_report(
    T: GluingTable,
    r_list: Sequence[int],
    volume: Optional[VolumeEstimate] = None,
    integer_only: Optional[bool] = None,
) -> List[EstimatorRow]:
    """One row per r; the volume defaults to the even-dilation Ehrhart fit."""
    S = compute_skeleton(T)
    P = build_polytope(S)
    if volume is None:
        volume = ehrhart_volume_fit(P, DEFAULT_DILATIONS)

    rows: List[EstimatorRow] = []
    for r in r_list:
        stats = enumerate_admissible(build_context(S, r, integer_only), lambda _c: None)
        count = stats.admissible_count
        estimate = coloring_estimator(P, r, volume)
        rows.append(
            EstimatorRow(
                r=r,
                admissible=count,
                estimator=estimate,
                ratio_estimate=_ratio(estimate, count),
                nodes_visited=stats.nodes_visited,
                ratio_tree=stats.nodes_visited / count if count else math.inf,
            )
        )
        if S.v > 1:
            estimate_lower_bound_check(S, r, volume, count)
    logger.debug("estimator report over r=%s: %d rows", list(r_list), len(rows))
    return rows


__all__ = ["EstimatorRow", "estimator_report"]
