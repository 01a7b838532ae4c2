"""Triangulation preprocessing by a random walk of Pachner moves.

The walk applies uniformly chosen 2-3/3-2 moves. Every triangulation reaching
the smallest size seen so far gets a Monte-Carlo estimate of its polytope
volume; the result is the minimal-size triangulation of smallest volume,
which predicts the cheapest backtracking tree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.services.polytope import build_polytope, mc_volume
from src.triangulation.gluing import GluingTable
from src.triangulation.moves import applicable_moves, apply_move, canonical_form
from src.triangulation.skeleton import compute_skeleton
from src.utils.errors import ComputationError, MoveNotApplicable

logger = logging.getLogger(__name__)


@dataclass
class OptimizeReport:
    initial_size: int
    size_cap: int
    steps_taken: int = 0
    # (number of tetrahedra, estimated volume or None when not estimated) per visited triangulation
    visited: List[Tuple[int, Optional[float]]] = field(default_factory=list)
    best_size: int = 0
    best_volume: Optional[float] = None
    initial_volume: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "initial_size": self.initial_size,
            "initial_volume": self.initial_volume,
            "size_cap": self.size_cap,
            "steps": self.steps_taken,
            "best_size": self.best_size,
            "best_volume": self.best_volume,
            "visited": [list(pair) for pair in self.visited],
        }


class _VolumeCache:
    """Monte-Carlo volumes keyed by canonical form, so isomorphic revisits are free."""

    def __init__(self, samples: int, seed: int) -> None:
        self.samples = samples
        self.seed = seed
        self._values: Dict[Tuple, float] = {}

    def volume(self, T: GluingTable) -> float:
        key = canonical_form(T).gluings
        if key not in self._values:
            P = build_polytope(compute_skeleton(T))
            self._values[key] = mc_volume(P, self.samples, self.seed).value
        return self._values[key]


def optimize_triangulation(
    T: GluingTable,
    steps: int,
    seed: int = 0,
    mc_samples: int = 200_000,
    size_cap: Optional[int] = None,
    size_cap_factor: int = 3,
) -> Tuple[GluingTable, OptimizeReport]:
    if steps < 1:
        raise ComputationError(f"steps must be at least 1, got {steps}", steps=steps)
    cap = size_cap if size_cap is not None else size_cap_factor * T.n
    rng = np.random.default_rng(seed)
    cache = _VolumeCache(mc_samples, seed)

    best, best_volume = T, cache.volume(T)
    report = OptimizeReport(initial_size=T.n, size_cap=cap, best_size=T.n, best_volume=best_volume)
    report.initial_volume = best_volume
    report.visited.append((T.n, best_volume))

    current = T
    for step in range(steps):
        S = compute_skeleton(current)
        # A 2-3 move adds one tetrahedron.
        moves = [m for m in applicable_moves(current, S) if m[0] == "3-2" or current.n + 1 <= cap]
        if not moves:
            logger.debug("step %d: no applicable move on %d tetrahedra", step, current.n)
            break
        kind, index = moves[int(rng.integers(len(moves)))]
        try:
            current = apply_move(current, kind, index, S)
        except MoveNotApplicable as exc:
            logger.debug("step %d: %s %d rejected (%s)", step, kind, index, exc.message)
            continue
        report.steps_taken += 1

        volume: Optional[float] = None
        if current.n <= best.n:
            volume = cache.volume(current)
            if current.n < best.n or volume < best_volume:
                best, best_volume = current, volume
                logger.debug("step %d: new best %d tetrahedra, volume %.6g", step, best.n, volume)
        report.visited.append((current.n, volume))

    report.best_size = best.n
    report.best_volume = best_volume
    return best, report


__all__ = ["OptimizeReport", "optimize_triangulation"]
