"""Admissible colorings: the admissibility predicate and pruned backtracking.

Colors are doubled: an edge carries an integer 0..r-2 standing for half of
it. Edges are colored in a greedy order chosen so that triangle constraints
become checkable as early as possible; a branch is cut as soon as a completed
triangle fails, or two colored sides of an open triangle already exceed the
sum bound.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.arith.weights import admissible_triple, check_order
from src.triangulation.homology import homology_z2
from src.triangulation.skeleton import Skeleton
from src.utils.errors import ComputationError

logger = logging.getLogger(__name__)

# Doubled colors indexed by edge class.
Coloring = Tuple[int, ...]
Triangle = Tuple[int, int, int]


@dataclass(frozen=True)
class AdmissibilityContext:
    r: int
    e: int
    triangles: Tuple[Triangle, ...]
    edge_order: Tuple[int, ...]
    integer_only: bool
    # Triangles whose latest-ordered edge sits at each position of edge_order.
    triangles_by_last_edge: Tuple[Tuple[Triangle, ...], ...]
    # Sides already colored at each position, for open triangles with two or more colored sides.
    partial_sums_at: Tuple[Tuple[Tuple[int, ...], ...], ...]

    @property
    def colors(self) -> range:
        return range(0, self.r - 1, 2 if self.integer_only else 1)


@dataclass
class EnumStats:
    nodes_visited: int = 0
    admissible_count: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {"nodes": self.nodes_visited, "adm": self.admissible_count, "seconds": self.wall_time}


def merge_stats(parts: Iterable[EnumStats]) -> EnumStats:
    total = EnumStats()
    for part in parts:
        total.nodes_visited += part.nodes_visited
        total.admissible_count += part.admissible_count
        total.wall_time += part.wall_time
    return total


def order_edges(S: Skeleton) -> Tuple[int, ...]:
    """Greedy order: next is the edge completing the most triangles; ties go to the smallest index."""
    triangles = [set(tri) for tri in S.triangles]
    ordered: List[int] = []
    placed = set()
    while len(ordered) < S.e:
        best, best_score = -1, -1
        for edge in range(S.e):
            if edge in placed:
                continue
            score = sum(1 for tri in triangles if edge in tri and tri <= placed | {edge})
            if score > best_score:
                best, best_score = edge, score
        ordered.append(best)
        placed.add(best)
    return tuple(ordered)


def context_from_triangles(
    r: int,
    triangles: Sequence[Triangle],
    e: Optional[int] = None,
    order: Optional[Sequence[int]] = None,
    integer_only: bool = False,
) -> AdmissibilityContext:
    """Context over explicit triangle triples; edges are 0..e-1 and default to index order."""
    if e is None:
        e = 1 + max((x for tri in triangles for x in tri), default=-1)
    if order is None:
        order = range(e)
    position = {edge: k for k, edge in enumerate(order)}
    by_last: List[List[Triangle]] = [[] for _ in range(e)]
    partial: List[List[Tuple[int, ...]]] = [[] for _ in range(e)]
    for tri in triangles:
        last = max(position[x] for x in tri)
        by_last[last].append(tuple(tri))  # type: ignore[arg-type]
        for k in sorted({position[x] for x in tri}):
            if k == last:
                break
            sides = tuple(x for x in tri if position[x] <= k)
            if len(sides) >= 2 and order[k] in sides:
                partial[k].append(sides)
    return AdmissibilityContext(
        r=r,
        e=e,
        triangles=tuple(tuple(t) for t in triangles),  # type: ignore[misc]
        edge_order=tuple(order),
        integer_only=integer_only,
        triangles_by_last_edge=tuple(tuple(x) for x in by_last),
        partial_sums_at=tuple(tuple(x) for x in partial),
    )


def build_context(S: Skeleton, r: int, integer_only: Optional[bool] = None) -> AdmissibilityContext:
    """Admissibility context for a skeleton; integer_only=None picks the fast path when allowed."""
    check_order(r)
    allowed = homology_z2(S).integer_fast_path_allowed
    if integer_only is None:
        integer_only = allowed
    elif integer_only and not allowed:
        raise ComputationError("integer-only colorings need a one-vertex triangulation with trivial H1(M; Z/2)")
    return context_from_triangles(r, S.triangles, S.e, order_edges(S), integer_only)


def check_admissible(c: Sequence[int], ctx: AdmissibilityContext) -> bool:
    return all(admissible_triple(c[i], c[j], c[k], ctx.r) for i, j, k in ctx.triangles)


def _search(ctx: AdmissibilityContext, first_colors: Iterable[int], stats: EnumStats) -> Iterator[Coloring]:
    colors: List[int] = [0] * ctx.e
    budget = 2 * (ctx.r - 2)
    r = ctx.r
    palette = ctx.colors
    last = ctx.e - 1

    def descend(k: int, choices: Iterable[int]) -> Iterator[Coloring]:
        edge = ctx.edge_order[k]
        for color in choices:
            colors[edge] = color
            if any(not admissible_triple(colors[i], colors[j], colors[l], r) for i, j, l in ctx.triangles_by_last_edge[k]):
                continue
            if any(sum(colors[x] for x in sides) > budget for sides in ctx.partial_sums_at[k]):
                continue
            stats.nodes_visited += 1
            if k == last:
                stats.admissible_count += 1
                yield tuple(colors)
            else:
                yield from descend(k + 1, palette)
        colors[edge] = 0

    if ctx.e:
        yield from descend(0, first_colors)


def iter_admissible(
    ctx: AdmissibilityContext,
    partitions: Optional[Sequence[int]] = None,
    stats: Optional[EnumStats] = None,
) -> Iterator[Coloring]:
    """Admissible colorings in deterministic order, optionally restricted to some first-edge colors."""
    first = [c for c in ctx.colors if partitions is None or c in partitions]
    return _search(ctx, first, stats if stats is not None else EnumStats())


def enumerate_admissible(
    ctx: AdmissibilityContext,
    visitor: Callable[[Coloring], None],
    partitions: Optional[Sequence[int]] = None,
) -> EnumStats:
    stats = EnumStats()
    start = time.perf_counter()
    for coloring in iter_admissible(ctx, partitions, stats):
        visitor(coloring)
    stats.wall_time = time.perf_counter() - start
    logger.debug("r=%d: %d admissible, %d nodes", ctx.r, stats.admissible_count, stats.nodes_visited)
    return stats


def count_admissible(ctx: AdmissibilityContext) -> int:
    return enumerate_admissible(ctx, lambda _c: None).admissible_count


def brute_force_admissible(ctx: AdmissibilityContext) -> List[Coloring]:
    """Exhaustive (r-1)^e filter, in lexicographic order."""
    return [c for c in itertools.product(ctx.colors, repeat=ctx.e) if check_admissible(c, ctx)]


__all__ = [
    "Coloring",
    "AdmissibilityContext",
    "EnumStats",
    "merge_stats",
    "order_edges",
    "context_from_triangles",
    "build_context",
    "check_admissible",
    "iter_admissible",
    "enumerate_admissible",
    "count_admissible",
    "brute_force_admissible",
]
