"""The Turaev-Viro state sum and sequences over r.

TV_r(T) = Σ_θ (η²)^v · Π_edges |e|_θ · Π_triangles |t|_θ · Π_tetrahedra |Δ|_θ

summed over admissible colorings θ. The sum is split by the color of the
first edge in the backtracking order; partitions are evaluated (optionally in
worker processes) and reduced in ascending color order so that any worker
count gives the same digits.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.arith.bigreal import BigReal, MpfTuple, context_for, from_tuple, to_decimal_string, to_tuple
from src.arith.precision import DoublingResult, Evaluation, PrecisionPolicy, with_precision_doubling
from src.arith.weights import WeightSystem, check_order, weight_system
from src.config.settings import REFERENCE_BITS
from src.services.coloring import (
    AdmissibilityContext,
    Coloring,
    EnumStats,
    build_context,
    check_admissible,
    iter_admissible,
    merge_stats,
)
from src.triangulation.gluing import GluingTable
from src.triangulation.skeleton import Skeleton, compute_skeleton
from src.utils.errors import ComputationError, ConventionViolation, EvenOrderUnsupported

logger = logging.getLogger(__name__)

# Position in Skeleton.tet_edges (01, 02, 03, 12, 13, 23) of the six tet_weight arguments a..f.
_TET_ARGS = (0, 1, 3, 5, 4, 2)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class TVRecord:
    r: int
    tv: str
    declared_zero: bool
    bits_used: int
    admissible_count: int
    nodes_visited: int
    wall_time: float  # milliseconds
    timestamp: str = field(default_factory=_now)

    @property
    def value(self) -> float:
        return 0.0 if self.declared_zero else float(self.tv)

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "r": self.r,
                "tv": self.tv,
                "zero": self.declared_zero,
                "bits": self.bits_used,
                "adm": self.admissible_count,
                "nodes": self.nodes_visited,
                "ms": round(self.wall_time, 3),
                "ts": self.timestamp,
            }
        )

    @classmethod
    def from_json_line(cls, line: str) -> "TVRecord":
        data = json.loads(line)
        return cls(
            r=int(data["r"]),
            tv=str(data["tv"]),
            declared_zero=bool(data["zero"]),
            bits_used=int(data["bits"]),
            admissible_count=int(data["adm"]),
            nodes_visited=int(data["nodes"]),
            wall_time=float(data.get("ms", 0.0)),
            timestamp=str(data.get("ts", "")),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TVSeries:
    records: List[TVRecord] = field(default_factory=list)
    manifold_label: str = ""
    target_limit: Optional[float] = None

    def orders(self) -> List[int]:
        return [rec.r for rec in self.records]

    def get(self, r: int) -> Optional[TVRecord]:
        return next((rec for rec in self.records if rec.r == r), None)

    def add(self, rec: TVRecord) -> None:
        if rec.r % 2 == 0:
            raise EvenOrderUnsupported(f"series records must have odd r, got {rec.r}", r=rec.r)
        if self.records and rec.r <= self.records[-1].r:
            raise ComputationError(f"record r={rec.r} does not extend the series past r={self.records[-1].r}")
        self.records.append(rec)


# State sum ------------------------------------------------------------------------
class _StateSum:
    """Per-(r, bits) weight evaluation of colorings, with memoized triangle and tetrahedron weights."""

    def __init__(self, S: Skeleton, ws: WeightSystem) -> None:
        self.S = S
        self.ws = ws
        self.vertex_factor = ws.eta2 ** S.v
        self._tri: Dict[Tuple[int, int, int], BigReal] = {}
        self._tet: Dict[Tuple[int, ...], BigReal] = {}

    def term(self, c: Coloring) -> BigReal:
        ws = self.ws
        w = self.vertex_factor
        for color in c:
            w *= ws.edge_weight(color)
        for i, j, k in self.S.triangles:
            key = (c[i], c[j], c[k])
            tw = self._tri.get(key)
            if tw is None:
                tw = self._tri[key] = ws.triangle_weight(*key)
            w *= tw
        for edges in self.S.tet_edges:
            key6 = tuple(c[edges[p]] for p in _TET_ARGS)
            tet = self._tet.get(key6)
            if tet is None:
                tet = self._tet[key6] = ws.tet_weight(*key6)
            w *= tet
        return w


def _partition_sum(job: Tuple[Skeleton, AdmissibilityContext, int, int]) -> Tuple[MpfTuple, MpfTuple, int, int]:
    """Sum over colorings whose first edge has one color; returns raw mpf tuples for pickling."""
    S, ctx, bits, first_color = job
    ws = weight_system(ctx.r, bits)
    state = _StateSum(S, ws)
    total = ws.zero
    magnitude = ws.zero
    stats = EnumStats()
    for c in iter_admissible(ctx, [first_color], stats):
        term = state.term(c)
        total += term
        magnitude += abs(term)
    return to_tuple(total), to_tuple(magnitude), stats.nodes_visited, stats.admissible_count


def state_sum(
    S: Skeleton,
    ctx: AdmissibilityContext,
    bits: int,
    threads: int = 1,
) -> Tuple[Evaluation, EnumStats]:
    """One evaluation of the state sum at a fixed width."""
    start = time.perf_counter()
    jobs = [(S, ctx, bits, color) for color in ctx.colors]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            parts = list(pool.map(_partition_sum, jobs))
    else:
        parts = [_partition_sum(job) for job in jobs]

    ctx_b = context_for(bits)
    total = ctx_b.mpf(0)
    magnitude = ctx_b.mpf(0)
    stats_parts = []
    for value, mag, nodes, adm in parts:
        total += from_tuple(bits, value)
        magnitude += from_tuple(bits, mag)
        stats_parts.append(EnumStats(nodes_visited=nodes, admissible_count=adm))
    stats = merge_stats(stats_parts)
    stats.wall_time = time.perf_counter() - start
    return Evaluation(total, magnitude), stats


def tv_invariant(
    T: GluingTable,
    r: int,
    policy: Optional[PrecisionPolicy] = None,
    integer_only: Optional[bool] = None,
    threads: int = 1,
    starting_bits: Optional[int] = None,
) -> TVRecord:
    check_order(r)
    policy = policy or PrecisionPolicy()
    S = compute_skeleton(T)
    ctx = build_context(S, r, integer_only)

    last_stats: List[EnumStats] = []
    start = time.perf_counter()

    def compute(bits: int) -> Evaluation:
        evaluation, stats = state_sum(S, ctx, bits, threads)
        last_stats.append(stats)
        return evaluation

    result: DoublingResult = with_precision_doubling(compute, policy, starting_bits)
    elapsed_ms = (time.perf_counter() - start) * 1000.0

    if not result.declared_zero and result.value < 0:
        raise ConventionViolation(
            f"TV_{r} evaluated to a negative value {to_decimal_string(result.value, 20)}", r=r
        )

    stats = last_stats[-1]
    record = TVRecord(
        r=r,
        tv="0" if result.declared_zero else to_decimal_string(result.value),
        declared_zero=result.declared_zero,
        bits_used=result.bits_used,
        admissible_count=stats.admissible_count,
        nodes_visited=stats.nodes_visited,
        wall_time=elapsed_ms,
    )
    logger.info("TV_%d = %s (%d bits, %d admissible)", r, record.tv[:24], record.bits_used, record.admissible_count)
    return record


def naive_tv(T: GluingTable, r: int, bits: int = REFERENCE_BITS, integer_only: bool = False) -> BigReal:
    """Full (r-1)^e enumeration-and-sum, no pruning; an oracle for tv_invariant."""
    check_order(r)
    S = compute_skeleton(T)
    ctx = build_context(S, r, integer_only=integer_only)
    state = _StateSum(S, weight_system(r, bits))
    total = context_for(bits).mpf(0)
    for c in itertools.product(ctx.colors, repeat=S.e):
        if check_admissible(c, ctx):
            total += state.term(c)
    return total


def tv_sequence(
    T: GluingTable,
    r_min: int,
    r_max: int,
    policy: Optional[PrecisionPolicy] = None,
    threads: int = 1,
    integer_only: Optional[bool] = None,
    resume: Optional[TVSeries] = None,
    on_record: Optional[Callable[[TVRecord], None]] = None,
    label: str = "",
) -> TVSeries:
    """Records for every odd r in [r_min, r_max], carrying the sufficient width forward."""
    for bound in (r_min, r_max):
        if bound % 2 == 0:
            raise EvenOrderUnsupported(f"r bounds must be odd, got {bound}", r=bound)
    if r_min > r_max:
        raise ComputationError(f"empty range r_min={r_min} > r_max={r_max}")
    policy = policy or PrecisionPolicy()

    series = TVSeries(manifold_label=label or (resume.manifold_label if resume else ""))
    if resume is not None:
        series.target_limit = resume.target_limit
    bits = policy.initial_bits
    for r in range(r_min, r_max + 1, 2):
        done = resume.get(r) if resume is not None else None
        if done is not None:
            logger.info("r=%d already computed; keeping the stored record", r)
            series.add(done)
            bits = done.bits_used
            continue
        rec = tv_invariant(T, r, policy, integer_only=integer_only, threads=threads, starting_bits=bits)
        series.add(rec)
        bits = rec.bits_used
        if on_record is not None:
            on_record(rec)
    return series


__all__ = [
    "TVRecord",
    "TVSeries",
    "state_sum",
    "tv_invariant",
    "naive_tv",
    "tv_sequence",
]
