"""Unit tests for the TV_r state sum and sequences over r."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.arith.bigreal import context_for, relative_difference
from src.arith.precision import PrecisionPolicy
from src.services.tv_engine import TVRecord, TVSeries, naive_tv, tv_invariant, tv_sequence
from src.triangulation.examples import EXAMPLES, load_example
from src.triangulation.gluing import GluingTable
from src.triangulation.moves import applicable_moves, apply_move
from src.utils.errors import ComputationError, EvenOrderUnsupported
from tests.conftest import FAST_PATH


def _s3_closed_form(r: int) -> float:
    return 2 / r * math.sin(2 * math.pi / r) ** 2


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def _random_walk(T: GluingTable, seed: int, steps: int = 3, extra: int = 2) -> GluingTable:
    """Seeded 2-3/3-2 walk that keeps at most T.n + extra tetrahedra."""
    rng = np.random.default_rng(seed)
    moved = T
    for _ in range(steps):
        moves = [m for m in applicable_moves(moved) if m[0] == "3-2" or moved.n < T.n + extra]
        if not moves:
            break
        kind, idx = moves[int(rng.integers(len(moves)))]
        moved = apply_move(moved, kind, idx)
    return moved


def _same_record(a: TVRecord, b: TVRecord) -> bool:
    if a.declared_zero or b.declared_zero:
        return a.declared_zero and b.declared_zero
    return _rel(a.value, b.value) < 1e-8


class TestTVInvariant:
    @pytest.mark.parametrize("r", [3, 5, 7, 9])
    def test_s3_closed_form(self, s3: GluingTable, policy: PrecisionPolicy, r: int) -> None:
        rec = tv_invariant(s3, r, policy)
        assert _rel(float(rec.tv), _s3_closed_form(r)) < 1e-9

    @pytest.mark.parametrize("r", [3, 5, 7, 9])
    def test_two_vertex_s3_closed_form(self, s3_two_vertex: GluingTable, policy: PrecisionPolicy, r: int) -> None:
        rec = tv_invariant(s3_two_vertex, r, policy)
        assert _rel(float(rec.tv), _s3_closed_form(r)) < 1e-9

    @pytest.mark.parametrize("r", [5, 7, 9])
    def test_s2xs1_is_one(self, s2xs1: GluingTable, policy: PrecisionPolicy, r: int) -> None:
        rec = tv_invariant(s2xs1, r, policy)
        assert _rel(float(rec.tv), 1.0) < 1e-9

    @pytest.mark.parametrize("name", ["s3", "s3_two_vertex", "s2xs1", "rp3", "lens_9"])
    @pytest.mark.parametrize("r", [5, 7, 9])
    def test_matches_naive_oracle(self, name: str, r: int, policy: PrecisionPolicy) -> None:
        T = load_example(name)
        rec = tv_invariant(T, r, policy)
        oracle = naive_tv(T, r)
        if rec.declared_zero:
            assert abs(float(oracle)) < 1e-9
        else:
            assert relative_difference(context_for(512).mpf(rec.tv), oracle) < 1e-10

    @pytest.mark.parametrize("name", FAST_PATH)
    @pytest.mark.parametrize("r", [5, 7, 9, 11])
    def test_fast_path_consistency(self, name: str, r: int, policy: PrecisionPolicy) -> None:
        T = load_example(name)
        fast = tv_invariant(T, r, policy, integer_only=True)
        general = tv_invariant(T, r, policy, integer_only=False)
        assert fast.admissible_count == general.admissible_count
        assert _rel(float(fast.tv), float(general.tv)) < 1e-12

    def test_thread_count_does_not_change_digits(self, lens_9: GluingTable, policy: PrecisionPolicy) -> None:
        one = tv_invariant(lens_9, 11, policy, threads=1)
        two = tv_invariant(lens_9, 11, policy, threads=2)
        assert one.tv == two.tv
        assert (one.admissible_count, one.nodes_visited) == (two.admissible_count, two.nodes_visited)

    def test_repeated_runs_identical(self, lens_17: GluingTable, policy: PrecisionPolicy) -> None:
        assert tv_invariant(lens_17, 7, policy).tv == tv_invariant(lens_17, 7, policy).tv

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize(
        "name, r",
        [(name, r) for name in sorted(EXAMPLES) if name != "lens_17" for r in (5, 7)]
        + [pytest.param("lens_17", r, marks=pytest.mark.slow) for r in (5, 7)]
        + [pytest.param(name, r, marks=pytest.mark.slow) for name in sorted(EXAMPLES) for r in (9, 11)],
    )
    def test_invariant_under_pachner_moves(self, name: str, r: int, seed: int, policy: PrecisionPolicy) -> None:
        T = load_example(name)
        moved = _random_walk(T, seed)
        if moved is T:
            pytest.skip(f"no 2-3 or 3-2 move applies to {name}")
        assert _same_record(tv_invariant(T, r, policy), tv_invariant(moved, r, policy))
    def test_even_r_rejected(self, s3: GluingTable) -> None:
        with pytest.raises(EvenOrderUnsupported):
            tv_invariant(s3, 8)

    def test_record_fields(self, s3: GluingTable, policy: PrecisionPolicy) -> None:
        rec = tv_invariant(s3, 7, policy)
        assert rec.r == 7
        assert rec.bits_used >= 128
        assert rec.admissible_count <= rec.nodes_visited
        assert rec.wall_time >= 0
        assert rec.timestamp


class TestTVRecord:
    def test_json_line_round_trip(self) -> None:
        rec = TVRecord(r=9, tv="0.125", declared_zero=False, bits_used=128, admissible_count=3,
                       nodes_visited=5, wall_time=1.5, timestamp="2026-01-01T00:00:00+00:00")
        assert TVRecord.from_json_line(rec.to_json_line()) == rec

    def test_value(self) -> None:
        zero = TVRecord(r=9, tv="0", declared_zero=True, bits_used=128, admissible_count=0,
                        nodes_visited=0, wall_time=0.0)
        assert zero.value == 0.0


class TestTVSeries:
    def _rec(self, r: int) -> TVRecord:
        return TVRecord(r=r, tv="1", declared_zero=False, bits_used=128, admissible_count=1,
                        nodes_visited=1, wall_time=0.0)

    def test_add_in_order(self) -> None:
        series = TVSeries()
        series.add(self._rec(5))
        series.add(self._rec(7))
        assert series.orders() == [5, 7]
        assert series.get(7) is not None
        assert series.get(9) is None

    def test_rejects_even_and_out_of_order(self) -> None:
        series = TVSeries()
        series.add(self._rec(7))
        with pytest.raises(EvenOrderUnsupported):
            series.add(self._rec(8))
        with pytest.raises(ComputationError):
            series.add(self._rec(5))


class TestTVSequence:
    def test_odd_orders(self, s3: GluingTable, policy: PrecisionPolicy) -> None:
        series = tv_sequence(s3, 3, 11, policy, label="S^3")
        assert series.orders() == [3, 5, 7, 9, 11]
        assert series.manifold_label == "S^3"
        for rec in series.records:
            assert _rel(float(rec.tv), _s3_closed_form(rec.r)) < 1e-9

    def test_even_bounds_rejected(self, s3: GluingTable) -> None:
        with pytest.raises(EvenOrderUnsupported):
            tv_sequence(s3, 4, 9)

    def test_empty_range_rejected(self, s3: GluingTable) -> None:
        with pytest.raises(ComputationError):
            tv_sequence(s3, 9, 5)

    def test_resume_keeps_stored_records(self, s3: GluingTable, policy: PrecisionPolicy) -> None:
        first = tv_sequence(s3, 3, 7, policy)
        computed = []
        resumed = tv_sequence(s3, 3, 11, policy, resume=first, on_record=computed.append)
        assert resumed.orders() == [3, 5, 7, 9, 11]
        assert [rec.r for rec in computed] == [9, 11]
        for r in (3, 5, 7):
            assert resumed.get(r) is first.get(r)


@pytest.mark.slow
class TestTVAcceptance:
    def test_closed_forms_up_to_51(self, s3: GluingTable, s2xs1: GluingTable, policy: PrecisionPolicy) -> None:
        for r in range(3, 52, 2):
            assert _rel(float(tv_invariant(s3, r, policy).tv), _s3_closed_form(r)) < 1e-9
            if r >= 5:
                assert _rel(float(tv_invariant(s2xs1, r, policy).tv), 1.0) < 1e-9

    def test_narrow_start_matches_reference(self, lens_9: GluingTable) -> None:
        narrow = tv_invariant(lens_9, 33, PrecisionPolicy(initial_bits=32))
        reference = tv_invariant(lens_9, 33, PrecisionPolicy(initial_bits=256))
        assert not narrow.declared_zero
        assert narrow.bits_used > 32
        assert _rel(narrow.value, 1 / 22) < 0.05
        assert _rel(narrow.value, reference.value) < 0.05
