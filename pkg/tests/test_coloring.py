"""Unit tests for admissible colorings and the pruned backtracking search."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.services.coloring import (
    EnumStats,
    brute_force_admissible,
    build_context,
    check_admissible,
    context_from_triangles,
    count_admissible,
    enumerate_admissible,
    iter_admissible,
    merge_stats,
    order_edges,
)
from src.triangulation.examples import load_example
from src.triangulation.gluing import GluingTable
from src.triangulation.skeleton import compute_skeleton
from src.utils.errors import ComputationError, EvenOrderUnsupported
from tests.conftest import FAST_PATH, SMALL


class TestOrderEdges:
    @pytest.mark.parametrize("name", SMALL + ("lens_17",))
    def test_is_permutation(self, name: str) -> None:
        S = compute_skeleton(load_example(name))
        assert sorted(order_edges(S)) == list(range(S.e))


class TestBuildContext:
    def test_fast_path_selected(self, s3: GluingTable, s2xs1: GluingTable) -> None:
        assert build_context(compute_skeleton(s3), 7).integer_only
        assert not build_context(compute_skeleton(s2xs1), 7).integer_only

    def test_forced_fast_path_rejected(self, rp3: GluingTable) -> None:
        with pytest.raises(ComputationError):
            build_context(compute_skeleton(rp3), 7, integer_only=True)

    def test_small_r_rejected(self, s3: GluingTable) -> None:
        with pytest.raises(ComputationError):
            build_context(compute_skeleton(s3), 2)

    @pytest.mark.parametrize("r", [4, 6, 10])
    def test_even_r_rejected(self, s3: GluingTable, r: int) -> None:
        with pytest.raises(EvenOrderUnsupported):
            build_context(compute_skeleton(s3), r)

    def test_palette(self, s3: GluingTable) -> None:
        S = compute_skeleton(s3)
        assert list(build_context(S, 7, integer_only=True).colors) == [0, 2, 4]
        assert list(build_context(S, 7, integer_only=False).colors) == [0, 1, 2, 3, 4, 5]


class TestEnumerateAdmissible:
    @pytest.mark.parametrize("name", SMALL + ("lens_17",))
    @pytest.mark.parametrize("r", [3, 5, 7])
    def test_matches_brute_force(self, name: str, r: int) -> None:
        ctx = build_context(compute_skeleton(load_example(name)), r, integer_only=False)
        assert sorted(iter_admissible(ctx)) == brute_force_admissible(ctx)

    @pytest.mark.parametrize("name", FAST_PATH)
    @pytest.mark.parametrize("r", [5, 7, 9])
    def test_fast_path_matches_brute_force(self, name: str, r: int) -> None:
        ctx = build_context(compute_skeleton(load_example(name)), r, integer_only=True)
        assert sorted(iter_admissible(ctx)) == brute_force_admissible(ctx)

    @pytest.mark.parametrize("name", FAST_PATH)
    @pytest.mark.parametrize("r", [5, 7, 9])
    def test_general_mode_only_even_on_fast_path(self, name: str, r: int) -> None:
        S = compute_skeleton(load_example(name))
        general = list(iter_admissible(build_context(S, r, integer_only=False)))
        assert all(color % 2 == 0 for c in general for color in c)
        assert len(general) == count_admissible(build_context(S, r, integer_only=True))

    def test_r3_fast_path_single_coloring(self, s3: GluingTable) -> None:
        ctx = build_context(compute_skeleton(s3), 3)
        assert list(iter_admissible(ctx)) == [(0, 0)]
        assert count_admissible(ctx) == 1

    def test_every_result_is_admissible(self, lens_9: GluingTable) -> None:
        ctx = build_context(compute_skeleton(lens_9), 9, integer_only=False)
        assert all(check_admissible(c, ctx) for c in iter_admissible(ctx))

    def test_stats(self, lens_9: GluingTable) -> None:
        ctx = build_context(compute_skeleton(lens_9), 11)
        seen = []
        stats = enumerate_admissible(ctx, seen.append)
        assert stats.admissible_count == len(seen)
        assert stats.admissible_count <= stats.nodes_visited
        assert stats.wall_time >= 0

    def test_deterministic_order(self, lens_17: GluingTable) -> None:
        ctx = build_context(compute_skeleton(lens_17), 9)
        assert list(iter_admissible(ctx)) == list(iter_admissible(ctx))

    def test_partitions_merge(self, s2xs1: GluingTable) -> None:
        ctx = build_context(compute_skeleton(s2xs1), 9)
        whole = enumerate_admissible(ctx, lambda _c: None)
        parts = [enumerate_admissible(ctx, lambda _c: None, partitions=[color]) for color in ctx.colors]
        merged = merge_stats(parts)
        assert merged.admissible_count == whole.admissible_count
        assert merged.nodes_visited == whole.nodes_visited

    def test_nodes_monotone_in_r(self, lens_9: GluingTable) -> None:
        S = compute_skeleton(lens_9)
        nodes = [enumerate_admissible(build_context(S, r), lambda _c: None).nodes_visited for r in (5, 7, 9, 11)]
        assert nodes == sorted(nodes)


class TestSyntheticContexts:
    def test_single_triangle(self) -> None:
        ctx = context_from_triangles(5, [(0, 1, 2)])
        expected = brute_force_admissible(ctx)
        assert sorted(iter_admissible(ctx)) == expected
        assert (0, 0, 0) in expected
        assert (1, 1, 2) in expected

    def test_stats_default(self) -> None:
        assert EnumStats().to_dict() == {"nodes": 0, "adm": 0, "seconds": 0.0}

    @settings(max_examples=50, deadline=None)
    @given(
        e=st.integers(min_value=1, max_value=4),
        r=st.sampled_from([3, 5, 7]),
        data=st.data(),
    )
    def test_random_systems_match_brute_force(self, e: int, r: int, data: st.DataObject) -> None:
        triangles = data.draw(
            st.lists(st.tuples(*(st.integers(0, e - 1),) * 3), min_size=1, max_size=5),
        )
        order = data.draw(st.permutations(list(range(e))))
        ctx = context_from_triangles(r, triangles, e=e, order=order)
        assert sorted(iter_admissible(ctx)) == brute_force_admissible(ctx)
