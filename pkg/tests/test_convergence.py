"""Unit tests for log-quantities, S_r and the convergence summaries."""

from __future__ import annotations

import csv
import io
import math
from typing import Optional, Sequence

import pytest

from src.arith.precision import PrecisionPolicy
from src.services.convergence import (
    aggregate_s_r,
    growth_constant,
    liminf_limsup_tail,
    log_points,
    log_quantity,
    s_r,
    series_to_csv,
    zero_orders,
)
from src.services.fitting import fit_constant, fit_model1
from src.services.tv_engine import TVRecord, TVSeries, tv_sequence
from src.triangulation.gluing import GluingTable
from src.utils.errors import ConventionViolation, MissingTarget


def _record(r: int, y: Optional[float]) -> TVRecord:
    """A record whose (2π/r)·log TV_r equals y; None makes a declared zero."""
    if y is None:
        return TVRecord(r=r, tv="0", declared_zero=True, bits_used=128, admissible_count=1,
                        nodes_visited=1, wall_time=0.0)
    return TVRecord(r=r, tv=repr(math.exp(y * r / (2 * math.pi))), declared_zero=False, bits_used=128,
                    admissible_count=1, nodes_visited=1, wall_time=0.0)


def _series(values: Sequence[Optional[float]], start: int = 5, target: Optional[float] = None) -> TVSeries:
    series = TVSeries(manifold_label="synthetic", target_limit=target)
    for k, y in enumerate(values):
        series.add(_record(start + 2 * k, y))
    return series


class TestLogQuantity:
    def test_one_gives_zero(self) -> None:
        rec = TVRecord(r=7, tv="1", declared_zero=False, bits_used=128, admissible_count=1,
                       nodes_visited=1, wall_time=0.0)
        assert log_quantity(rec) == 0.0

    def test_inverse_of_exponential(self) -> None:
        assert log_quantity(_record(11, 1.0)) == pytest.approx(1.0, rel=1e-12)

    def test_declared_zero_is_absent(self) -> None:
        assert log_quantity(_record(9, None)) is None

    def test_negative_value(self) -> None:
        rec = TVRecord(r=9, tv="-0.5", declared_zero=False, bits_used=128, admissible_count=1,
                       nodes_visited=1, wall_time=0.0)
        with pytest.raises(ConventionViolation):
            log_quantity(rec)


class TestSr:
    def test_single_point(self) -> None:
        assert s_r(_series([0.3]), target=0.1) == [(5, pytest.approx(0.2))]

    def test_nonincreasing(self) -> None:
        values = [0.5, -0.1, 0.3, 0.05, -0.02, 0.01]
        out = s_r(_series(values, target=0.0))
        tail = [v for _r, v in out]
        assert tail == sorted(tail, reverse=True)
        assert tail[0] == pytest.approx(0.5)
        assert tail[-1] == pytest.approx(0.01)

    def test_exact_target(self) -> None:
        out = s_r(_series([0.7, 0.7, 0.7], target=0.7))
        assert all(v == pytest.approx(0.0, abs=1e-12) for _r, v in out)

    def test_skips_zero_orders(self) -> None:
        series = _series([0.2, None, 0.1], target=0.0)
        assert [r for r, _v in s_r(series)] == [5, 9]
        assert zero_orders(series) == [7]

    def test_missing_target(self) -> None:
        with pytest.raises(MissingTarget):
            s_r(_series([0.1, 0.2]))

    def test_explicit_target_overrides_series(self) -> None:
        series = _series([0.4], target=0.0)
        assert s_r(series, target=0.4)[0][1] == pytest.approx(0.0, abs=1e-12)


class TestSummaries:
    def test_log_points(self) -> None:
        points = log_points(_series([0.1, None, 0.3]))
        assert [r for r, _y in points] == [5, 9]

    def test_growth_constant(self) -> None:
        series = _series([0.2, -0.4])
        expected = max(0.2 * 5 / math.log(5), 0.4 * 7 / math.log(7))
        assert growth_constant(series) == pytest.approx(expected, rel=1e-9)
        assert growth_constant(_series([None])) is None

    def test_liminf_limsup_tail(self) -> None:
        series = _series([5.0, 0.1, 0.3, 0.2])
        assert liminf_limsup_tail(series, 3) == (pytest.approx(0.1), pytest.approx(0.3))
        with pytest.raises(ValueError):
            liminf_limsup_tail(series, 0)

    def test_aggregate(self) -> None:
        a = _series([0.5, 0.4, 0.3, 0.2, 0.1], target=0.0)
        b = _series([0.3, 0.2, 0.1, 0.05, 0.01], target=0.0)
        curve = aggregate_s_r([a, b])
        assert curve.orders == (5, 7, 9, 11, 13)
        assert curve.maximum[0] == pytest.approx(0.5)
        assert curve.median[0] == pytest.approx(0.4)
        assert curve.fit_maximum is not None
        assert curve.to_dict()["r"] == [5, 7, 9, 11, 13]

    def test_aggregate_too_short_to_fit(self) -> None:
        curve = aggregate_s_r([_series([0.3, 0.2], target=0.0)])
        assert curve.fit_maximum is None


class TestSeriesToCsv:
    def test_columns_and_rows(self) -> None:
        series = _series([0.2, None, 0.1], target=0.0)
        rows = list(csv.reader(io.StringIO(series_to_csv(series))))
        assert rows[0] == ["r", "tv", "log_quantity", "s_r"]
        assert len(rows) == 4
        assert rows[2][2] == "" and rows[2][3] == ""
        assert float(rows[3][3]) == pytest.approx(0.1)

    def test_without_target(self) -> None:
        rows = list(csv.reader(io.StringIO(series_to_csv(_series([0.2])))))
        assert rows[1][3] == ""


@pytest.mark.slow
class TestLensSpaceConvergence:
    def test_lens_17_decays_towards_zero(self, lens_17: GluingTable, policy: PrecisionPolicy) -> None:
        series = tv_sequence(lens_17, 11, 51, policy)
        curve = s_r(series, target=0.0)
        (first_r, first), (last_r, last) = curve[0], curve[-1]
        assert first_r <= 13 and last_r >= 49
        assert last <= first / 2

        points = log_points(series)
        assert fit_model1(points).rss < fit_constant(points).rss
