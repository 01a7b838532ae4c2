"""Unit tests for the precision-doubling driver."""

from __future__ import annotations

import pytest

from src.arith.bigreal import context_for
from src.arith.precision import (
    Evaluation,
    PrecisionPolicy,
    verify_against_reference,
    with_precision_doubling,
    within_reference,
)
from src.utils.errors import PrecisionCapExceeded


def _cancellation(bits: int) -> Evaluation:
    """(10^15 + 1) - 10^15: exactly 0 at 32 bits, exactly 1 from 64 bits on."""
    ctx = context_for(bits)
    big = ctx.mpf(10**15)
    bigger = ctx.mpf(10**15 + 1)
    return Evaluation(bigger - big, bigger + big)


class TestPrecisionPolicy:
    def test_defaults(self) -> None:
        policy = PrecisionPolicy()
        assert policy.initial_bits == 128
        assert policy.tau == 1e-6
        assert policy.max_bits == 1 << 16

    def test_rejects_bad_width(self) -> None:
        with pytest.raises(ValueError):
            PrecisionPolicy(initial_bits=100)

    def test_rejects_cap_below_start(self) -> None:
        with pytest.raises(ValueError):
            PrecisionPolicy(initial_bits=256, max_bits=128)

    def test_rejects_nonpositive_tau(self) -> None:
        with pytest.raises(ValueError):
            PrecisionPolicy(tau=0)


class TestWithPrecisionDoubling:
    def test_stable_value_needs_one_attempt(self) -> None:
        result = with_precision_doubling(lambda bits: context_for(bits).mpf(1) / 3, PrecisionPolicy(initial_bits=64))
        assert result.attempts == 1
        assert result.bits_used == 64
        assert not result.declared_zero
        assert float(result.value) == pytest.approx(1 / 3)

    def test_cancellation_escalates(self) -> None:
        policy = PrecisionPolicy(initial_bits=32, zero_threshold=1e-20)
        result = with_precision_doubling(_cancellation, policy)
        assert result.attempts == 2
        assert result.bits_used == 64
        assert float(result.value) == 1.0

    def test_starting_bits_override(self) -> None:
        policy = PrecisionPolicy(initial_bits=32, zero_threshold=1e-20)
        result = with_precision_doubling(_cancellation, policy, starting_bits=64)
        assert result.attempts == 1
        assert result.bits_used == 64

    def test_zero_declared(self) -> None:
        result = with_precision_doubling(
            lambda bits: Evaluation(context_for(bits).mpf(0), context_for(bits).mpf(1)),
            PrecisionPolicy(initial_bits=64),
        )
        assert result.declared_zero
        assert result.bits_used == 64
        assert result.value == 0

    def test_cap_exceeded(self) -> None:
        # The value depends on the width, so no two widths ever agree.
        with pytest.raises(PrecisionCapExceeded):
            with_precision_doubling(lambda bits: context_for(bits).mpf(bits), PrecisionPolicy(initial_bits=32, max_bits=256))


class TestReference:
    def test_reference_error(self) -> None:
        error = verify_against_reference(lambda bits: context_for(bits).sqrt(2), 64)
        assert error < 1e-15
        assert within_reference(error)

    def test_threshold(self) -> None:
        assert within_reference(0.049)
        assert not within_reference(0.05)


def _noisy(value: str, magnitude_exp: int, noise_exp: int):
    """value plus a rounding error of magnitude·2^(noise_exp - bits), over terms of size 2^magnitude_exp."""

    def compute(bits: int) -> Evaluation:
        ctx = context_for(bits)
        magnitude = ctx.ldexp(1, magnitude_exp)
        return Evaluation(ctx.mpf(value) + ctx.ldexp(1, magnitude_exp + noise_exp - bits), magnitude)

    return compute


class TestZeroDeclaration:
    def test_small_value_over_large_terms_is_kept(self) -> None:
        # 0.0947 over a term-magnitude sum near 3.6e17 is far below 1e-10 of it
        def compute(bits: int) -> Evaluation:
            ctx = context_for(bits)
            return Evaluation(ctx.mpf("0.0947062"), ctx.mpf("3.58e17"))

        result = with_precision_doubling(compute, PrecisionPolicy())
        assert not result.declared_zero
        assert float(result.value) == pytest.approx(0.0947062)
        assert result.bits_used == 128

    def test_value_hidden_at_narrow_width_escalates(self) -> None:
        result = with_precision_doubling(_noisy("0.0454545", 50, 4), PrecisionPolicy(initial_bits=32))
        assert not result.declared_zero
        assert result.bits_used > 32
        assert result.attempts >= 2
        assert float(result.value) == pytest.approx(1 / 22, rel=1e-4)

    def test_noise_floor_at_three_widths(self) -> None:
        result = with_precision_doubling(_noisy("0", 50, 4), PrecisionPolicy())
        assert result.declared_zero
        assert result.value == 0
        assert result.bits_used == 128
        assert result.attempts == 2

    def test_zero_threshold_gates_the_noise_floor(self) -> None:
        # 2^-10 is noise at 64 bits but not below 1e-30 of the terms, so the run starts one width later
        policy = PrecisionPolicy(initial_bits=32, zero_threshold=1e-30)
        result = with_precision_doubling(_noisy("0", 50, 4), policy)
        assert result.declared_zero
        assert result.bits_used == 64
        assert result.attempts == 3

    def test_exact_zero_at_both_widths(self) -> None:
        result = with_precision_doubling(lambda bits: context_for(bits).mpf(0), PrecisionPolicy())
        assert result.declared_zero
        assert result.attempts == 1
