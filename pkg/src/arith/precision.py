"""Precision-doubling driver.

A computation is run at b and 2b bits. When the two results agree to a
relative tolerance the 2b value is kept; otherwise both widths double and the
computation is repeated. A result is declared zero only once three
consecutive widths leave it at their rounding-noise floor, measured against
the sum of the magnitudes of its terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Optional, Union

from src.arith.bigreal import MIN_BITS, BigReal, is_valid_width, relative_difference
from src.config.settings import NOISE_SLACK_BITS, REFERENCE_REL_ERROR
from src.utils.errors import PrecisionCapExceeded

logger = logging.getLogger(__name__)


class Evaluation(NamedTuple):
    """A value together with the sum of magnitudes of the terms that produced it."""

    value: BigReal
    magnitude: BigReal


Computation = Callable[[int], Union[BigReal, Evaluation]]


@dataclass(frozen=True)
class PrecisionPolicy:
    initial_bits: int = 128
    tau: float = 1e-6
    zero_threshold: float = 1e-10
    max_bits: int = 1 << 16

    def __post_init__(self) -> None:
        if self.tau <= 0 or self.zero_threshold <= 0:
            raise ValueError("tau and zero_threshold must be positive")
        if not is_valid_width(self.initial_bits):
            raise ValueError(f"initial_bits must be a power of two >= {MIN_BITS}")
        if self.max_bits < self.initial_bits:
            raise ValueError("max_bits must be at least initial_bits")


@dataclass(frozen=True)
class DoublingResult:
    value: BigReal
    bits_used: int
    declared_zero: bool
    attempts: int


def _evaluate(compute: Computation, bits: int) -> Evaluation:
    result = compute(bits)
    if isinstance(result, Evaluation):
        return result
    return Evaluation(result, abs(result))


def _at_noise_floor(ev: Evaluation, bits: int) -> bool:
    """|value| is within the rounding noise a `bits`-wide evaluation can carry."""
    return abs(ev.value) <= ev.magnitude * ev.value.context.ldexp(1, NOISE_SLACK_BITS - bits)


def _negligible(ev: Evaluation, zero_threshold: float) -> bool:
    return abs(ev.value) <= zero_threshold * ev.magnitude


def with_precision_doubling(
    compute: Computation,
    policy: PrecisionPolicy,
    starting_bits: int | None = None,
) -> DoublingResult:
    """Evaluate at b and 2b bits, doubling until the two agree or the value is noise.

    Agreement within tau wins. Zero is declared when the value is exactly 0 at
    both widths, or when it sits at the noise floor of three consecutive widths
    while staying below zero_threshold times the term-magnitude sum.
    """
    bits = starting_bits or policy.initial_bits
    low = _evaluate(compute, bits)
    attempts = 0
    floor_since: Optional[int] = None
    while True:
        if 2 * bits > policy.max_bits:
            raise PrecisionCapExceeded(
                f"no agreement below the {policy.max_bits}-bit cap", bits=bits, max_bits=policy.max_bits
            )
        high = _evaluate(compute, 2 * bits)
        attempts += 1

        if low.value == 0 and high.value == 0:
            logger.info("value is exactly zero at %d/%d bits", bits, 2 * bits)
            return DoublingResult(value=high.value, bits_used=bits, declared_zero=True, attempts=attempts)
        if relative_difference(low.value, high.value) <= policy.tau:
            return DoublingResult(value=high.value, bits_used=bits, declared_zero=False, attempts=attempts)

        noise = (
            _at_noise_floor(low, bits)
            and _at_noise_floor(high, 2 * bits)
            and _negligible(high, policy.zero_threshold)
        )
        if noise and floor_since is not None:
            logger.info("value declared zero: noise floor from %d to %d bits", floor_since, 2 * bits)
            return DoublingResult(value=high.value * 0, bits_used=floor_since, declared_zero=True, attempts=attempts)
        floor_since = bits if noise else None

        logger.info("no agreement at %d/%d bits; doubling", bits, 2 * bits)
        bits *= 2
        low = high


def verify_against_reference(compute: Computation, bits: int, reference_bits: int = 256) -> float:
    """Relative error of compute(bits) against compute(reference_bits)."""
    value = _evaluate(compute, bits).value
    reference = _evaluate(compute, reference_bits).value
    return relative_difference(reference, value)


def within_reference(error: float) -> bool:
    return error < REFERENCE_REL_ERROR


__all__ = [
    "Evaluation",
    "Computation",
    "PrecisionPolicy",
    "DoublingResult",
    "with_precision_doubling",
    "verify_against_reference",
    "within_reference",
]
