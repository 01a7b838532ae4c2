"""Pydantic settings and computation constants."""
from __future__ import annotations

import os
from typing import TYPE_CHECKING

from pydantic import BaseModel, Field, field_validator

if TYPE_CHECKING:
    from src.arith.precision import PrecisionPolicy

# Weight system root: quantum integers use sin(2*pi*n/r)
QHAT = 2

# Even dilations give an honest polynomial (vertices of P_T are half-integral)
DEFAULT_DILATIONS = (2, 4, 6, 8, 10, 12)

FIT_GRID_POINTS = 400
GOLDEN_REL_TOL = 1e-6
REFERENCE_BITS = 512
MIN_MC_SAMPLES = 10_000

# Correctness threshold when comparing against a wider reference
REFERENCE_REL_ERROR = 0.05

# Rounding noise of a b-bit state sum is taken to stay below magnitude·2^(NOISE_SLACK_BITS - b)
NOISE_SLACK_BITS = 16


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


class Settings(BaseModel):
    initial_bits: int = Field(default=128, description="Starting mantissa width for TV evaluation")
    tau: float = Field(default=1e-6, description="Relative agreement threshold between b and 2b bits")
    zero_threshold: float = Field(
        default=1e-10, description="TV declared zero below this fraction of the term-magnitude sum"
    )
    max_bits: int = Field(default=1 << 16, description="Precision cap; escalating past it is an error")
    threads: int = Field(default_factory=_default_threads, description="Worker count for partitioned sums")
    seed: int = Field(default=0, description="Seed for Monte-Carlo sampling and random move walks")
    mc_samples: int = Field(default=200_000, description="Monte-Carlo samples for volume estimates")
    optimize_steps: int = Field(default=200, description="Random 2-3/3-2 walk length")
    size_cap_factor: int = Field(default=3, description="Walk never exceeds this multiple of the input size")
    log_level: str = Field(default="WARNING", description="Logging level for the CLI")

    @field_validator("tau", "zero_threshold")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("initial_bits", "max_bits")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value < 32 or value & (value - 1):
            raise ValueError("mantissa widths must be powers of two, at least 32")
        return value

    @field_validator("threads", "size_cap_factor")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    def precision_policy(self) -> "PrecisionPolicy":
        from src.arith.precision import PrecisionPolicy

        return PrecisionPolicy(
            initial_bits=self.initial_bits,
            tau=self.tau,
            zero_threshold=self.zero_threshold,
            max_bits=self.max_bits,
        )
