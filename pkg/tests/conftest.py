"""Pytest configuration and shared fixtures."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

# Ensure project root is on path when running: pytest tests/
_root = Path(__file__).resolve().parent.parent
if str(_root) not in sys.path:
    sys.path.insert(0, str(_root))

from src.arith.precision import PrecisionPolicy  # noqa: E402
from src.triangulation.examples import load_example  # noqa: E402
from src.triangulation.gluing import GluingTable  # noqa: E402

# Bundled triangulations with one vertex and H1(M; Z/2) = 0.
FAST_PATH = ("s3", "lens_9", "lens_17")
SMALL = ("s3", "s3_two_vertex", "s2xs1", "rp3", "lens_9")


@pytest.fixture
def s3() -> GluingTable:
    return load_example("s3")


@pytest.fixture
def s3_two_vertex() -> GluingTable:
    return load_example("s3_two_vertex")


@pytest.fixture
def s2xs1() -> GluingTable:
    return load_example("s2xs1")


@pytest.fixture
def rp3() -> GluingTable:
    return load_example("rp3")


@pytest.fixture
def lens_9() -> GluingTable:
    return load_example("lens_9")


@pytest.fixture
def lens_17() -> GluingTable:
    return load_example("lens_17")


@pytest.fixture
def policy() -> PrecisionPolicy:
    return PrecisionPolicy(initial_bits=128)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep TVR_* variables from the caller's shell out of the tests."""
    for key in (
        "TVR_BITS",
        "TVR_TAU",
        "TVR_ZERO_THRESHOLD",
        "TVR_MAX_BITS",
        "TVR_THREADS",
        "TVR_SEED",
        "TVR_MC_SAMPLES",
        "TVR_OPTIMIZE_STEPS",
        "TVR_LOG_LEVEL",
    ):
        monkeypatch.delenv(key, raising=False)
