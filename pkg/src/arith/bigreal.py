"""Binary multi-precision reals.

A BigReal is an mpmath `mpf` created by an `MPContext` fixed at one mantissa
width, so values of equal width combine at that width regardless of the
global `mpmath.mp` state. Contexts are cached per width.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Any, Tuple

from mpmath import libmp
from mpmath.ctx_mp import MPContext

MIN_BITS = 32

BigReal = Any  # mpmath mpf bound to a per-width context
MpfTuple = Tuple[int, int, int, int]


def is_valid_width(bits: int) -> bool:
    return bits >= MIN_BITS and bits & (bits - 1) == 0


@lru_cache(maxsize=None)
def context_for(bits: int) -> MPContext:
    if not is_valid_width(bits):
        raise ValueError(f"mantissa width must be a power of two >= {MIN_BITS}, got {bits}")
    ctx = MPContext()
    ctx.prec = bits
    return ctx


def width_of(x: BigReal) -> int:
    return x.context.prec


def to_tuple(x: BigReal) -> MpfTuple:
    """Raw mpf tuple; picklable, used to move values between processes."""
    return x._mpf_


def from_tuple(bits: int, raw: MpfTuple) -> BigReal:
    return context_for(bits).make_mpf(raw)


def to_decimal_string(x: BigReal, digits: int | None = None) -> str:
    """Decimal export with enough digits to reflect the mantissa width."""
    if digits is None:
        digits = max(17, int(width_of(x) * 0.30103))
    return libmp.to_str(x._mpf_, digits)


def relative_difference(a: BigReal, b: BigReal) -> float:
    ctx = a.context
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return float(ctx.fabs(a - b) / scale)


__all__ = [
    "MIN_BITS",
    "BigReal",
    "MpfTuple",
    "is_valid_width",
    "context_for",
    "width_of",
    "to_tuple",
    "from_tuple",
    "to_decimal_string",
    "relative_difference",
]
