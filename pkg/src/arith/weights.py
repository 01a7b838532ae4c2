"""Quantum-algebra weights for the TV state sum at the q̂ = 2 root of unity.

All colors are doubled (integers 0..r-2). With [n] = sin(2πn/r) / sin(2π/r)
and [n]! = [1][2]...[n]:

    vertex      η² = (2/r) sin²(2π/r)
    edge a      (-1)^a [a+1]
    triangle    (-1)^s [(a+b-c)/2]! [(b+c-a)/2]! [(c+a-b)/2]! / [s+1]!,  s = (a+b+c)/2
    tetrahedron Racah single sum over quantum factorials (see tet_weight)

Quantum factorials vanish from [r]! on, so only [0]!..[r-1]! are cached.
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Tuple

from src.arith.bigreal import BigReal, context_for
from src.config.settings import QHAT
from src.utils.errors import ComputationError, EvenOrderUnsupported, InadmissibleFace, InadmissibleTriple


def check_order(r: int) -> None:
    if r < 3:
        raise ComputationError(f"order r must be at least 3, got {r}", r=r)
    if r % 2 == 0:
        raise EvenOrderUnsupported(f"only odd r is supported with q̂={QHAT}, got r={r}", r=r)


def admissible_triple(a: int, b: int, c: int, r: int) -> bool:
    """Parity, triangle inequalities and the upper bound on doubled colors."""
    total = a + b + c
    return total % 2 == 0 and a <= b + c and b <= a + c and c <= a + b and total <= 2 * (r - 2)


def quantum_integer(n: int, r: int, bits: int) -> BigReal:
    ctx = context_for(bits)
    angle = 2 * ctx.pi / r
    return ctx.sin(angle * n) / ctx.sin(angle)


class WeightSystem:
    """Cached weights for one (r, bits) pair. Immutable after construction."""

    def __init__(self, r: int, bits: int) -> None:
        check_order(r)
        self.r = r
        self.qhat = QHAT
        self.bits = bits
        self.ctx = context_for(bits)
        ctx = self.ctx

        angle = 2 * ctx.pi / r
        base = ctx.sin(angle)
        self.qint: Tuple[BigReal, ...] = tuple(ctx.sin(angle * n) / base for n in range(r))
        qfact: List[BigReal] = [ctx.mpf(1)]
        for n in range(1, r):
            qfact.append(qfact[-1] * self.qint[n])
        self.qfact: Tuple[BigReal, ...] = tuple(qfact)
        self.eta2: BigReal = ctx.mpf(2) / r * base**2
        self.zero = ctx.mpf(0)

    def qfactorial(self, n: int) -> BigReal:
        return self.qfact[n] if n < self.r else self.zero

    def edge_weight(self, a: int) -> BigReal:
        w = self.qint[a + 1]
        return -w if a % 2 else w

    def triangle_weight(self, a: int, b: int, c: int) -> BigReal:
        if not admissible_triple(a, b, c, self.r):
            raise InadmissibleTriple(f"({a},{b},{c}) is not admissible at r={self.r}", triple=(a, b, c))
        s = (a + b + c) // 2
        w = (
            self.qfact[(a + b - c) // 2]
            * self.qfact[(b + c - a) // 2]
            * self.qfact[(c + a - b) // 2]
            / self.qfact[s + 1]
        )
        return -w if s % 2 else w

    def tet_weight(self, a: int, b: int, c: int, d: int, e: int, f: int) -> BigReal:
        """Racah sum for a tetrahedron with opposite pairs (a,d), (b,e), (c,f).

        Faces are (a,b,c), (a,e,f), (d,b,f), (d,e,c).
        """
        faces = ((a, b, c), (a, e, f), (d, b, f), (d, e, c))
        for face in faces:
            if not admissible_triple(*face, self.r):
                raise InadmissibleFace(f"face {face} is not admissible at r={self.r}", face=face)
        t = [sum(face) // 2 for face in faces]
        q = [(a + d + b + e) // 2, (a + d + c + f) // 2, (b + e + c + f) // 2]

        total = self.zero
        for z in range(max(t), min(q) + 1):
            numerator = self.qfactorial(z + 1)
            if numerator is self.zero:
                break
            denom = self.qfact[z - t[0]] * self.qfact[z - t[1]] * self.qfact[z - t[2]] * self.qfact[z - t[3]]
            denom *= self.qfact[q[0] - z] * self.qfact[q[1] - z] * self.qfact[q[2] - z]
            term = numerator / denom
            total += -term if z % 2 else term
        return total

    def vertex_weight(self) -> BigReal:
        return self.eta2


@lru_cache(maxsize=64)
def weight_system(r: int, bits: int) -> WeightSystem:
    return WeightSystem(r, bits)


def edge_weight(a: int, ws: WeightSystem) -> BigReal:
    return ws.edge_weight(a)


def triangle_weight(a: int, b: int, c: int, ws: WeightSystem) -> BigReal:
    return ws.triangle_weight(a, b, c)


def tet_weight(a: int, b: int, c: int, d: int, e: int, f: int, ws: WeightSystem) -> BigReal:
    return ws.tet_weight(a, b, c, d, e, f)


def vertex_weight(ws: WeightSystem) -> BigReal:
    return ws.vertex_weight()


__all__ = [
    "check_order",
    "admissible_triple",
    "quantum_integer",
    "WeightSystem",
    "weight_system",
    "edge_weight",
    "triangle_weight",
    "tet_weight",
    "vertex_weight",
]
