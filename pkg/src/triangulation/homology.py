"""Z/2 homology of the skeleton via dense GF(2) elimination on numpy arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.triangulation.skeleton import Skeleton


@dataclass(frozen=True)
class HomologyInfo:
    h1_z2_rank: int
    is_one_vertex: bool

    @property
    def integer_fast_path_allowed(self) -> bool:
        return self.h1_z2_rank == 0 and self.is_one_vertex


def gf2_rank(M: np.ndarray) -> int:
    """Rank over GF(2) by row reduction with XOR row operations."""
    R = (np.asarray(M, dtype=np.uint8) % 2).copy()
    if R.size == 0:
        return 0
    m, ncols = R.shape
    pivot_row = 0
    for col in range(ncols):
        rows = np.nonzero(R[pivot_row:, col])[0]
        if rows.size == 0:
            continue
        found = pivot_row + int(rows[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        below = np.nonzero(R[pivot_row + 1:, col])[0] + pivot_row + 1
        R[below] ^= R[pivot_row]
        pivot_row += 1
        if pivot_row == m:
            break
    return pivot_row


def boundary_matrices(S: Skeleton) -> tuple[np.ndarray, np.ndarray]:
    """(d1, d2) over GF(2): d1 is v x e, d2 is e x f."""
    d1 = np.zeros((S.v, S.e), dtype=np.uint8)
    for edge in range(S.e):
        a, b = S.edge_endpoints(edge)
        d1[a, edge] ^= 1
        d1[b, edge] ^= 1

    d2 = np.zeros((S.e, S.f), dtype=np.uint8)
    for j, tri in enumerate(S.triangle_classes):
        for edge in tri.edges:
            d2[edge, j] ^= 1
    return d1, d2


def homology_z2(S: Skeleton) -> HomologyInfo:
    d1, d2 = boundary_matrices(S)
    nullity_d1 = S.e - gf2_rank(d1)
    rank = nullity_d1 - gf2_rank(d2)
    return HomologyInfo(h1_z2_rank=rank, is_one_vertex=S.v == 1)


__all__ = ["HomologyInfo", "gf2_rank", "boundary_matrices", "homology_z2"]
