"""Face skeleton of a generalized triangulation.

Vertex, edge and triangle classes are the transitive closure of the face
identifications, computed with union-find over the 4n tetrahedron corners and
the 6n tetrahedron edges. Class indices follow the smallest embedded
(tet, local index) representative, so numbering is reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from src.triangulation.gluing import GluingTable
from src.utils.errors import NotClosedManifoldLike

logger = logging.getLogger(__name__)

# Local edges of a tetrahedron, in index order.
LOCAL_EDGES: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_LOCAL_EDGE_INDEX: Dict[Tuple[int, int], int] = {pair: i for i, pair in enumerate(LOCAL_EDGES)}


def local_edge_index(a: int, b: int) -> int:
    return _LOCAL_EDGE_INDEX[(a, b) if a < b else (b, a)]


def face_vertices(f: int) -> Tuple[int, int, int]:
    """Sorted vertices of face f (the triangle omitting vertex f)."""
    return tuple(v for v in range(4) if v != f)  # type: ignore[return-value]


class UnionFind:
    """Union-find with path compression, union by rank and an optional parity.

    The parity of an element records whether it is identified with its root
    in the same (0) or reversed (1) direction. Corners ignore it.
    """

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))
        self.rank = [1] * size
        self.parity = [0] * size

    def find(self, a: int) -> int:
        if self.parent[a] != a:
            root = self.find(self.parent[a])
            self.parity[a] ^= self.parity[self.parent[a]]
            self.parent[a] = root
        return self.parent[a]

    def union(self, a: int, b: int, flip: int = 0) -> bool:
        """Merge a and b; return False if they already disagree on direction."""
        root_a, root_b = self.find(a), self.find(b)
        pa, pb = self.parity[a], self.parity[b]
        if root_a == root_b:
            return (pa ^ pb) == flip
        if self.rank[root_a] < self.rank[root_b]:
            root_a, root_b = root_b, root_a
        self.parent[root_b] = root_a
        self.parity[root_b] = pa ^ pb ^ flip
        if self.rank[root_a] == self.rank[root_b]:
            self.rank[root_a] += 1
        return True


@dataclass(frozen=True)
class TriangleClass:
    embeddings: Tuple[Tuple[int, int], Tuple[int, int]]
    # Edge classes of the sides ab, ac, bc of the first embedding (a < b < c).
    edges: Tuple[int, int, int]


@dataclass(frozen=True)
class Skeleton:
    n: int
    vertex_classes: Tuple[Tuple[Tuple[int, int], ...], ...]
    edge_classes: Tuple[Tuple[Tuple[int, int], ...], ...]
    triangle_classes: Tuple[TriangleClass, ...]
    tet_vertices: Tuple[Tuple[int, int, int, int], ...]
    tet_edges: Tuple[Tuple[int, ...], ...]
    tet_triangles: Tuple[Tuple[int, int, int, int], ...]

    @property
    def v(self) -> int:
        return len(self.vertex_classes)

    @property
    def e(self) -> int:
        return len(self.edge_classes)

    @property
    def f(self) -> int:
        return len(self.triangle_classes)

    @property
    def triangles(self) -> List[Tuple[int, int, int]]:
        return [tri.edges for tri in self.triangle_classes]

    def edge_degree(self, edge: int) -> int:
        return len(self.edge_classes[edge])

    def edge_index_of(self, tet: int, local_edge: int) -> int:
        return self.tet_edges[tet][local_edge]

    def edge_endpoints(self, edge: int) -> Tuple[int, int]:
        tet, local = self.edge_classes[edge][0]
        a, b = LOCAL_EDGES[local]
        return self.tet_vertices[tet][a], self.tet_vertices[tet][b]

    def counts(self) -> Tuple[int, int, int, int]:
        return self.v, self.e, self.f, self.n


def _classes(uf: UnionFind, size: int, per_tet: int) -> Tuple[List[List[Tuple[int, int]]], List[int]]:
    """Group elements by root, numbering classes by first appearance."""
    index_of_root: Dict[int, int] = {}
    classes: List[List[Tuple[int, int]]] = []
    class_of: List[int] = []
    for item in range(size):
        root = uf.find(item)
        if root not in index_of_root:
            index_of_root[root] = len(classes)
            classes.append([])
        idx = index_of_root[root]
        classes[idx].append(divmod(item, per_tet))
        class_of.append(idx)
    return classes, class_of


def compute_skeleton(T: GluingTable) -> Skeleton:
    n = T.n
    corners = UnionFind(4 * n)
    edges = UnionFind(6 * n)

    for t in range(n):
        for f in range(4):
            g = T.target(t, f)
            p = g.perm
            verts = face_vertices(f)
            for a in verts:
                corners.union(4 * t + a, 4 * g.tet + p[a])
            for i, a in enumerate(verts):
                for b in verts[i + 1:]:
                    flip = 1 if p[a] > p[b] else 0
                    ok = edges.union(6 * t + local_edge_index(a, b), 6 * g.tet + local_edge_index(p[a], p[b]), flip)
                    if not ok:
                        raise NotClosedManifoldLike(
                            f"edge {a}{b} of tetrahedron {t} is identified with itself in reverse",
                            tet=t,
                        )

    vertex_classes, vertex_of = _classes(corners, 4 * n, 4)
    edge_classes, edge_of = _classes(edges, 6 * n, 6)

    tet_vertices = tuple(tuple(vertex_of[4 * t: 4 * t + 4]) for t in range(n))
    tet_edges = tuple(tuple(edge_of[6 * t: 6 * t + 6]) for t in range(n))

    triangle_classes: List[TriangleClass] = []
    tet_triangles = [[-1] * 4 for _ in range(n)]
    for t in range(n):
        for f in range(4):
            if tet_triangles[t][f] >= 0:
                continue
            g = T.target(t, f)
            idx = len(triangle_classes)
            tet_triangles[t][f] = idx
            tet_triangles[g.tet][g.face] = idx
            a, b, c = face_vertices(f)
            sides = (
                tet_edges[t][local_edge_index(a, b)],
                tet_edges[t][local_edge_index(a, c)],
                tet_edges[t][local_edge_index(b, c)],
            )
            triangle_classes.append(TriangleClass(embeddings=((t, f), (g.tet, g.face)), edges=sides))

    skeleton = Skeleton(
        n=n,
        vertex_classes=tuple(tuple(c) for c in vertex_classes),
        edge_classes=tuple(tuple(c) for c in edge_classes),
        triangle_classes=tuple(triangle_classes),
        tet_vertices=tet_vertices,  # type: ignore[arg-type]
        tet_edges=tet_edges,
        tet_triangles=tuple(tuple(row) for row in tet_triangles),  # type: ignore[arg-type]
    )

    if skeleton.e != skeleton.n + skeleton.v:
        raise NotClosedManifoldLike(
            f"Euler relation fails: e={skeleton.e} but n+v={skeleton.n + skeleton.v}",
            v=skeleton.v,
            e=skeleton.e,
            n=skeleton.n,
        )
    logger.debug("skeleton v=%d e=%d f=%d n=%d", *skeleton.counts())
    return skeleton


__all__ = [
    "LOCAL_EDGES",
    "local_edge_index",
    "face_vertices",
    "UnionFind",
    "TriangleClass",
    "Skeleton",
    "compute_skeleton",
]
