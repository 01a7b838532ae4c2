"""Pachner 2-3 and 3-2 moves, canonical relabelling and orientation checks.

Both moves are retriangulations of a small ball: the doomed tetrahedra are
removed and new ones are appended after the survivors. Every vertex of the
ball is given an abstract point label (N, S, X0, X1, X2), and each tetrahedron
of the ball, old or new, records which point sits at each of its local
vertices. Gluings of the new tetrahedra are then read off by matching faces
with equal point sets.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple

from src.triangulation.gluing import (
    ALL_PERMS,
    GluingTable,
    Perm,
    perm_compose,
    perm_inverse,
    perm_is_odd,
    table_from_rows,
)
from src.triangulation.skeleton import LOCAL_EDGES, Skeleton, compute_skeleton, face_vertices
from src.utils.errors import InputError, MoveNotApplicable

logger = logging.getLogger(__name__)

N, S, X0, X1, X2 = range(5)
Points = Tuple[int, int, int, int]


def _match(pts_from: Points, pts_to: Points) -> Perm:
    """Vertex map between two tetrahedra of the ball sharing (at least) a face.

    Shared points go to their position; the one unshared point goes to the
    leftover position.
    """
    images: List[Optional[int]] = [None] * 4
    for k, point in enumerate(pts_from):
        if point in pts_to:
            images[k] = pts_to.index(point)
    leftover = [i for i in range(4) if i not in images]
    for k in range(4):
        if images[k] is None:
            images[k] = leftover.pop()
    return tuple(images)  # type: ignore[return-value]


def _face_points(pts: Points, face: int) -> frozenset:
    return frozenset(p for k, p in enumerate(pts) if k != face)


def _retriangulate(T: GluingTable, doomed: Dict[int, Points], new_pts: Sequence[Points]) -> GluingTable:
    survivors = [t for t in range(T.n) if t not in doomed]
    new_index = {t: k for k, t in enumerate(survivors)}
    survive = len(survivors)

    # Where each boundary face of the ball ends up among the new tetrahedra.
    new_face_of: Dict[Tuple[int, int], Tuple[int, int]] = {}
    internal: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for i, pts in enumerate(new_pts):
        for l in range(4):
            points = _face_points(pts, l)
            partner = [
                (j, m)
                for j, other in enumerate(new_pts)
                for m in range(4)
                if (j, m) != (i, l) and _face_points(other, m) == points
            ]
            if partner:
                internal[(i, l)] = partner[0]
                continue
            old = [(d, fd) for d, d_pts in doomed.items() for fd in range(4) if _face_points(d_pts, fd) == points]
            if len(old) != 1:
                raise MoveNotApplicable("ball boundary does not match the new tetrahedra")
            new_face_of[old[0]] = (i, l)

    rows: List[List[Tuple[int, int, Perm]]] = []
    for t in survivors:
        row = []
        for f in range(4):
            g = T.target(t, f)
            if g.tet in doomed:
                i, l = new_face_of[(g.tet, g.face)]
                row.append((survive + i, l, perm_compose(_match(doomed[g.tet], new_pts[i]), g.perm)))
            else:
                row.append((new_index[g.tet], g.face, g.perm))
        rows.append(row)

    lookup = {v: k for k, v in new_face_of.items()}
    for i, pts in enumerate(new_pts):
        row = []
        for l in range(4):
            if (i, l) in internal:
                j, m = internal[(i, l)]
                row.append((survive + j, m, _match(pts, new_pts[j])))
                continue
            d, fd = lookup[(i, l)]
            chi = _match(pts, doomed[d])
            g = T.target(d, fd)
            if g.tet in doomed:
                j, m = new_face_of[(g.tet, g.face)]
                mu = _match(doomed[g.tet], new_pts[j])
                row.append((survive + j, m, perm_compose(mu, perm_compose(g.perm, chi))))
            else:
                row.append((new_index[g.tet], g.face, perm_compose(g.perm, chi)))
        rows.append(row)

    try:
        return table_from_rows(rows)
    except InputError as e:
        raise MoveNotApplicable(f"move produced an invalid triangulation: {e.message}") from e


def pachner_23(T: GluingTable, triangle_class: int, skeleton: Optional[Skeleton] = None) -> GluingTable:
    """Replace the two tetrahedra around a triangle by three around a new edge.

    The new edge is local edge 01 of each of the three appended tetrahedra.
    """
    S_ = skeleton or compute_skeleton(T)
    if not 0 <= triangle_class < S_.f:
        raise MoveNotApplicable(f"no triangle {triangle_class}", triangle=triangle_class)
    (t0, f0), (t1, f1) = S_.triangle_classes[triangle_class].embeddings
    if t0 == t1:
        raise MoveNotApplicable(
            f"triangle {triangle_class} has both sides on tetrahedron {t0}", triangle=triangle_class
        )

    g = T.target(t0, f0)
    verts = face_vertices(f0)
    pts0 = [0] * 4
    pts1 = [0] * 4
    pts0[f0] = N
    pts1[f1] = S
    for m, a in enumerate(verts):
        pts0[a] = X0 + m
        pts1[g.perm[a]] = X0 + m

    xs = (X0, X1, X2)
    new_pts: List[Points] = []
    for i in range(3):
        p, q = xs[(i + 1) % 3], xs[(i + 2) % 3]
        new_pts.append((N, S, q, p) if f0 % 2 else (N, S, p, q))

    result = _retriangulate(T, {t0: tuple(pts0), t1: tuple(pts1)}, new_pts)  # type: ignore[dict-item]
    logger.debug("2-3 move on triangle %d: %d -> %d tetrahedra", triangle_class, T.n, result.n)
    return result


def _walk_degree_three(T: GluingTable, S_: Skeleton, edge_class: int) -> Dict[int, Points]:
    embeddings = S_.edge_classes[edge_class]
    if len(embeddings) != 3:
        raise MoveNotApplicable(f"edge {edge_class} has degree {len(embeddings)}, not 3", edge=edge_class)
    if len({t for t, _ in embeddings}) != 3:
        raise MoveNotApplicable(f"edge {edge_class} does not lie in three distinct tetrahedra", edge=edge_class)

    ta, local = embeddings[0]
    u, v = LOCAL_EDGES[local]
    w, z = (k for k in range(4) if k not in (u, v))
    pts_a = [0] * 4
    pts_a[u], pts_a[v], pts_a[w], pts_a[z] = N, S, X0, X1

    gb = T.target(ta, z)
    pts_b = [0] * 4
    for k in (u, v, w):
        pts_b[gb.perm[k]] = pts_a[k]
    pts_b[gb.face] = X2

    gc = T.target(gb.tet, pts_b.index(X0))
    pts_c = [0] * 4
    for k in range(4):
        if pts_b[k] != X0:
            pts_c[gc.perm[k]] = pts_b[k]
    pts_c[gc.face] = X1

    # The third tetrahedron must close up back onto the first.
    back = T.target(gc.tet, pts_c.index(X2))
    closes = (
        back.tet == ta
        and back.face == w
        and all(back.perm[k] == pts_a.index(pts_c[k]) for k in range(4) if pts_c[k] != X2)
    )
    if not closes or len({ta, gb.tet, gc.tet}) != 3:
        raise MoveNotApplicable(f"tetrahedra around edge {edge_class} do not form a ball", edge=edge_class)
    return {ta: tuple(pts_a), gb.tet: tuple(pts_b), gc.tet: tuple(pts_c)}  # type: ignore[dict-item]


def pachner_32(T: GluingTable, edge_class: int, skeleton: Optional[Skeleton] = None) -> GluingTable:
    """Replace the three tetrahedra around a degree-three edge by two."""
    S_ = skeleton or compute_skeleton(T)
    if not 0 <= edge_class < S_.e:
        raise MoveNotApplicable(f"no edge {edge_class}", edge=edge_class)
    doomed = _walk_degree_three(T, S_, edge_class)

    ta, local = S_.edge_classes[edge_class][0]
    u, v = LOCAL_EDGES[local]
    w, z = (k for k in range(4) if k not in (u, v))
    top: Points = (N, X0, X1, X2)
    bottom: Points = (S, X0, X2, X1)
    if perm_is_odd((u, v, w, z)):
        top, bottom = (N, X0, X2, X1), (S, X0, X1, X2)

    result = _retriangulate(T, doomed, [top, bottom])
    logger.debug("3-2 move on edge %d: %d -> %d tetrahedra", edge_class, T.n, result.n)
    return result


def applicable_moves(T: GluingTable, skeleton: Optional[Skeleton] = None) -> List[Tuple[str, int]]:
    """Every ("2-3", triangle) and ("3-2", edge) move that can be applied to T."""
    S_ = skeleton or compute_skeleton(T)
    moves: List[Tuple[str, int]] = []
    for idx, tri in enumerate(S_.triangle_classes):
        if tri.embeddings[0][0] != tri.embeddings[1][0]:
            moves.append(("2-3", idx))
    for idx in range(S_.e):
        if S_.edge_degree(idx) != 3:
            continue
        try:
            _walk_degree_three(T, S_, idx)
        except MoveNotApplicable:
            continue
        moves.append(("3-2", idx))
    return moves


def apply_move(T: GluingTable, kind: str, index: int, skeleton: Optional[Skeleton] = None) -> GluingTable:
    if kind == "2-3":
        return pachner_23(T, index, skeleton)
    if kind == "3-2":
        return pachner_32(T, index, skeleton)
    raise MoveNotApplicable(f"unknown move {kind!r}")


# Isomorphism ----------------------------------------------------------------------
Encoding = Tuple[Tuple[int, int, Perm], ...]


def _relabel_from(T: GluingTable, start: int, start_perm: Perm) -> Encoding:
    """Encode T after BFS relabelling from `start`, whose vertices are relabelled by start_perm."""
    image = {start: 0}
    relabel: Dict[int, Perm] = {start: start_perm}
    order = [start]
    out: List[Tuple[int, int, Perm]] = []
    k = 0
    while k < len(order):
        t = order[k]
        pi = relabel[t]
        pi_inv = perm_inverse(pi)
        for new_face in range(4):
            g = T.target(t, pi_inv[new_face])
            if g.tet not in image:
                image[g.tet] = len(order)
                order.append(g.tet)
                # Choose the neighbour's labelling so this gluing reads as the identity.
                relabel[g.tet] = perm_compose(pi, perm_inverse(g.perm))
            perm = perm_compose(relabel[g.tet], perm_compose(g.perm, pi_inv))
            out.append((image[g.tet], relabel[g.tet][g.face], perm))
        k += 1
    return tuple(out)


def canonical_form(T: GluingTable) -> GluingTable:
    best: Optional[Encoding] = None
    for start in range(T.n):
        for perm in ALL_PERMS:
            enc = _relabel_from(T, start, perm)
            if best is None or enc < best:
                best = enc
    assert best is not None
    return table_from_rows([best[4 * t: 4 * t + 4] for t in range(T.n)])


def is_isomorphic(T1: GluingTable, T2: GluingTable) -> bool:
    if T1.n != T2.n:
        return False
    return canonical_form(T1).gluings == canonical_form(T2).gluings


def orientation_check(T: GluingTable) -> bool:
    """Best-effort test that all gluings reverse a common orientation."""
    sign: Dict[int, int] = {0: 1}
    queue = deque([0])
    coherent = True
    while queue:
        t = queue.popleft()
        for f in range(4):
            g = T.target(t, f)
            parity = -1 if perm_is_odd(g.perm) else 1
            expected = -sign[t] * parity
            if g.tet not in sign:
                sign[g.tet] = expected
                queue.append(g.tet)
            elif sign[g.tet] != expected:
                coherent = False
    if not coherent:
        logger.warning("gluings are not orientation-coherent; continuing without an orientation")
    return coherent


__all__ = [
    "pachner_23",
    "pachner_32",
    "applicable_moves",
    "apply_move",
    "canonical_form",
    "is_isomorphic",
    "orientation_check",
]
