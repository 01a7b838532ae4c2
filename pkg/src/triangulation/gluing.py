"""Gluing tables of generalized triangulations: parsing, validation, serialization.

A table lists, for each tetrahedron t and each face f (the triangle omitting
vertex f), the target (tet, face, perm) where perm maps vertex labels of t to
vertex labels of the target tetrahedron.

File format (UTF-8 JSON, no comments):

    {"tetrahedra": n,
     "gluings": [[g0, g1, g2, g3], ...]}

with each gi either null or {"tet": int, "face": int, "perm": [p0, p1, p2, p3]}.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.utils.errors import (
    MalformedInput,
    NonInvolutiveGluing,
    SelfGluedFace,
    UngluedFace,
)

Perm = Tuple[int, int, int, int]

IDENTITY: Perm = (0, 1, 2, 3)
ALL_PERMS: Tuple[Perm, ...] = tuple(permutations(range(4)))  # type: ignore[assignment]


# Permutation helpers -----------------------------------------------------------
def perm_inverse(p: Sequence[int]) -> Perm:
    inv = [0, 0, 0, 0]
    for i, image in enumerate(p):
        inv[image] = i
    return tuple(inv)  # type: ignore[return-value]


def perm_compose(a: Sequence[int], b: Sequence[int]) -> Perm:
    """a after b: x -> a[b[x]]."""
    return tuple(a[b[x]] for x in range(4))  # type: ignore[return-value]


def perm_is_odd(p: Sequence[int]) -> bool:
    inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
    return inversions % 2 == 1


@dataclass(frozen=True)
class FaceGluing:
    tet: int
    face: int
    perm: Perm

    def to_json(self) -> Dict[str, Any]:
        return {"tet": self.tet, "face": self.face, "perm": list(self.perm)}


@dataclass(frozen=True)
class GluingTable:
    """A validated closed generalized triangulation.

    Construction checks every invariant: closedness, no self-glued face,
    involution of the face pairing, connectivity.
    """

    n: int
    gluings: Tuple[Tuple[FaceGluing, ...], ...]

    def __post_init__(self) -> None:
        validate_gluings(self.n, self.gluings)

    def target(self, tet: int, face: int) -> FaceGluing:
        return self.gluings[tet][face]

    def to_json(self) -> Dict[str, Any]:
        return {
            "tetrahedra": self.n,
            "gluings": [[g.to_json() for g in row] for row in self.gluings],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


# Validation ------------------------------------------------------------------
def validate_gluings(n: int, gluings: Sequence[Sequence[Optional[FaceGluing]]]) -> None:
    if n < 1:
        raise MalformedInput("a triangulation needs at least one tetrahedron")
    if len(gluings) != n:
        raise MalformedInput(f"expected {n} gluing rows, found {len(gluings)}")

    for t, row in enumerate(gluings):
        if len(row) != 4:
            raise MalformedInput(f"tetrahedron {t} has {len(row)} faces listed, expected 4")
        for f, g in enumerate(row):
            if g is None:
                raise UngluedFace(f"face {f} of tetrahedron {t} is unglued", tet=t, face=f)
            if not 0 <= g.tet < n or not 0 <= g.face < 4:
                raise MalformedInput(f"gluing of ({t},{f}) points outside the table", tet=t, face=f)
            if sorted(g.perm) != [0, 1, 2, 3]:
                raise MalformedInput(f"gluing of ({t},{f}) has a non-permutation {list(g.perm)}")
            if (g.tet, g.face) == (t, f):
                raise SelfGluedFace(f"face {f} of tetrahedron {t} is glued to itself", tet=t, face=f)
            if g.perm[f] != g.face:
                raise NonInvolutiveGluing(
                    f"perm of ({t},{f}) sends vertex {f} to {g.perm[f]}, not to face {g.face}",
                    tet=t,
                    face=f,
                )

    for t, row in enumerate(gluings):
        for f, g in enumerate(row):
            back = gluings[g.tet][g.face]
            assert back is not None
            if (back.tet, back.face) != (t, f) or back.perm != perm_inverse(g.perm):
                raise NonInvolutiveGluing(
                    f"gluing ({t},{f}) -> ({g.tet},{g.face}) is not matched by its reverse",
                    tet=t,
                    face=f,
                )

    if not _is_connected(n, gluings):
        raise MalformedInput("triangulation is disconnected")


def _is_connected(n: int, gluings: Sequence[Sequence[Optional[FaceGluing]]]) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for g in gluings[t]:
            if g is not None and g.tet not in seen:
                seen.add(g.tet)
                queue.append(g.tet)
    return len(seen) == n


def is_connected(T: GluingTable) -> bool:
    return _is_connected(T.n, T.gluings)


# Parsing ---------------------------------------------------------------------
def _as_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedInput(f"{what} must be an integer, got {value!r}")
    return value


def _parse_gluing(raw: Any, t: int, f: int) -> Optional[FaceGluing]:
    if raw is None:
        return None
    if not isinstance(raw, dict) or set(raw) != {"tet", "face", "perm"}:
        raise MalformedInput(f"gluing ({t},{f}) must be null or an object with tet, face, perm")
    perm = raw["perm"]
    if not isinstance(perm, list) or len(perm) != 4:
        raise MalformedInput(f"gluing ({t},{f}) perm must be a list of four integers")
    return FaceGluing(
        tet=_as_int(raw["tet"], f"gluing ({t},{f}) tet"),
        face=_as_int(raw["face"], f"gluing ({t},{f}) face"),
        perm=tuple(_as_int(p, f"gluing ({t},{f}) perm entry") for p in perm),  # type: ignore[arg-type]
    )


def parse_triangulation(text: str) -> GluingTable:
    """Parse triangulation-file contents into a validated GluingTable."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e

    if not isinstance(data, dict) or "tetrahedra" not in data or "gluings" not in data:
        raise MalformedInput('expected an object with "tetrahedra" and "gluings"')
    n = _as_int(data["tetrahedra"], "tetrahedra")
    rows = data["gluings"]
    if not isinstance(rows, list):
        raise MalformedInput('"gluings" must be a list')

    gluings: List[Tuple[Optional[FaceGluing], ...]] = []
    for t, row in enumerate(rows):
        if not isinstance(row, list):
            raise MalformedInput(f"gluing row {t} must be a list")
        gluings.append(tuple(_parse_gluing(raw, t, f) for f, raw in enumerate(row)))

    validate_gluings(n, gluings)
    return GluingTable(n=n, gluings=tuple(gluings))  # type: ignore[arg-type]


def load_triangulation(path: Union[str, Path]) -> GluingTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise MalformedInput(f"cannot read {path}: {e}") from e
    return parse_triangulation(text)


def dump_triangulation(T: GluingTable, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(T.to_json(), indent=2) + "\n", encoding="utf-8")


def table_from_rows(rows: Sequence[Sequence[Tuple[int, int, Sequence[int]]]]) -> GluingTable:
    """Build a table from plain (tet, face, perm) triples; used by moves and bundled examples."""
    gluings = tuple(
        tuple(FaceGluing(tet=t, face=f, perm=tuple(p)) for (t, f, p) in row)  # type: ignore[arg-type]
        for row in rows
    )
    return GluingTable(n=len(gluings), gluings=gluings)


__all__ = [
    "Perm",
    "IDENTITY",
    "ALL_PERMS",
    "perm_inverse",
    "perm_compose",
    "perm_is_odd",
    "FaceGluing",
    "GluingTable",
    "validate_gluings",
    "is_connected",
    "parse_triangulation",
    "load_triangulation",
    "dump_triangulation",
    "table_from_rows",
]
