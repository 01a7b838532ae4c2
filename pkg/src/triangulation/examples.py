"""Bundled closed triangulations shipped in data/triangulations."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

from src.triangulation.gluing import GluingTable, load_triangulation
from src.utils.errors import MalformedInput

DATA_PATH = Path(__file__).resolve().parents[2] / "data" / "triangulations"


@dataclass(frozen=True)
class BundledExample:
    name: str
    label: str
    counts: Tuple[int, int, int, int]  # (v, e, f, n)
    h1_z2_rank: int
    description: str = ""

    @property
    def path(self) -> Path:
        return DATA_PATH / f"{self.name}.json"

    def load(self) -> GluingTable:
        return load_triangulation(self.path)


EXAMPLES: Dict[str, BundledExample] = {
    ex.name: ex
    for ex in (
        BundledExample("s3", "S^3", (1, 2, 2, 1), 0, "one-tetrahedron 3-sphere"),
        BundledExample("s3_two_vertex", "S^3", (2, 3, 2, 1), 0, "two-vertex 3-sphere from one tetrahedron"),
        BundledExample("s2xs1", "S^2 x S^1", (1, 3, 4, 2), 1, "two-tetrahedron S^2 x S^1"),
        BundledExample("rp3", "RP^3", (1, 3, 4, 2), 1, "layered lens space L(2,1)"),
        BundledExample("lens_9", "L(9,q)", (1, 4, 6, 3), 0, "layered lens space, H1 = Z/9"),
        BundledExample("lens_17", "L(17,q)", (1, 6, 10, 5), 0, "layered lens space, H1 = Z/17; graph manifold"),
    )
}


def list_examples() -> List[BundledExample]:
    return list(EXAMPLES.values())


def load_example(name: str) -> GluingTable:
    try:
        return EXAMPLES[name].load()
    except KeyError:
        raise MalformedInput(f"unknown bundled triangulation {name!r}; choose from {sorted(EXAMPLES)}") from None


__all__ = ["DATA_PATH", "BundledExample", "EXAMPLES", "list_examples", "load_example"]
