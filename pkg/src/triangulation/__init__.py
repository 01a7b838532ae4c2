from src.triangulation.gluing import (
    FaceGluing,
    GluingTable,
    dump_triangulation,
    load_triangulation,
    parse_triangulation,
)
from src.triangulation.homology import HomologyInfo, homology_z2
from src.triangulation.moves import (
    applicable_moves,
    canonical_form,
    is_isomorphic,
    orientation_check,
    pachner_23,
    pachner_32,
)
from src.triangulation.skeleton import Skeleton, compute_skeleton

__all__ = [
    "FaceGluing",
    "GluingTable",
    "dump_triangulation",
    "load_triangulation",
    "parse_triangulation",
    "HomologyInfo",
    "homology_z2",
    "applicable_moves",
    "canonical_form",
    "is_isomorphic",
    "orientation_check",
    "pachner_23",
    "pachner_32",
    "Skeleton",
    "compute_skeleton",
]
