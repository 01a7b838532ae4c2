"""Admissibility polytope P_T and its volume.

P_T lives in edge space: 0 <= x_i <= 1/2 for every edge and, for every
triangle with sides (i, j, k), x_i <= x_j + x_k (and permutations) and
x_i + x_j + x_k <= 1. Repeated sides are substituted before the rows are
collected. Lattice points of (r-2)·P_T are the integer admissible colorings.

The volume (leading Ehrhart coefficient) is estimated two ways: a polynomial
fit of lattice-point counts on even dilations, and Monte-Carlo rejection
sampling in the bounding box [0, 1/2]^e.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config.settings import DEFAULT_DILATIONS, MIN_MC_SAMPLES
from src.services.coloring import build_context, count_admissible
from src.triangulation.skeleton import Skeleton
from src.utils.errors import InsufficientSamples

logger = logging.getLogger(__name__)

Row = Tuple[Tuple[int, ...], Fraction]

HALF = Fraction(1, 2)
_MC_BLOCK = 50_000


@dataclass(frozen=True)
class AdmissibilityPolytope:
    dim: int
    rows: Tuple[Row, ...]

    def matrix(self) -> Tuple[np.ndarray, np.ndarray]:
        A = np.array([coeffs for coeffs, _ in self.rows], dtype=float).reshape(len(self.rows), self.dim)
        b = np.array([float(rhs) for _, rhs in self.rows])
        return A, b


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    method: str  # "monte_carlo" or "ehrhart_fit"
    provenance: Tuple[int, ...]  # (samples,) or the dilations used
    degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "std_error": self.std_error, "method": self.method}


@dataclass(frozen=True)
class EhrhartSample:
    k: int
    count: int


def polytope_from_rows(dim: int, rows: Sequence[Row]) -> AdmissibilityPolytope:
    """Deduplicate rows, keeping the first occurrence, and drop trivial 0 <= c rows."""
    seen = set()
    kept: List[Row] = []
    for coeffs, rhs in rows:
        key = (tuple(coeffs), Fraction(rhs))
        if key in seen or (not any(coeffs) and rhs >= 0):
            continue
        seen.add(key)
        kept.append(key)
    return AdmissibilityPolytope(dim=dim, rows=tuple(kept))


def _interior(P: AdmissibilityPolytope) -> bool:
    quarter = Fraction(1, 4)
    return all(sum(c * quarter for c in coeffs) < rhs for coeffs, rhs in P.rows)


def build_polytope(S: Skeleton) -> AdmissibilityPolytope:
    e = S.e
    rows: List[Row] = []
    for i in range(e):
        lower = [0] * e
        lower[i] = -1
        upper = [0] * e
        upper[i] = 1
        rows.append((tuple(lower), Fraction(0)))
        rows.append((tuple(upper), HALF))

    for tri in S.triangles:
        for slot in range(3):
            coeffs = [0] * e
            for other, edge in enumerate(tri):
                coeffs[edge] += 1 if other == slot else -1
            rows.append((tuple(coeffs), Fraction(0)))
        coeffs = [0] * e
        for edge in tri:
            coeffs[edge] += 1
        rows.append((tuple(coeffs), Fraction(1)))

    P = polytope_from_rows(e, rows)
    if not _interior(P):
        raise AssertionError("(1/4, ..., 1/4) is not interior to the admissibility polytope")
    return P


def polytope_contains(P: AdmissibilityPolytope, x: Sequence[Union[int, Fraction]], k: int = 1) -> bool:
    return all(sum(c * Fraction(v) for c, v in zip(coeffs, x)) <= k * rhs for coeffs, rhs in P.rows)


def count_lattice_points(P: AdmissibilityPolytope, k: int) -> int:
    """Integer points of k·P by backtracking over coordinates with per-row partial bounds."""
    if k < 1:
        raise ValueError("dilation must be positive")
    dim = P.dim
    bounds = [int(math.floor(k * rhs)) for _, rhs in P.rows]
    # Coordinates are nonnegative, so a row with no negative coefficient bounds each of its variables.
    upper: List[Optional[int]] = [None] * dim
    for coeffs, rhs in P.rows:
        if min(coeffs) < 0:
            continue
        for i, c in enumerate(coeffs):
            if c > 0:
                bound = int(math.floor(k * rhs / c))
                upper[i] = bound if upper[i] is None else min(upper[i], bound)
    if any(u is None for u in upper):
        raise ValueError("polytope is not bounded inside the nonnegative orthant")

    # Smallest possible contribution of coordinates d.. of each row, given 0 <= x_i <= upper[i].
    rest_min = [[0] * (dim + 1) for _ in P.rows]
    for r_idx, (coeffs, _) in enumerate(P.rows):
        for d in range(dim - 1, -1, -1):
            rest_min[r_idx][d] = rest_min[r_idx][d + 1] + min(0, coeffs[d] * upper[d])
    active = [[r_idx for r_idx, (coeffs, _) in enumerate(P.rows) if coeffs[d]] for d in range(dim)]

    partial = [0] * len(P.rows)
    total = 0

    def descend(d: int) -> None:
        nonlocal total
        if d == dim:
            total += 1
            return
        for value in range(upper[d] + 1):
            ok = True
            for r_idx in active[d]:
                partial[r_idx] += P.rows[r_idx][0][d] * value
            for r_idx in active[d]:
                if partial[r_idx] + rest_min[r_idx][d + 1] > bounds[r_idx]:
                    ok = False
                    break
            if ok:
                descend(d + 1)
            for r_idx in active[d]:
                partial[r_idx] -= P.rows[r_idx][0][d] * value

    descend(0)
    return total


def ehrhart_samples(P: AdmissibilityPolytope, dilations: Sequence[int] = DEFAULT_DILATIONS) -> List[EhrhartSample]:
    return [EhrhartSample(k=k, count=count_lattice_points(P, k)) for k in dilations]


def ehrhart_volume_fit(
    P: AdmissibilityPolytope,
    dilations: Sequence[int] = DEFAULT_DILATIONS,
    samples: Optional[Sequence[EhrhartSample]] = None,
) -> VolumeEstimate:
    """Leading coefficient of the lattice-point count restricted to even dilations.

    count(k) - 1 is fit against k^e, k^(e-1), ... using as many monomials as
    the dilations allow (at least k^e..k^(e-2)); the constant term of an
    Ehrhart polynomial is 1.
    """
    ks = sorted({int(k) for k in dilations})
    if len(ks) < 3 or any(k <= 0 or k % 2 for k in ks):
        raise InsufficientSamples("need at least three distinct positive even dilations", dilations=ks)
    if samples is None:
        samples = ehrhart_samples(P, ks)
    counts = {s.k: s.count for s in samples}

    e = P.dim
    kmax = float(max(ks))
    powers = list(range(e, max(1, e - len(ks) + 1) - 1, -1))
    u = np.array(ks, dtype=float) / kmax
    X = np.column_stack([u**p for p in powers])
    y = np.array([counts[k] - 1 for k in ks], dtype=float)

    coef, _res, rank, _sv = np.linalg.lstsq(X, y, rcond=None)
    value = float(coef[0]) / kmax**e

    dof = len(ks) - len(powers)
    std_error = 0.0
    if dof > 0 and rank == len(powers):
        resid = y - X @ coef
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.inv(X.T @ X)
        std_error = math.sqrt(max(cov[0, 0], 0.0)) / kmax**e
    return VolumeEstimate(value=value, std_error=std_error, method="ehrhart_fit", provenance=tuple(ks))


def mc_volume(P: AdmissibilityPolytope, samples: int, seed: int = 0) -> VolumeEstimate:
    """Rejection sampling in the bounding box [0, 1/2]^dim."""
    if samples < MIN_MC_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_MC_SAMPLES} samples, got {samples}", samples=samples)
    A, b = P.matrix()
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining:
        block = min(_MC_BLOCK, remaining)
        X = rng.uniform(0.0, 0.5, size=(block, P.dim))
        hits += int(np.count_nonzero(np.all(X @ A.T <= b + 1e-15, axis=1)))
        remaining -= block

    box = 0.5**P.dim
    p = hits / samples
    estimate = VolumeEstimate(
        value=p * box,
        std_error=math.sqrt(p * (1 - p) / samples) * box,
        method="monte_carlo",
        provenance=(samples,),
        degenerate=hits == 0,
    )
    if estimate.degenerate:
        logger.warning("Monte-Carlo volume: no hits in %d samples", samples)
    return estimate


def coloring_estimator(P: AdmissibilityPolytope, r: int, volume: Union[VolumeEstimate, float]) -> float:
    """vol(P_T)·(r-2)^e, the expected number of integer admissible colorings."""
    vol = volume.value if isinstance(volume, VolumeEstimate) else float(volume)
    return vol * float(r - 2) ** P.dim


def compare_volumes(a: VolumeEstimate, b: VolumeEstimate) -> bool:
    """Agreement within max(5%, 3 combined standard errors)."""
    tolerance = max(0.05 * max(abs(a.value), abs(b.value)), 3 * math.hypot(a.std_error, b.std_error))
    return abs(a.value - b.value) <= tolerance


def finite_differences(counts: Sequence[int], order: int) -> List[int]:
    values = list(counts)
    for _ in range(order):
        values = [later - earlier for earlier, later in zip(values, values[1:])]
    return values


def estimate_lower_bound_check(
    S: Skeleton, r: int, volume: Union[VolumeEstimate, float], count: Optional[int] = None
) -> bool:
    """Soft check that the estimator stays below the admissible count on multi-vertex inputs.

    Pass count when it is already known; otherwise the colorings are enumerated here.
    """
    P = build_polytope(S)
    estimate = coloring_estimator(P, r, volume)
    if count is None:
        count = count_admissible(build_context(S, r))
    ok = estimate <= count
    if not ok:
        logger.warning("estimator %.6g exceeds the %d admissible colorings at r=%d (v=%d)", estimate, count, r, S.v)
    return ok


def polytope_report(
    S: Skeleton,
    dilations: Sequence[int] = DEFAULT_DILATIONS,
    samples: int = 200_000,
    seed: int = 0,
) -> Dict[str, Any]:
    P = build_polytope(S)
    points = ehrhart_samples(P, dilations)
    fit = ehrhart_volume_fit(P, dilations, points)
    mc = mc_volume(P, samples, seed)
    return {
        "dim": P.dim,
        "rows": len(P.rows),
        "volume": fit.to_dict(),
        "mc_volume": mc.to_dict(),
        "agree": compare_volumes(fit, mc),
        "samples": [[s.k, s.count] for s in points],
    }


__all__ = [
    "Row",
    "AdmissibilityPolytope",
    "VolumeEstimate",
    "EhrhartSample",
    "polytope_from_rows",
    "build_polytope",
    "polytope_contains",
    "count_lattice_points",
    "ehrhart_samples",
    "ehrhart_volume_fit",
    "mc_volume",
    "coloring_estimator",
    "compare_volumes",
    "finite_differences",
    "estimate_lower_bound_check",
    "polytope_report",
]
