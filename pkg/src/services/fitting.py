"""Asymptotic models for (r, (2π/r) log TV_r) data.

    model1:  y = a·log(x + b) / (x + b)
    model2:  y = a / (x + b) + c

For a fixed shift b the remaining parameters are linear and solved in closed
form. b is scanned on a geometric grid over (-min x, 10·max x) and the best
grid point is refined by golden-section search.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.config.settings import FIT_GRID_POINTS, GOLDEN_REL_TOL
from src.utils.errors import DegenerateFit, InsufficientPoints

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

_MIN_POINTS = {"model1": 4, "model2": 5, "constant": 1}


@dataclass(frozen=True)
class FitResult:
    model: str
    params: Tuple[float, ...]
    rss: float
    points_used: int

    def predict(self, x: float) -> float:
        if self.model == "model1":
            a, b = self.params
            return a * math.log(x + b) / (x + b)
        if self.model == "model2":
            a, b, c = self.params
            return a / (x + b) + c
        return self.params[0]

    def to_dict(self) -> Dict[str, Any]:
        return {"model": self.model, "params": list(self.params), "rss": self.rss, "points": self.points_used}


def _arrays(points: Sequence[Point], model: str) -> Tuple[np.ndarray, np.ndarray]:
    if len(points) < _MIN_POINTS[model]:
        raise InsufficientPoints(
            f"{model} needs at least {_MIN_POINTS[model]} points, got {len(points)}", points=len(points)
        )
    data = np.asarray(points, dtype=float)
    return data[:, 0], data[:, 1]


def _linear_model1(x: np.ndarray, y: np.ndarray, b: float) -> Tuple[Tuple[float, ...], float]:
    g = np.log(x + b) / (x + b)
    denom = float(g @ g)
    if denom == 0.0:
        raise DegenerateFit(f"model1 basis vanishes at b={b}")
    a = float(g @ y) / denom
    resid = y - a * g
    return (a, b), float(resid @ resid)


def _linear_model2(x: np.ndarray, y: np.ndarray, b: float) -> Tuple[Tuple[float, ...], float]:
    X = np.column_stack([1.0 / (x + b), np.ones_like(x)])
    coef, _res, rank, _sv = np.linalg.lstsq(X, y, rcond=None)
    if rank < 2:
        raise DegenerateFit(f"model2 design matrix is singular at b={b}")
    resid = y - X @ coef
    return (float(coef[0]), b, float(coef[1])), float(resid @ resid)


def _fit_shifted(
    points: Sequence[Point],
    model: str,
    solve: Callable[[np.ndarray, np.ndarray, float], Tuple[Tuple[float, ...], float]],
) -> FitResult:
    x, y = _arrays(points, model)
    x_min, x_max = float(x.min()), float(x.max())
    # Shift s = x_min + b ranges over (0, 10·max x + x_min): b is defined on the data range.
    eps = 1e-3 * max(1.0, abs(x_min))
    grid = np.geomspace(eps, 10.0 * max(abs(x_max), 1.0) + x_min, FIT_GRID_POINTS)

    def rss_at(s: float) -> float:
        try:
            return solve(x, y, s - x_min)[1]
        except DegenerateFit:
            return math.inf

    values = [rss_at(float(s)) for s in grid]
    best = int(np.argmin(values))
    if not math.isfinite(values[best]):
        raise DegenerateFit(f"{model}: no shift gives a solvable fit")

    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, len(grid) - 1)])
    s_best = float(grid[best])
    try:
        res = minimize_scalar(rss_at, bracket=(lo, s_best, hi), method="golden", tol=GOLDEN_REL_TOL)
        s_refined = float(res.x)
    except (ValueError, RuntimeError):
        # not a strict bracket, e.g. the best grid point is at an end
        res = minimize_scalar(rss_at, bounds=(lo, hi), method="bounded", options={"xatol": GOLDEN_REL_TOL * s_best})
        s_refined = float(res.x)
    if s_refined <= 0 or rss_at(s_refined) > values[best]:
        s_refined = s_best

    params, rss = solve(x, y, s_refined - x_min)
    logger.debug("%s fit: params=%s rss=%.3g", model, params, rss)
    return FitResult(model=model, params=params, rss=rss, points_used=len(x))


def fit_model1(points: Sequence[Point]) -> FitResult:
    return _fit_shifted(points, "model1", _linear_model1)


def fit_model2(points: Sequence[Point]) -> FitResult:
    return _fit_shifted(points, "model2", _linear_model2)


def fit_constant(points: Sequence[Point]) -> FitResult:
    """Baseline y = c; c is the mean."""
    _x, y = _arrays(points, "constant")
    c = float(y.mean())
    resid = y - c
    return FitResult(model="constant", params=(c,), rss=float(resid @ resid), points_used=len(y))


def fit(points: Sequence[Point], model: int) -> FitResult:
    if model == 1:
        return fit_model1(points)
    if model == 2:
        return fit_model2(points)
    raise ValueError(f"unknown model {model}; expected 1 or 2")


def model_curve(result: FitResult, xs: Sequence[float]) -> List[float]:
    return [result.predict(float(x)) for x in xs]


__all__ = [
    "Point",
    "FitResult",
    "fit_model1",
    "fit_model2",
    "fit_constant",
    "fit",
    "model_curve",
]
