"""Recover shear parameters (a, b) making x = u, y = a u + b v isothermal.

The existence of such constants for an entire minimal graph is a theorem; here
it becomes a least-defect fit: minimise the mean conformality defect over
(a, log b) with a deterministic multi-start Nelder-Mead search.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exprlang import DomainError
from .geometry import ExprPair, first_fundamental_form, grid_minimality_report, map_jets, shear_laplacian
from .grid import Grid, GridSpec, grid_points, sweep

FIT_GRID = GridSpec(-1.5, 1.5, -1.5, 1.5, 21, 21)
CONVERGED_DEFECT = 1e-8
START_A = (-2.0, -1.0, 0.0, 1.0, 2.0)
START_LOG_B = (-1.0, 0.0, 1.0)


class NonMinimalInputWarning(UserWarning):
    pass


@dataclass
class ShearParams:
    a: float
    b: float
    defect: float
    converged: bool
    iterations: int = 0
    alternatives: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "defect": self.defect, "converged": self.converged,
                "iterations": self.iterations, "alternatives": self.alternatives}


class MetricSamples:
    """Metric coefficients of the graph at the grid points, computed once."""

    def __init__(self, f: ExprPair, grid: Grid):
        pts = grid_points(grid)

        def one(point):
            try:
                g = first_fundamental_form(map_jets(f, *point))
                return g.g11, g.g12, g.g22
            except DomainError:
                return None

        rows = [r for r in sweep(one, pts) if r is not None]
        if not rows:
            raise DomainError("no grid point could be evaluated")
        self.g11, self.g12, self.g22 = (np.array(c) for c in zip(*rows))

    def defect(self, a: float, b: float) -> float:
        # X_u = X_x + a X_y, X_v = b X_y
        E = self.g11 + 2.0 * a * self.g12 + a * a * self.g22
        F = b * (self.g12 + a * self.g22)
        G = b * b * self.g22
        return float(np.mean(((E - G) ** 2 + 4.0 * F * F) / (E + G) ** 2))


def conformal_defect(f: ExprPair, a: float, b: float, grid: Grid) -> float:
    """Mean of ((E - G)^2 + 4F^2) / (E + G)^2 over the grid; zero iff isothermal."""
    if not b > 0:
        raise ValueError("b must be positive")
    return MetricSamples(f, grid).defect(a, b)


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int


def nelder_mead(fun: Callable[[np.ndarray], float], x0: Sequence[float], step: float = 0.5,
                max_iter: int = 2000, xtol: float = 1e-10, alpha: float = 1.0, gamma: float = 2.0,
                rho: float = 0.5, sigma: float = 0.5) -> SimplexResult:
    """Plain Nelder-Mead; stops when the simplex diameter drops below ``xtol``."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = [x0] + [x0 + step * e for e in np.eye(n)]
    values = [fun(p) for p in simplex]
    it = 0
    while it < max_iter:
        order = sorted(range(n + 1), key=lambda i: values[i])
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        diam = max(np.max(np.abs(p - q)) for p in simplex for q in simplex)
        if diam < xtol:
            break
        it += 1
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = fun(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = fun(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = fun(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = fun(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        simplex = [best] + [best + sigma * (p - best) for p in simplex[1:]]
        values = [values[0]] + [fun(p) for p in simplex[1:]]
    k = int(np.argmin(values))
    return SimplexResult(simplex[k], values[k], it)


def start_lattice() -> list[tuple[float, float]]:
    """Multi-start points (a, log b), nearest to (0, 0) first."""
    pts = [(a, s) for a in START_A for s in START_LOG_B]
    return sorted(pts, key=lambda p: (p[0] ** 2 + p[1] ** 2, p))


def fit_shear(f: ExprPair, grid: Grid = FIT_GRID, starts: int = 15, max_iter: int = 2000,
              check_minimal: bool = True) -> ShearParams:
    """Best (a, b) over the multi-start lattice.

    Minima from other starts whose defect is within 10x of the best (and that
    are distinct points) are listed in ``alternatives``.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    if check_minimal:
        rep = grid_minimality_report(f, grid)
        if rep.verdicts.get("minimality") != "minimal":
            warnings.warn("graph is not minimal on the fitting grid; the shear fit has no guarantee",
                          NonMinimalInputWarning, stacklevel=2)
    samples = MetricSamples(f, grid)

    def objective(p: np.ndarray) -> float:
        return samples.defect(p[0], math.exp(p[1]))

    runs = []
    for a0, s0 in start_lattice()[:starts]:
        res = nelder_mead(objective, (a0, s0), max_iter=max_iter)
        runs.append(res)
    best = min(runs, key=lambda r: r.fun)
    alternatives = []
    for r in runs:
        if r is best or r.fun > 10.0 * best.fun:
            continue
        if np.max(np.abs(r.x - best.x)) < 1e-6:
            continue
        cand = {"a": float(r.x[0]), "b": math.exp(r.x[1]), "defect": r.fun}
        if all(abs(cand["a"] - o["a"]) > 1e-6 or abs(cand["b"] - o["b"]) > 1e-6 for o in alternatives):
            alternatives.append(cand)
    return ShearParams(float(best.x[0]), math.exp(best.x[1]), best.fun,
                       best.fun < CONVERGED_DEFECT, best.iterations, alternatives)


def harmonicity_check(f: ExprPair, params: ShearParams, grid: Grid) -> float:
    """Max |phi_uu + phi_vv|, |psi_uu + psi_vv| in the sheared coordinates."""
    if not params.b > 0:
        raise ValueError("b must be positive")
    worst = 0.0
    for point in grid_points(grid):
        try:
            j = map_jets(f, *point)
        except DomainError:
            continue
        worst = max(worst, abs(shear_laplacian(j.f1, params.a, params.b)),
                    abs(shear_laplacian(j.f2, params.a, params.b)))
    return worst
