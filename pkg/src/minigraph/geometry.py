"""Fundamental forms, mean curvature and the minimal surface equation for
graphs X(x, y) = (x, y, f1(x, y), f2(x, y)) in R^4."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .exprlang import REAL2, DomainError, Expr, Jet2, eval_jet2, parse
from .grid import Grid, grid_points, sweep
from .report import AnalysisReport

DEFAULT_TOL = 1e-8
NORMAL_TOL = 1e-8

Vec4 = tuple[float, float, float, float]
ExprPair = tuple[Expr, Expr]


class NotNormalError(ValueError):
    pass


def parse_pair(f1: str, f2: str) -> ExprPair:
    return parse(f1, REAL2), parse(f2, REAL2)


@dataclass(frozen=True)
class Jet2Map:
    """Second-order jets of both components of f at one point."""

    point: tuple[float, float]
    f1: Jet2
    f2: Jet2

    @property
    def fx(self) -> tuple[float, float]:
        return (self.f1.x, self.f2.x)

    @property
    def fy(self) -> tuple[float, float]:
        return (self.f1.y, self.f2.y)

    @property
    def fxx(self) -> tuple[float, float]:
        return (self.f1.xx, self.f2.xx)

    @property
    def fxy(self) -> tuple[float, float]:
        return (self.f1.xy, self.f2.xy)

    @property
    def fyy(self) -> tuple[float, float]:
        return (self.f1.yy, self.f2.yy)

    def tangents(self) -> tuple[Vec4, Vec4]:
        return (1.0, 0.0, self.f1.x, self.f2.x), (0.0, 1.0, self.f1.y, self.f2.y)


def map_jets(f: ExprPair, x: float, y: float) -> Jet2Map:
    return Jet2Map((float(x), float(y)), eval_jet2(f[0], x, y), eval_jet2(f[1], x, y))


@dataclass(frozen=True)
class MetricCoeffs:
    g11: float
    g12: float
    g22: float

    @property
    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g12

    def eigenvalues(self) -> tuple[float, float]:
        half_tr = 0.5 * (self.g11 + self.g22)
        disc = math.hypot(0.5 * (self.g11 - self.g22), self.g12)
        hi = half_tr + disc
        return self.det / hi, hi


@dataclass(frozen=True)
class SecondFormCoeffs:
    b11: float
    b12: float
    b22: float
    normal: Vec4


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return math.fsum(p * q for p, q in zip(a, b))


def _axpy(alpha: float, x: Sequence[float], y: Sequence[float]) -> Vec4:
    return tuple(alpha * p + q for p, q in zip(x, y))


def _unit(v: Sequence[float]) -> Vec4:
    n = math.sqrt(_dot(v, v))
    return tuple(c / n for c in v)


def first_fundamental_form(j: Jet2Map) -> MetricCoeffs:
    fx, fy = j.fx, j.fy
    return MetricCoeffs(1.0 + _dot(fx, fx), _dot(fx, fy), 1.0 + _dot(fy, fy))


def normal_frame(j: Jet2Map) -> tuple[Vec4, Vec4]:
    """Orthonormal normal frame from Gram-Schmidt of e3, e4 against the tangent plane.

    Each projection is applied twice; a single pass loses orthogonality when the
    slopes are large.
    """
    xx, xy = j.tangents()
    t1 = _unit(xx)
    t2 = _unit(_axpy(-_dot(xy, t1), t1, xy))
    basis = [t1, t2]
    frame = []
    for e in ((0.0, 0.0, 1.0, 0.0), (0.0, 0.0, 0.0, 1.0)):
        v = e
        for _ in range(2):
            for q in basis:
                v = _axpy(-_dot(v, q), q, v)
        v = _unit(v)
        basis.append(v)
        frame.append(v)
    return frame[0], frame[1]


def _check_normal(j: Jet2Map, xi: Sequence[float]) -> None:
    if abs(math.sqrt(_dot(xi, xi)) - 1.0) > NORMAL_TOL:
        raise NotNormalError(f"normal vector is not unit length: {xi}")
    for t in j.tangents():
        if abs(_dot(xi, t)) > NORMAL_TOL * math.sqrt(_dot(t, t)):
            raise NotNormalError(f"vector {xi} is not normal to the tangent plane")


def second_fundamental_form(j: Jet2Map, xi: Sequence[float]) -> SecondFormCoeffs:
    _check_normal(j, xi)
    xi = tuple(float(c) for c in xi)
    n3, n4 = xi[2], xi[3]
    # X_xx, X_xy, X_yy have zero (x, y) components
    return SecondFormCoeffs(
        j.f1.xx * n3 + j.f2.xx * n4,
        j.f1.xy * n3 + j.f2.xy * n4,
        j.f1.yy * n3 + j.f2.yy * n4,
        xi,
    )


def mean_curvature(j: Jet2Map, xi: Sequence[float]) -> float:
    g = first_fundamental_form(j)
    b = second_fundamental_form(j, xi)
    return (g.g22 * b.b11 - 2.0 * g.g12 * b.b12 + g.g11 * b.b22) / (2.0 * g.det)


def minimal_residual(j: Jet2Map) -> tuple[float, float]:
    """Left-hand side of the minimal surface equation, unnormalised."""
    g = first_fundamental_form(j)
    return tuple(
        g.g22 * fxx - 2.0 * g.g12 * fxy + g.g11 * fyy
        for fxx, fxy, fyy in zip(j.fxx, j.fxy, j.fyy)
    )


def shear_laplacian(jet: Jet2, a: float, b: float) -> float:
    """phi_uu + phi_vv for phi(u, v) = g(u, a u + b v), from the jet of g."""
    phi_uu = jet.xx + 2.0 * a * jet.xy + a * a * jet.yy
    phi_vv = b * b * jet.yy
    return phi_uu + phi_vv


@dataclass(frozen=True)
class PointSample:
    x: float
    y: float
    res: tuple[float, float]
    H: tuple[float, float]
    det_g: float

    @property
    def res_norm(self) -> float:
        return math.hypot(*self.res)


def sample_point(f: ExprPair, point: tuple[float, float]) -> PointSample:
    j = map_jets(f, *point)
    xi1, xi2 = normal_frame(j)
    return PointSample(point[0], point[1], minimal_residual(j),
                       (mean_curvature(j, xi1), mean_curvature(j, xi2)),
                       first_fundamental_form(j).det)


def _safe_sample(f: ExprPair):
    def run(point):
        try:
            return sample_point(f, point)
        except DomainError as exc:
            return exc
    return run


def grid_minimality_report(f: ExprPair, grid: Grid, tol: float = DEFAULT_TOL,
                           samples_out: list | None = None) -> AnalysisReport:
    """Sweep the minimal surface residual and mean curvatures over a grid.

    Evaluation errors are recorded per point and do not abort the sweep.
    """
    pts = grid_points(grid)
    report = AnalysisReport("verify", inputs={"f1": str(f[0]), "f2": str(f[1]),
                                              "grid": str(grid) if hasattr(grid, "nx") else len(pts),
                                              "tol": tol})
    good = []
    for point, result in zip(pts, sweep(_safe_sample(f), pts)):
        if isinstance(result, DomainError):
            report.add_error(point, result)
        else:
            good.append(result)
    if samples_out is not None:
        samples_out.extend(good)
    if not good:
        report.checks.update(max_residual_norm=None, mean_residual_norm=None)
        report.verdicts["minimality"] = "undetermined"
        return report
    norms = [s.res_norm for s in good]
    worst = max(good, key=lambda s: s.res_norm)
    max_res = max(norms)
    report.checks.update(
        max_residual_norm=max_res,
        mean_residual_norm=math.fsum(norms) / len(norms),
        max_abs_H1=max(abs(s.H[0]) for s in good),
        max_abs_H2=max(abs(s.H[1]) for s in good),
        min_metric_det=min(s.det_g for s in good),
        max_metric_det=max(s.det_g for s in good),
    )
    report.details.update(
        worst_point={"x": worst.x, "y": worst.y, "residual": list(worst.res), "metric_det": worst.det_g},
        evaluated_points=len(good),
        failed_points=len(report.errors),
    )
    report.verdicts["minimality"] = "minimal" if max_res < tol else "non-minimal"
    return report
