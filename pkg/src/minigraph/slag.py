"""Special Lagrangian equation  cos(t) lap(u) = sin(t) (det Hess u - 1)  and
the gradient-graph bridge to minimal surfaces."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .exprlang import REAL2, DomainError, Expr, differentiate, eval_jet2, parse
from .geometry import ExprPair, grid_minimality_report
from .grid import Grid, grid_points, sweep
from .jacobian import classify_cr
from .report import AnalysisReport

DEFAULT_TOL = 1e-8
DEGENERATE_TOL = 1e-14


class DegenerateFitWarning(UserWarning):
    pass


class FuClass(str, enum.Enum):
    HARMONIC = "Harmonic"
    QUADRATIC = "Quadratic"
    OTHER = "Other"


@dataclass(frozen=True)
class SlagProblem:
    u: Expr
    theta: float | None = None

    def __post_init__(self):
        if self.u.mode != REAL2:
            raise ValueError("the potential u must be a real2 expression")

    @classmethod
    def from_string(cls, u: str, theta: float | None = None) -> "SlagProblem":
        return cls(parse(u, REAL2), theta)

    def with_theta(self, theta: float) -> "SlagProblem":
        return SlagProblem(self.u, theta)


def _hessian_terms(p: SlagProblem, grid: Grid) -> tuple[list, list]:
    """(A_i, B_i) = (lap u, det Hess u - 1) at every evaluable grid point."""

    def one(point):
        try:
            j = eval_jet2(p.u, *point)
        except DomainError as exc:
            return exc
        return j.xx + j.yy, j.xx * j.yy - j.xy * j.xy - 1.0

    pts = grid_points(grid)
    terms, errors = [], []
    for point, r in zip(pts, sweep(one, pts)):
        if isinstance(r, DomainError):
            errors.append({"x": point[0], "y": point[1], "error": str(r)})
        else:
            terms.append(r)
    return terms, errors


def _max_residual(terms, theta: float) -> float:
    c, s = math.cos(theta), math.sin(theta)
    return max((abs(c * A - s * B) for A, B in terms), default=math.nan)


def slag_residual(p: SlagProblem, grid: Grid) -> float:
    if p.theta is None:
        raise ValueError("theta is required; use fit_theta to estimate it")
    terms, _ = _hessian_terms(p, grid)
    return _max_residual(terms, p.theta)


@dataclass
class ThetaFit:
    theta: float
    residual: float
    note: str = ""


def _normalise(theta: float) -> float:
    # the equation at theta + pi is the same equation negated
    theta = math.fmod(theta, math.pi)
    if theta >= math.pi / 2:
        theta -= math.pi
    elif theta < -math.pi / 2:
        theta += math.pi
    return theta


def fit_theta(p: SlagProblem, grid: Grid) -> ThetaFit:
    """Least-squares phase: minimise sum (cos t A_i - sin t B_i)^2 in closed form.

    The objective is C + R cos(2t - alpha), so its stationary points are
    t0 = atan2(-2 sum AB, sum A^2 - sum B^2) / 2 and t0 + pi/2; the one with the
    smaller sampled residual is returned, normalised to [-pi/2, pi/2).
    """
    terms, _ = _hessian_terms(p, grid)
    if not terms:
        raise DomainError("no grid point could be evaluated")
    if all(abs(A) < DEGENERATE_TOL and abs(B) < DEGENERATE_TOL for A, B in terms):
        warnings.warn("Hessian terms vanish on the grid; every theta fits", DegenerateFitWarning, stacklevel=2)
        return ThetaFit(0.0, _max_residual(terms, 0.0), "degenerate: every theta fits")
    saa = math.fsum(A * A for A, _ in terms)
    sbb = math.fsum(B * B for _, B in terms)
    sab = math.fsum(A * B for A, B in terms)
    t0 = 0.5 * math.atan2(-2.0 * sab, saa - sbb)
    cands = [_normalise(t0), _normalise(t0 + 0.5 * math.pi)]

    def sq(t):
        c, s = math.cos(t), math.sin(t)
        return math.fsum((c * A - s * B) ** 2 for A, B in terms)

    theta = min(cands, key=lambda t: (sq(t), _max_residual(terms, t)))
    return ThetaFit(theta, _max_residual(terms, theta))


def gradient_graph(p: SlagProblem) -> ExprPair:
    """f = grad u as a pair of symbolic expressions."""
    return differentiate(p.u, "x"), differentiate(p.u, "y")


@dataclass
class FuResult:
    kind: FuClass
    max_abs_laplacian: float
    max_abs_third: float
    note: str = ""
    warning: str = ""
    errors: list = field(default_factory=list)


def fu_classify(p: SlagProblem, grid: Grid, tol: float = DEFAULT_TOL) -> FuResult:
    """Sampled verdict: harmonic, quadratic polynomial or other."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    gx, gy = gradient_graph(p)

    def one(point):
        try:
            j = eval_jet2(p.u, *point)
            jx = eval_jet2(gx, *point)
            jy = eval_jet2(gy, *point)
        except DomainError as exc:
            return exc
        third = max(abs(jx.xx), abs(jx.xy), abs(jx.yy), abs(jy.xx), abs(jy.xy), abs(jy.yy))
        return abs(j.xx + j.yy), third

    pts = grid_points(grid)
    lap, third, errors = [], [], []
    for point, r in zip(pts, sweep(one, pts)):
        if isinstance(r, DomainError):
            errors.append({"x": point[0], "y": point[1], "error": str(r)})
        else:
            lap.append(r[0])
            third.append(r[1])
    if not lap:
        raise DomainError("no grid point could be evaluated")
    max_lap, max_third = max(lap), max(third)
    harmonic, quadratic = max_lap < tol, max_third < tol
    note = warning = ""
    if quadratic:
        kind = FuClass.QUADRATIC
        if harmonic:
            note = "also harmonic (harmonic quadratic polynomial)"
    elif harmonic:
        kind = FuClass.HARMONIC
    else:
        kind = FuClass.OTHER
        theta = p.theta if p.theta is not None else fit_theta(p, grid).theta
        if slag_residual(p.with_theta(theta), grid) < tol:
            warning = ("u solves the special Lagrangian equation on the grid but is neither harmonic "
                       "nor quadratic there; sampled evidence only, the grid is not the whole plane")
    return FuResult(kind, max_lap, max_third, note, warning, errors)


def slag_report(p: SlagProblem, grid: Grid, tol: float = DEFAULT_TOL) -> AnalysisReport:
    """Everything the ``slag`` command reports."""
    pts = grid_points(grid)
    report = AnalysisReport("slag", inputs={"u": str(p.u), "theta": p.theta,
                                            "grid": str(grid) if hasattr(grid, "nx") else len(pts),
                                            "tol": tol})
    terms, errors = _hessian_terms(p, grid)
    report.errors.extend(errors)
    fit = fit_theta(p, grid)
    theta = p.theta if p.theta is not None else fit.theta
    residual = _max_residual(terms, theta)
    report.checks.update(residual=residual, fitted_theta=fit.theta, fitted_residual=fit.residual,
                         theta_used=theta)
    fu = fu_classify(p.with_theta(theta), grid, tol)
    report.verdicts["slag"] = "solution" if residual < tol else "not-a-solution"
    report.verdicts["fu_class"] = fu.kind.value
    f = gradient_graph(p)
    geo = grid_minimality_report(f, grid, tol)
    cr = classify_cr(f, grid, tol)
    dets = [B + 1.0 for _, B in terms]  # J_f of grad u is det Hess u
    report.checks["gradient_graph_max_residual"] = geo.checks.get("max_residual_norm")
    report.verdicts["gradient_graph"] = geo.verdicts["minimality"]
    report.verdicts["gradient_graph_cr"] = cr.kind.value
    report.details.update(
        gradient_graph={"f1": str(f[0]), "f2": str(f[1])},
        fu={"max_abs_laplacian": fu.max_abs_laplacian, "max_abs_third_derivative": fu.max_abs_third,
            "note": fu.note, "warning": fu.warning},
        fit_note=fit.note,
        jacobian_vs_one={
            "min": min(dets), "max": max(dets),
            "all_above_one": all(v > 1.0 for v in dets),
            "all_below_one": all(v < 1.0 for v in dets),
            "near_one_somewhere": any(abs(v - 1.0) < tol for v in dets),
        },
        converse_direction="untested",
    )
    return report
