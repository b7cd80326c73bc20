"""Minimal graphs built from holomorphic seed data (h, a, b).

With d = 1 + (a - ib)^2 the seed defines the holomorphic quadruple

    phi1 = 1,  phi2 = a - ib,  phi3 = (h - d/h)/2,  phi4 = i (h + d/h)/2,

and the graph map is recovered through the shear x = u, y = a u + b v with
f1(x, y) = Re int_0^w phi3 + c1 and f2(x, y) = Re int_0^w phi4 + c2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exprlang import COMPLEX1, DomainError, Expr, Jet2, eval_cjet, evaluate, parse
from .geometry import Jet2Map, minimal_residual, shear_laplacian
from .grid import Grid, grid_points, sweep
from .jacobian import jacobian
from .report import AnalysisReport

DEFAULT_QUAD_ORDER = 8
PANEL_LENGTH = 0.5
ZERO_TOL = 1e-13

# pass/fail thresholds for verify_construction
ALGEBRAIC_TOL = 1e-12
ANALYTIC_TOL = 1e-9


class ZeroOfH(DomainError):
    """The seed h vanishes (numerically) where it must not."""


class NonFiniteQuadrature(DomainError):
    pass


def shear_d(a: float, b: float) -> complex:
    return 1.0 + complex(a, -b) ** 2


@dataclass(frozen=True)
class HoloData:
    h: Expr
    a: float
    b: float
    d: complex | None = None
    origin_offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.h.mode != COMPLEX1:
            raise ValueError("h must be a complex1 expression in w")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        d = shear_d(self.a, self.b)
        if self.d is not None and complex(self.d) != d:
            raise ValueError(f"stored d={self.d} does not match 1+(a-ib)^2={d}")
        object.__setattr__(self, "d", d)

    @classmethod
    def from_strings(cls, h: str, a: float, b: float, offset=(0.0, 0.0)) -> "HoloData":
        return cls(parse(h, COMPLEX1), float(a), float(b), origin_offset=tuple(map(float, offset)))

    def zero_threshold(self) -> float:
        return ZERO_TOL * (1.0 + abs(self.d))

    def check_nonvanishing(self, ws) -> None:
        ws = np.atleast_1d(np.asarray(ws, dtype=complex))
        hv = np.atleast_1d(evaluate(self.h, w=ws))
        bad = np.abs(hv) < self.zero_threshold()
        if np.any(bad):
            raise ZeroOfH("h vanishes", {"w": complex(ws[np.flatnonzero(bad)[0]])})


@dataclass(frozen=True)
class PhiQuad:
    phi1: complex
    phi2: complex
    phi3: complex
    phi4: complex

    def quadratic_sum(self) -> complex:
        return self.phi1 ** 2 + self.phi2 ** 2 + self.phi3 ** 2 + self.phi4 ** 2

    def factorization_defect(self, d: complex) -> float:
        return abs((self.phi3 - 1j * self.phi4) * (self.phi3 + 1j * self.phi4) + d)


def _phi34(h, d):
    q = d / h
    return 0.5 * (h - q), 0.5j * (h + q)


def phi_components(data: HoloData, w: complex) -> PhiQuad:
    hv = eval_cjet(data.h, w).value
    if abs(hv) < data.zero_threshold():
        raise ZeroOfH("h vanishes", {"w": complex(w)})
    p3, p4 = _phi34(hv, data.d)
    return PhiQuad(1.0 + 0j, complex(data.a, -data.b), p3, p4)


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, wts = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * wts


def _segment_integrals(data: HoloData, p: complex, q: complex, quad_order: int,
                       panels: int | None) -> tuple[complex, complex]:
    length = abs(q - p)
    if length == 0.0:
        return 0j, 0j
    if panels is None:
        panels = max(1, math.ceil(length / PANEL_LENGTH))
    t, wts = gauss_legendre(quad_order)
    edges = np.arange(panels) / panels
    nodes = (edges[:, None] + t[None, :] / panels).ravel()
    weights = np.tile(wts, panels) / panels
    zeta = p + nodes * (q - p)
    hv = np.atleast_1d(evaluate(data.h, w=zeta))
    bad = np.abs(hv) < data.zero_threshold()
    if np.any(bad):
        raise ZeroOfH("h vanishes on the integration path", {"w": complex(zeta[np.flatnonzero(bad)[0]])})
    p3, p4 = _phi34(hv, data.d)
    scale = q - p
    i3 = complex(np.dot(weights, p3) * scale)
    i4 = complex(np.dot(weights, p4) * scale)
    if not (np.isfinite(i3) and np.isfinite(i4)):
        raise NonFiniteQuadrature("non-finite quadrature value", {"w": complex(q)})
    return i3, i4


def integrate_path(data: HoloData, vertices: Sequence[complex],
                   quad_order: int = DEFAULT_QUAD_ORDER, panels: int | None = None) -> tuple[float, float]:
    """(phi, psi) = Re of the integrals of phi3, phi4 along a polyline, plus offsets."""
    if quad_order < 4:
        raise ValueError("quad_order must be at least 4")
    data.check_nonvanishing([complex(v) for v in vertices])
    i3 = i4 = 0j
    for p, q in zip(vertices, vertices[1:]):
        s3, s4 = _segment_integrals(data, complex(p), complex(q), quad_order, panels)
        i3 += s3
        i4 += s4
    c1, c2 = data.origin_offset
    return i3.real + c1, i4.real + c2


def integrate_surface(data: HoloData, w: complex, quad_order: int = DEFAULT_QUAD_ORDER,
                      panels: int | None = None) -> tuple[float, float, float, float]:
    """Point (x, y, f1, f2) of the constructed graph over the parameter w = u + iv."""
    w = complex(w)
    phi, psi = integrate_path(data, [0j, w], quad_order, panels)
    return w.real, data.a * w.real + data.b * w.imag, phi, psi


def _shear_chain(data: HoloData, val: float, pu: float, pv: float,
                 puu: float, puv: float, pvv: float) -> Jet2:
    # f(x, y) = p(x, (y - a x)/b)
    a, b = data.a, data.b
    k = a / b
    return Jet2(
        val,
        pu - k * pv,
        pv / b,
        puu - 2.0 * k * puv + k * k * pvv,
        (puv - k * pvv) / b,
        pvv / (b * b),
    )


def graph_jets(data: HoloData, x: float, y: float, with_values: bool = True,
               quad_order: int = DEFAULT_QUAD_ORDER) -> Jet2Map:
    """Second-order jet of the reconstructed f at (x, y), derivatives in closed form.

    With ``with_values=False`` the zeroth-order entries are NaN and no
    quadrature is done.
    """
    u = float(x)
    v = (float(y) - data.a * u) / data.b
    w = complex(u, v)
    jet = eval_cjet(data.h, w)
    hv, dh = jet.value, jet.deriv
    if abs(hv) < data.zero_threshold():
        raise ZeroOfH("h vanishes", {"w": w})
    p3, p4 = _phi34(hv, data.d)
    q = data.d * dh / (hv * hv)
    dp3 = 0.5 * (dh + q)
    dp4 = 0.5j * (dh - q)
    if with_values:
        _, _, val1, val2 = integrate_surface(data, w, quad_order)
    else:
        val1 = val2 = math.nan
    comps = []
    for val, p, dp in ((val1, p3, dp3), (val2, p4, dp4)):
        puu = dp.real
        comps.append(_shear_chain(data, val, p.real, -p.imag, puu, -dp.imag, -puu))
    return Jet2Map((float(x), float(y)), comps[0], comps[1])


def jacobian_closed_form(data: HoloData, w: complex) -> float:
    """J_f = (-|h|^2 + |d|^2/|h|^2) / (4b)."""
    h2 = abs(eval_cjet(data.h, w).value) ** 2
    return (-h2 + abs(data.d) ** 2 / h2) / (4.0 * data.b)


@dataclass(frozen=True)
class SurfaceSample:
    u: float
    v: float
    x: float
    y: float
    f1: float
    f2: float
    J: float
    jets: Jet2Map = field(repr=False, compare=False)

    def row(self) -> tuple:
        return (self.u, self.v, self.x, self.y, self.f1, self.f2, self.J)


@dataclass(frozen=True)
class ConstructedSurface:
    data: HoloData
    samples: tuple[SurfaceSample, ...]
    quad_order: int

    CSV_HEADER = ("u", "v", "x", "y", "f1", "f2", "J")

    def rows(self):
        return [s.row() for s in self.samples]


def construct_surface(data: HoloData, grid: Grid, quad_order: int = DEFAULT_QUAD_ORDER) -> ConstructedSurface:
    """Sample the constructed graph over a grid in the w-plane."""

    def one(point):
        u, v = point
        x, y, f1, f2 = integrate_surface(data, complex(u, v), quad_order)
        jets = graph_jets(data, x, y, with_values=False)
        jets = Jet2Map(jets.point, Jet2(f1, *jets.f1.as_tuple()[1:]), Jet2(f2, *jets.f2.as_tuple()[1:]))
        return SurfaceSample(u, v, x, y, f1, f2, jacobian(jets), jets)

    return ConstructedSurface(data, tuple(sweep(one, grid_points(grid))), quad_order)


def verify_construction(data: HoloData, grid: Grid) -> AnalysisReport:
    """Check every algebraic identity of the construction on a w-plane grid."""
    pts = grid_points(grid)
    report = AnalysisReport("construct", inputs={
        "h": str(data.h), "a": data.a, "b": data.b, "d": data.d,
        "origin_offset": list(data.origin_offset),
        "grid": str(grid) if hasattr(grid, "nx") else len(pts),
    })

    def one(point):
        u, v = point
        w = complex(u, v)
        try:
            quad = phi_components(data, w)
            x, y = u, data.a * u + data.b * v
            jets = graph_jets(data, x, y, with_values=False)
            J = jacobian(jets)
            res = minimal_residual(jets)
            return {
                "quadratic_relation": abs(quad.quadratic_sum()),
                "factorization": quad.factorization_defect(data.d),
                "h_identity": abs((quad.phi3 - 1j * quad.phi4) - eval_cjet(data.h, w).value),
                "im_phi3_conj_phi4_vs_bJ": abs((quad.phi3 * quad.phi4.conjugate()).imag - data.b * J),
                "jacobian_closed_form": abs(J - jacobian_closed_form(data, w)),
                "minimal_residual": math.hypot(*res),
                "harmonicity": max(abs(shear_laplacian(jets.f1, data.a, data.b)),
                                   abs(shear_laplacian(jets.f2, data.a, data.b))),
                "J": J,
            }
        except DomainError as exc:
            return exc

    results = []
    for point, r in zip(pts, sweep(one, pts)):
        if isinstance(r, DomainError):
            report.add_error(point, r)
        else:
            results.append(r)
    if not results:
        report.verdicts["construction"] = "undetermined"
        return report
    keys = ["quadratic_relation", "factorization", "h_identity", "im_phi3_conj_phi4_vs_bJ",
            "jacobian_closed_form", "minimal_residual", "harmonicity"]
    for k in keys:
        report.checks[f"max_{k}"] = max(r[k] for r in results)
    report.details["J_min"] = min(r["J"] for r in results)
    report.details["J_max"] = max(r["J"] for r in results)
    report.details["evaluated_points"] = len(results)
    limits = {"quadratic_relation": ALGEBRAIC_TOL, "factorization": ALGEBRAIC_TOL,
              "h_identity": ALGEBRAIC_TOL, "im_phi3_conj_phi4_vs_bJ": ANALYTIC_TOL,
              "jacobian_closed_form": ANALYTIC_TOL, "minimal_residual": ANALYTIC_TOL,
              "harmonicity": ANALYTIC_TOL}
    report.details["tolerances"] = limits
    ok = all(report.checks[f"max_{k}"] < limits[k] for k in keys) and not report.errors
    report.verdicts["construction"] = "consistent" if ok else "inconsistent"
    return report
