"""Jacobian of f, its Wirtinger split, holomorphy classification and sampled
evidence about the range of J_f."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .exprlang import DomainError
from .geometry import ExprPair, Jet2Map, map_jets
from .grid import Grid, GridSpec, grid_points, sweep

DEFAULT_TOL = 1e-8
GROWTH_FACTOR = 10.0


class CRClass(str, enum.Enum):
    HOLOMORPHIC = "Holomorphic"
    ANTI_HOLOMORPHIC = "AntiHolomorphic"
    NEITHER = "Neither"


class RangeVerdict(str, enum.Enum):
    ONE_SIDED_NON_NEGATIVE = "OneSidedNonNegative"
    ONE_SIDED_NON_POSITIVE = "OneSidedNonPositive"
    BOUNDED_WINDOW = "BoundedWindow"
    FULL_RANGE_EVIDENCE = "FullRangeEvidence"


def jacobian(j: Jet2Map) -> float:
    return j.f1.x * j.f2.y - j.f1.y * j.f2.x


@dataclass(frozen=True)
class WirtingerPair:
    f_z: complex
    f_zbar: complex

    @property
    def jacobian(self) -> float:
        # |p|^2 - |q|^2 factored per component to avoid cancellation
        p, q = self.f_z, self.f_zbar
        return (p.real - q.real) * (p.real + q.real) + (p.imag - q.imag) * (p.imag + q.imag)


def wirtinger(j: Jet2Map) -> WirtingerPair:
    """Wirtinger derivatives of f1 + i f2 with respect to z = x + iy and its conjugate."""
    f1x, f1y, f2x, f2y = j.f1.x, j.f1.y, j.f2.x, j.f2.y
    return WirtingerPair(
        complex(0.5 * (f1x + f2y), 0.5 * (f2x - f1y)),
        complex(0.5 * (f1x - f2y), 0.5 * (f2x + f1y)),
    )


@dataclass
class CRResult:
    kind: CRClass
    max_abs_fz: float
    max_abs_fzbar: float
    jacobian_min: float
    jacobian_max: float
    note: str = ""
    errors: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "classification": self.kind.value,
            "max_abs_f_z": self.max_abs_fz,
            "max_abs_f_zbar": self.max_abs_fzbar,
            "jacobian_min": self.jacobian_min,
            "jacobian_max": self.jacobian_max,
            "note": self.note,
        }


def _jet_or_error(f: ExprPair):
    def run(point):
        try:
            return map_jets(f, *point)
        except DomainError as exc:
            return exc
    return run


def classify_cr(f: ExprPair, grid: Grid, tol: float = DEFAULT_TOL) -> CRResult:
    """Cauchy-Riemann test over the grid with an absolute tolerance."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    pts = grid_points(grid)
    errors, fz, fzbar, jac = [], [], [], []
    for point, j in zip(pts, sweep(_jet_or_error(f), pts)):
        if isinstance(j, DomainError):
            errors.append({"x": point[0], "y": point[1], "error": str(j)})
            continue
        wp = wirtinger(j)
        fz.append(abs(wp.f_z))
        fzbar.append(abs(wp.f_zbar))
        jac.append(jacobian(j))
    if not jac:
        raise DomainError("no grid point could be evaluated")
    max_fz, max_fzbar = max(fz), max(fzbar)
    note = ""
    if max_fzbar < tol:
        kind = CRClass.HOLOMORPHIC
        if max_fz < tol:
            note = "degenerate (affine): f_z and f_zbar both vanish, f is constant"
    elif max_fz < tol:
        kind = CRClass.ANTI_HOLOMORPHIC
    else:
        kind = CRClass.NEITHER
    return CRResult(kind, max_fz, max_fzbar, min(jac), max(jac), note, errors)


@dataclass
class RadiusStats:
    radius: float
    min: float
    max: float
    cumulative_min: float
    cumulative_max: float


@dataclass
class RangeEvidence:
    """Sampled range of J_f on growing squares; evidence, never proof."""

    sampled_min: float
    sampled_max: float
    radii: list[float]
    per_radius: list[RadiusStats]
    verdict: RangeVerdict
    zero_attained: bool
    resolution: int
    samples: list = field(default_factory=list, repr=False)

    @property
    def per_radius_min(self) -> list[float]:
        return [s.cumulative_min for s in self.per_radius]

    @property
    def per_radius_max(self) -> list[float]:
        return [s.cumulative_max for s in self.per_radius]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "sampled_min": self.sampled_min,
            "sampled_max": self.sampled_max,
            "sampled_infimum": self.sampled_min,
            "zero_attained_exactly": self.zero_attained,
            "resolution": self.resolution,
            "radii": list(self.radii),
            "per_radius": [
                {"radius": s.radius, "min": s.min, "max": s.max,
                 "cumulative_min": s.cumulative_min, "cumulative_max": s.cumulative_max}
                for s in self.per_radius
            ],
        }


def jacobian_range(f: ExprPair, radii: Sequence[float], resolution: int = 41,
                   tol: float = DEFAULT_TOL, growth: float = GROWTH_FACTOR) -> RangeEvidence:
    """Sample J_f on [-r, r]^2 for each radius and grade the range evidence.

    Cumulative extremes (over all squares up to r) are what the verdict uses,
    so the reported range never shrinks as r grows.
    """
    radii = [float(r) for r in radii]
    if not radii:
        raise ValueError("empty radii list")
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and increasing")
    stats, samples = [], []
    cmin, cmax = math.inf, -math.inf
    zero_hit = False
    for r in radii:
        pts = GridSpec.square(r, resolution).points()
        vals = []
        for point, j in zip(pts, sweep(_jet_or_error(f), pts)):
            if isinstance(j, DomainError):
                continue
            J = jacobian(j)
            vals.append(J)
            samples.append((r, point[0], point[1], J))
        if not vals:
            raise DomainError(f"no grid point could be evaluated at radius {r}")
        zero_hit = zero_hit or any(v == 0.0 for v in vals)
        cmin, cmax = min(cmin, min(vals)), max(cmax, max(vals))
        stats.append(RadiusStats(r, min(vals), max(vals), cmin, cmax))

    scale = max(1.0, abs(cmin), abs(cmax))
    first = stats[0]
    if (cmin < 0 < cmax and abs(cmin) > growth * abs(first.cumulative_min)
            and abs(cmax) > growth * abs(first.cumulative_max)):
        verdict = RangeVerdict.FULL_RANGE_EVIDENCE
    elif cmax - cmin <= tol * scale:
        # constant Jacobian: the plane/affine case
        verdict = RangeVerdict.BOUNDED_WINDOW
    elif cmin >= -tol * scale:
        verdict = RangeVerdict.ONE_SIDED_NON_NEGATIVE
    elif cmax <= tol * scale:
        verdict = RangeVerdict.ONE_SIDED_NON_POSITIVE
    else:
        verdict = RangeVerdict.BOUNDED_WINDOW
    return RangeEvidence(cmin, cmax, radii, stats, verdict, zero_hit, resolution, samples)
