"""Rectangular sampling grids and the point-sweep helper."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar, Union

import numpy as np

T = TypeVar("T")

DEFAULT_GRID = "-2:2:41,-2:2:41"


class EmptyGridError(ValueError):
    def __init__(self):
        super().__init__("empty grid")


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice over [x_min, x_max] x [y_min, y_max], endpoints included."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = 41
    ny: int = 41

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate grid bounds: {self}")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 samples per axis")

    @classmethod
    def square(cls, r: float, n: int) -> "GridSpec":
        return cls(-r, r, -r, r, n, n)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"X0:X1:NX,Y0:Y1:NY"``."""
        try:
            xs, ys = text.split(",")
            x0, x1, nx = xs.split(":")
            y0, y1, ny = ys.split(":")
            return cls(float(x0), float(x1), float(y0), float(y1), int(nx), int(ny))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {text!r}: expected X0:X1:NX,Y0:Y1:NY ({exc})") from None

    def __str__(self) -> str:
        def num(v: float) -> str:
            text = repr(v)
            return text[:-2] if text.endswith(".0") else text
        return f"{num(self.x_min)}:{num(self.x_max)}:{self.nx},{num(self.y_min)}:{num(self.y_max)}:{self.ny}"

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linspace(self.x_min, self.x_max, self.nx), np.linspace(self.y_min, self.y_max, self.ny)

    def points(self) -> list[tuple[float, float]]:
        xs, ys = self.axes()
        return [(float(x), float(y)) for y in ys for x in xs]

    def __len__(self) -> int:
        return self.nx * self.ny


Grid = Union[GridSpec, Sequence[tuple[float, float]]]


def grid_points(grid: Grid) -> list[tuple[float, float]]:
    pts = grid.points() if isinstance(grid, GridSpec) else [(float(x), float(y)) for x, y in grid]
    if not pts:
        raise EmptyGridError()
    return pts


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("MINIGRAPH_THREADS", "1")))
    except ValueError:
        return 1


def sweep(fn: Callable[..., T], items: Iterable) -> list[T]:
    """Map ``fn`` over ``items`` in order; threads are capped by MINIGRAPH_THREADS."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
