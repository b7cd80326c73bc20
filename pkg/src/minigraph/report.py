"""Structured analysis reports and CSV dumps."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__

SCHEMA_VERSION = 1
RUN_SEED = 20240601


def jsonable(value: Any) -> Any:
    """Recursively convert to JSON-safe values (non-finite floats become null)."""
    if isinstance(value, enum.Enum):
        return jsonable(value.value)
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": jsonable(value.real), "im": jsonable(value.imag)}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        return jsonable(value.item())
    return value


@dataclass
class AnalysisReport:
    """Result record shared by every check; serialises to deterministic JSON."""

    command: str
    inputs: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    version: str = __version__
    seed: int = RUN_SEED

    @property
    def verdict(self) -> str | None:
        return next(iter(self.verdicts.values()), None)

    def add_error(self, point, message: str) -> None:
        x, y = point
        self.errors.append({"x": float(x), "y": float(y), "error": str(message)})

    def to_dict(self) -> dict:
        return jsonable({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "checks": self.checks,
            "verdicts": self.verdicts,
            "details": self.details,
            "errors": self.errors,
            "version": self.version,
            "seed": self.seed,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
