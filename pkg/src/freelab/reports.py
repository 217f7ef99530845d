"""Run reports: deterministic JSON and the fixed-column CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .wick.algebra import GaussianRational

CSV_SCHEMA = 1
CSV_COLUMNS = ("n", "N", "k", "trials", "seed", "stat", "value", "bound", "pass")


def to_jsonable(obj):
    """Recursively convert to JSON types; rationals become ``"p/q"``, complex numbers ``{"re", "im"}``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, GaussianRational):
        return {"re": to_jsonable(obj.re), "im": to_jsonable(obj.im)}
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


@dataclass
class Row:
    stat: str
    value: object
    bound: object = None
    passed: object = None
    n: object = None
    N: object = None
    k: object = None
    trials: object = None
    seed: object = None

    def cells(self):
        vals = {
            "n": self.n, "N": self.N, "k": self.k, "trials": self.trials, "seed": self.seed,
            "stat": self.stat, "value": self.value, "bound": self.bound, "pass": self.passed,
        }
        return [_cell(vals[c]) for c in CSV_COLUMNS]

    def to_dict(self):
        return {
            "n": self.n, "N": self.N, "k": self.k, "trials": self.trials, "seed": self.seed,
            "stat": self.stat, "value": self.value, "bound": self.bound, "pass": self.passed,
        }


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


@dataclass
class RunReport:
    command: str
    config: dict
    rows: list = field(default_factory=list)
    details: object = None
    passed: bool = True
    warnings: list = field(default_factory=list)

    def add(self, row: Row):
        if row.seed is None:
            row.seed = self.config.get("seed")
        self.rows.append(row)
        if row.passed is False:
            self.passed = False

    def to_dict(self):
        return {
            "command": self.command,
            "config": self.config,
            "rows": [r.to_dict() for r in self.rows],
            "details": self.details,
            "pass": self.passed,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(to_jsonable(self.to_dict()), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={CSV_SCHEMA}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()
