"""Sampled (rate, exponent) curves and their CSV / JSON forms.

CSV layout::

    # label: <text>
    # params: <json object>
    rate,exponent
    0.0,0.446287102628
    ...

Numbers are written with 12 significant digits, so a curve read back from
CSV equals the JSON form exactly (both carry the rounded values).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import MacexpError

SIG_DIGITS = 12
MONOTONE_SLACK = 1e-9


def fmt(x: float) -> str:
    return format(float(x) + 0.0, f".{SIG_DIGITS}g")  # + 0.0 drops the sign of -0.0


def rounded(x: float) -> float:
    return float(fmt(x))


@dataclass(frozen=True)
class ExponentCurve:
    points: tuple
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple((float(r), float(e)) for r, e in self.points)
        object.__setattr__(self, "points", pts)
        rates = np.array([r for r, _ in pts])
        exps = np.array([e for _, e in pts])
        if len(pts) and np.any(np.diff(rates) <= 0):
            raise MacexpError("curve rates must be strictly increasing")
        if np.any(exps < 0):
            raise MacexpError("curve exponents must be non-negative")
        if np.any(np.diff(exps) > MONOTONE_SLACK):
            raise MacexpError("curve exponents must be non-increasing in rate")

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for r, _ in self.points])

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e for _, e in self.points])

    def to_json(self) -> dict:
        return {"label": self.label, "params": self.params,
                "points": [[rounded(r), rounded(e)] for r, e in self.points]}

    @classmethod
    def from_json(cls, doc) -> "ExponentCurve":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(tuple(tuple(p) for p in doc["points"]), doc.get("label", ""),
                   doc.get("params", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# label: {self.label}\n")
        buf.write(f"# params: {json.dumps(self.params, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rate", "exponent"])
        for r, e in self.points:
            w.writerow([fmt(r), fmt(e)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ExponentCurve":
        label, params, rows = "", {}, []
        lines = text.splitlines()
        body = []
        for line in lines:
            if line.startswith("# label:"):
                label = line[len("# label:"):].strip()
            elif line.startswith("# params:"):
                params = json.loads(line[len("# params:"):])
            elif line.strip():
                body.append(line)
        reader = csv.reader(body)
        header = next(reader)
        if header != ["rate", "exponent"]:
            raise MacexpError(f"unexpected CSV header {header}")
        for r, e in reader:
            rows.append((float(r), float(e)))
        return cls(tuple(rows), label, params)


def sample_curve(fn: Callable[[float], float], rates: Iterable[float], label: str = "",
                 params: dict | None = None) -> ExponentCurve:
    """Evaluate ``fn`` on a rate grid (clamped at 0) and wrap it as a curve."""
    pts = [(float(r), max(float(fn(r)), 0.0)) for r in rates]
    return ExponentCurve(tuple(pts), label, dict(params or {}))
