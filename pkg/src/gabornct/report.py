"""Serializable experiment records and their JSON/CSV emitters.

Floats are written with 17 significant digits, which round-trips every
IEEE double, and keys keep insertion order, so a report emitted twice from
the same data is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy and number-tower values into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return {"p": obj.numerator, "q": obj.denominator}
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    return json.dumps(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(jsonable(obj), indent, 0) + "\n"


@dataclass
class Report:
    """A named record of an experiment or check.

    ``data`` holds the results; item access is forwarded to it.
    """

    kind: str
    data: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.data[key]

    def __contains__(self, key):
        return key in self.data

    def get(self, key, default=None):
        return self.data.get(key, default)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **jsonable(self.data)}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        kind = d.pop("kind")
        return cls(kind, d)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_text(path, text: str) -> str:
    path = os.fspath(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def emit(report: Report, path, fmt: str = "json") -> str:
    """Write ``report`` to ``path`` as JSON, or its tabular part as CSV.

    For ``fmt="csv"`` the report must carry ``csv_header`` and ``csv_rows``
    entries in its data.
    """
    if fmt == "json":
        return write_text(path, report.to_json())
    if fmt == "csv":
        return write_text(path, csv_text(report["csv_header"], report.get("csv_rows", [])))
    raise ValueError(f"unknown format {fmt!r}")


def signal_csv(values) -> str:
    """One row per sample: ``re,im``."""
    values = np.asarray(values, dtype=complex)
    return csv_text(["re", "im"], ((float(v.real), float(v.imag)) for v in values))


def grid_csv(grid) -> str:
    """Row-major complex grid; each row lists ``re_j,im_j`` pairs."""
    grid = np.asarray(grid, dtype=complex)
    header = [f"{p}_{j}" for j in range(grid.shape[1]) for p in ("re", "im")]
    rows = ([x for v in row for x in (float(v.real), float(v.imag))] for row in grid)
    return csv_text(header, rows)
