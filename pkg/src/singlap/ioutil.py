"""Small helpers for deterministic text output.

Every float the package writes goes through ``fmt`` (15 significant
digits, locale independent), so repeated runs with identical inputs
produce byte-identical CSV and JSON files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import FormatError

FLOAT_FMT = "%.15g"


def fmt(x: float) -> str:
    """Render one float at 15 significant digits (``inf`` stays ``inf``)."""
    return FLOAT_FMT % (x,)


def round15(x: float) -> float:
    """Round a float to 15 significant digits (idempotent for output)."""
    if x != x or math.isinf(x):
        return x
    return float(FLOAT_FMT % (x,))


def json_ready(obj: Any) -> Any:
    """Recursively convert to plain JSON types with floats at 15 digits."""
    if isinstance(obj, dict):
        return {k: json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round15(float(obj))
    return obj


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(json_ready(obj), indent=2) + "\n")
    return path


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc.msg}", line=exc.lineno) from None


def write_csv(path: str | Path, header: str, rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [header]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: str | Path, expected_header: str) -> np.ndarray:
    """Parse a delimited file written by :func:`write_csv`.

    Raises :class:`FormatError` (with the offending line number) on a bad
    header, a wrong field count, an unparsable number, or an empty body.
    """
    ncol = expected_header.count(",") + 1
    rows: list[tuple[float, ...]] = []
    lineno = 0
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if lineno == 1:
                if line != expected_header:
                    raise FormatError(
                        f"expected header {expected_header!r}, got {line!r}", line=1
                    )
                continue
            if not line:
                raise FormatError("blank line inside data section", line=lineno)
            parts = line.split(",")
            if len(parts) != ncol:
                raise FormatError(
                    f"expected {ncol} comma-separated fields, got {len(parts)}",
                    line=lineno,
                )
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError:
                raise FormatError(f"unparsable number in {line!r}", line=lineno) from None
    if not rows:
        raise FormatError("no data rows", line=lineno + 1)
    return np.asarray(rows, dtype=float)
