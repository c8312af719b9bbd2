"""CSV/JSON writers with a fixed float format.

Floats are written with 9 significant digits (``%.9g``) in both CSV and
JSON so identical inputs give identical bytes and the two formats agree.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

SIG_DIGITS = 9


def fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{SIG_DIGITS}g}"
    if x is None:
        return ""
    return str(x)


def json_ready(obj: Any) -> Any:
    """Recursively round floats to the CSV precision; non-finite become null."""
    if isinstance(obj, dict):
        return {str(k): json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(fmt(x)) if math.isfinite(x) else None
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(json_ready(obj), indent=2) + "\n"


def write_json(path: Path, obj: Any) -> Path:
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]
