"""Number formatting shared by the report writers.

Machine-readable output uses 17 significant digits (enough to round-trip a
double); human-readable output uses 6.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np


def fmt17(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def fmt6(x: float) -> str:
    return format(float(x), ".6g")


def json_text(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialise nested dicts/lists/scalars to JSON, writing floats with 17
    significant digits (``NaN``/``inf`` become ``null``)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {json_text(v, indent, _level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(json_text(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + json_text(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt17(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
