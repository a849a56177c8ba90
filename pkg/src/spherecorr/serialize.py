"""Deterministic JSON emission.

Reports are compared byte-for-byte across reruns and worker counts, so the
writer makes the formatting explicit: keys sorted, floats as
17-significant-digit decimals (lossless for binary64), no locale or
whitespace surprises.
"""

from __future__ import annotations

import json

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(x, ".17g")


def dumps(obj) -> str:
    """Serialize ``obj`` to deterministic JSON text."""
    return _write(obj)


def _write(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, np.ndarray):
        return _write(obj.tolist())
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        body = ",".join(f"{json.dumps(str(k))}:{_write(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_write(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
