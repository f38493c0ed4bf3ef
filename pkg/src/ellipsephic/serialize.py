"""Canonical JSON rendering: sorted keys, reals at 17 significant digits.

Python's json module cannot hook float formatting, so this is a small
hand-rolled emitter. Output is deterministic byte-for-byte for equal inputs,
which the caching and determinism contracts rely on.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .errors import NonFiniteError


def format_real(x: float) -> str:
    if not math.isfinite(x):
        raise NonFiniteError(f"cannot serialize non-finite real {x!r}")
    if x == 0.0:
        return "0"  # normalize -0.0
    return format(float(x), ".17g")


def _emit(obj: Any, out: list, indent: int | None, depth: int) -> None:
    pad = "" if indent is None else "\n" + " " * (indent * (depth + 1))
    endpad = "" if indent is None else "\n" + " " * (indent * depth)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append("," if indent is None else ",")
            out.append(pad)
            _emit(item, out, indent, depth + 1)
        out.append(endpad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(pad)
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(": " if indent is not None else ":")
            _emit(obj[key], out, indent, depth + 1)
        out.append(endpad + "}")
    else:
        raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def dumps_canonical(obj: Any, indent: int | None = None) -> str:
    """Serialize to canonical JSON (sorted keys, '.17g' reals)."""
    out: list = []
    _emit(obj, out, indent, 0)
    return "".join(out)
