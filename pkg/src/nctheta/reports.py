"""Deterministic JSON emission for verification reports.

Dictionaries are emitted with sorted keys, floats with 17 significant
digits, and complex numbers as {"im": ..., "re": ...} objects, so that
identical inputs always serialize to identical bytes.
"""

from __future__ import annotations

import numpy as np


def _format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"reports must contain finite numbers, got {x}")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _render(obj, indent: int, pad: str) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _render({"re": float(obj.real), "im": float(obj.imag)}, indent, pad)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{out}"'
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist(), indent, pad)
    inner = pad + " " * indent
    if isinstance(obj, dict):
        if any(not isinstance(k, str) for k in obj):
            raise TypeError("report keys must be strings")
        keys = sorted(obj)
        if not keys:
            return "{}"
        items = [f'{inner}"{k}": ' + _render(obj[k], indent, inner) for k in keys]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + _render(v, indent, inner) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)} into a report")


def render_report(obj) -> str:
    """Serialize a report object to deterministic JSON text."""
    return _render(obj, indent=2, pad="") + "\n"


def write_report(path, obj):
    text = render_report(obj)
    with open(path, "w") as fh:
        fh.write(text)
    return text
