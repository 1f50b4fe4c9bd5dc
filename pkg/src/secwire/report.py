"""Deterministic rendering of result objects to JSON or CSV.

Floats are always printed with %.10g and dicts in insertion order, so a rerun
with the same seed produces byte-identical output regardless of environment.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import ValidationError


def fmt_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x == float("inf"):
        return "Infinity"
    if x == float("-inf"):
        return "-Infinity"
    return "%.10g" % x


def _coerce(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_coerce(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_coerce(v) for v in obj]
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            if not isinstance(k, str):
                raise ValidationError(f"report keys must be strings, got {k!r}")
            out[k] = _coerce(v)
        return out
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise ValidationError(f"cannot render object of type {type(obj).__name__}")


def _render(obj, indent: int | None, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [_render(v, indent, level + 1) for v in obj]
        if indent is None:
            return "[" + ", ".join(items) + "]"
        pad, pad_in = " " * (indent * level), " " * (indent * (level + 1))
        return "[\n" + ",\n".join(pad_in + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_render(v, indent, level + 1)}" for k, v in obj.items()]
        if indent is None:
            return "{" + ", ".join(items) + "}"
        pad, pad_in = " " * (indent * level), " " * (indent * (level + 1))
        return "{\n" + ",\n".join(pad_in + it for it in items) + "\n" + pad + "}"
    raise ValidationError(f"cannot render object of type {type(obj).__name__}")


def render_json(obj, indent: int | None = 2) -> str:
    """Render to JSON text; indent None gives a single line."""
    return _render(_coerce(obj), indent, 0)


def flatten(obj, prefix: str = "") -> list:
    """Depth-first (key path, scalar) pairs; lists index as name[i]."""
    obj = _coerce(obj)
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = f"{prefix}.{k}" if prefix else k
            out.extend(flatten(v, key))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.extend(flatten(v, f"{prefix}[{i}]"))
    else:
        if isinstance(obj, float):
            obj = fmt_float(obj)
        elif isinstance(obj, bool):
            obj = "true" if obj else "false"
        elif obj is None:
            obj = ""
        out.append((prefix, obj))
    return out


def render_csv(obj) -> str:
    """One header row of flattened key paths, one row of values."""
    pairs = flatten(obj)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([k for k, _ in pairs])
    writer.writerow([v for _, v in pairs])
    return buf.getvalue()


def render_csv_rows(rows: list, common: dict | None = None) -> str:
    """CSV with one line per row dict, all sharing a header (union of keys).

    common, when given, is flattened and prepended to every row.
    """
    flat_rows = []
    header: list = []
    seen = set()
    for row in rows:
        merged = dict(common or {})
        merged.update(row)
        pairs = flatten(merged)
        flat_rows.append(dict(pairs))
        for k, _ in pairs:
            if k not in seen:
                seen.add(k)
                header.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for fr in flat_rows:
        writer.writerow([fr.get(k, "") for k in header])
    return buf.getvalue()
