"""
Deterministic JSON reports.

Keys are sorted, rationals become "p/q" strings, and floats are printed with
17 significant digits, so one set of inputs always yields the same bytes.
Non-finite floats have no JSON literal and are written as the strings
"inf", "-inf" and "nan".
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np


def rational_str(q) -> str:
    q = Fraction(q)
    return "%d/%d" % (q.numerator, q.denominator)


def normalize(obj):
    """Plain JSON data with the report conventions applied (floats kept as floats)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if hasattr(obj, "to_json"):
        return normalize(obj.to_json())
    raise TypeError("cannot serialize %r" % type(obj).__name__)


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, float):
        return "%.17g" % obj
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ["%s%s: %s" % (pad, json.dumps(k), _encode(obj[k], indent, level + 1)) for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    return json.dumps(obj)


def dumps(doc, indent=2) -> str:
    return _encode(normalize(doc), indent, 0) + "\n"


def make_report(command: str, config: dict, results=None, passed=None, **extra) -> dict:
    doc = {"command": command, "config": config, "results": list(results or [])}
    if passed is not None:
        doc["passed"] = bool(passed)
    doc.update(extra)
    return doc


def emit_report(doc, path=None, stream=None) -> str:
    """Serialize ``doc``; write it to ``path`` when given, else to ``stream`` if given."""
    text = dumps(doc)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    elif stream is not None:
        stream.write(text)
    return text
