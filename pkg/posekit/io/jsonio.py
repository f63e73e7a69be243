"""
JSON text with floats written to 17 significant digits.

`json.dumps` writes floats with `repr`, which is already round-trip exact but
varies in length; files here always carry 17 significant digits so every value
in a file has the same precision and re-reading reproduces the bits.
"""

import json
import math
from pathlib import Path

import numpy as np

from posekit.exceptions import MalformedInput

FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"[!] Cannot serialize non-finite float {value!r}.")
    text = format(value, FLOAT_FORMAT)
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int | None, level: int) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict(), indent, level)

    if isinstance(obj, dict):
        items = [(json.dumps(str(k), ensure_ascii=False), _encode(v, indent, level + 1)) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
        pad, inner = " " * (indent * level), " " * (indent * (level + 1))
        return "{\n" + ",\n".join(f"{inner}{k}: {v}" for k, v in items) + "\n" + pad + "}"

    if isinstance(obj, (list, tuple)):
        parts = [_encode(v, indent, level + 1) for v in obj]
        if not parts:
            return "[]"
        nested = any(isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj)
        if indent is None or not nested:
            return "[" + ", ".join(parts) + "]"
        pad, inner = " " * (indent * level), " " * (indent * (level + 1))
        return "[\n" + ",\n".join(inner + p for p in parts) + "\n" + pad + "]"

    raise TypeError(f"[!] Object of type {type(obj).__name__} is not JSON serializable.")


def dumps(obj, indent: int | None = None) -> str:
    """Serialize `obj` (dicts, lists, numbers, strings, numpy arrays, objects with `to_dict`)."""
    return _encode(obj, indent, 0)


def write_json(path: str | Path, obj, indent: int | None = 2):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(obj, indent=indent))
        handle.write("\n")


def read_json(path: str | Path):
    """Parse a JSON file; syntax and encoding errors are reported with their line."""
    raw = Path(path).read_bytes()
    try:
        return json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as error:
        raise MalformedInput(path, raw.count(b"\n", 0, error.start) + 1, "invalid UTF-8") from None
    except json.JSONDecodeError as error:
        raise MalformedInput(path, error.lineno, f"invalid JSON ({error.msg})") from None
