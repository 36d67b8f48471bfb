from typing import Any, List

import numpy as np
import orjson


def max_abs(a: np.ndarray) -> float:
    """Largest absolute entry; 0 for an empty array."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def identity_residual(product: np.ndarray) -> float:
    """max |P - I| over all entries."""
    return max_abs(product - np.eye(len(product)))


def complex_pair(z: complex) -> List[float]:
    z = complex(z)
    # Normalize negative zeros so repeated runs print identically
    return [z.real + 0.0, z.imag + 0.0]


def format_float(x: float) -> str:
    return f"{x:.17g}"


def format_complex(z: complex) -> str:
    re, im = complex_pair(z)
    return f"{format_float(re)}{'+' if im >= 0 else '-'}{format_float(abs(im))}i"


def dump_json(data: Any) -> bytes:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_APPEND_NEWLINE)
