"""JSON matrix files.

A matrix file looks like::

    {"order": 6, "shape": [2, 3], "entries": [[{"re": 0.408, "im": 0.0}, ...], ...]}

Rectangular matrices use ``"rows"`` and ``"cols"`` instead of ``"order"``.
Floats are written with ``repr`` so that reading and re-writing a file
reproduces it byte for byte.
"""

from __future__ import annotations

import json
import math
import sys

import numpy as np

from .errors import ParseError
from .linalg import BipartiteShape, ComplexMatrix


def matrix_to_dict(m, shape: BipartiteShape | None = None) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ParseError("only 2-D matrices can be serialised")
    out: dict = {}
    if m.shape[0] == m.shape[1]:
        out["order"] = m.shape[0]
    else:
        out["rows"], out["cols"] = m.shape
    if shape is not None:
        out["shape"] = [shape.d_A, shape.d_B]
    out["entries"] = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in m]
    return out


def dumps_matrix(m, shape: BipartiteShape | None = None) -> str:
    return json.dumps(matrix_to_dict(m, shape)) + "\n"


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise ParseError(f"{where}: non-finite value")
    return float(x)


def matrix_from_dict(data) -> tuple[ComplexMatrix, BipartiteShape | None]:
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    if "entries" not in data:
        raise ParseError("missing field 'entries'")
    entries = data["entries"]
    if not isinstance(entries, list) or not entries or not all(isinstance(r, list) for r in entries):
        raise ParseError("'entries' must be a nonempty list of rows")
    if "order" in data:
        rows = cols = data["order"]
    elif "rows" in data and "cols" in data:
        rows, cols = data["rows"], data["cols"]
    else:
        raise ParseError("need 'order' or both 'rows' and 'cols'")
    if not all(isinstance(x, int) and x > 0 for x in (rows, cols)):
        raise ParseError("dimensions must be positive integers")
    if len(entries) != rows:
        raise ParseError(f"'entries' has {len(entries)} rows, expected {rows}")
    m = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(entries):
        if len(row) != cols:
            raise ParseError(f"entries[{i}] has {len(row)} columns, expected {cols}")
        for j, z in enumerate(row):
            where = f"entries[{i}][{j}]"
            if not isinstance(z, dict) or set(z) != {"re", "im"}:
                raise ParseError(f"{where}: expected an object with keys 're' and 'im'")
            m[i, j] = complex(_number(z["re"], where + ".re"), _number(z["im"], where + ".im"))
    shape = None
    if "shape" in data:
        s = data["shape"]
        if not (isinstance(s, list) and len(s) == 2 and all(isinstance(x, int) for x in s)):
            raise ParseError("'shape' must be a pair of integers")
        try:
            shape = BipartiteShape(*s)
        except ValueError as e:
            raise ParseError(f"'shape': {e}") from None
        if shape.order != rows or rows != cols:
            raise ParseError(f"shape {shape} does not match a {rows}x{cols} matrix")
    return m, shape


def loads_matrix(text: str) -> tuple[ComplexMatrix, BipartiteShape | None]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return matrix_from_dict(data)


def read_matrix(path: str) -> tuple[ComplexMatrix, BipartiteShape | None]:
    """Read a matrix file; ``"-"`` reads standard input."""
    if path == "-":
        return loads_matrix(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads_matrix(fh.read())
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from None


def write_matrix(path: str, m, shape: BipartiteShape | None = None) -> None:
    text = dumps_matrix(m, shape)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
