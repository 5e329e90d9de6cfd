"""JSON problem files.

A problem file is a JSON object::

    {
      "n": 5,                         # optional, checked when present
      "A": [[...], ...],              # row-major nested lists
      "B": [[...], ...] | "identity",
      "dA": {"scale": 1e-6, "rows": [[...], ...]},   # optional, default 0
      "dB": ...,                                       # optional, default 0
      "order": [2.7, [2, -1], ...],   # optional target eigenvalues
      "weights": {"E": ..., "F": ...} # optional Higham weights
    }

An entry is a bare number or a ``[re, im]`` pair; ``"inf"`` is accepted in
``order`` for an infinite eigenvalue.  Built-in problems are available by
name (``sun5``, ``schur5``) through :func:`load_problem`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError

BUILTIN = ("sun5", "schur5")


@dataclass(frozen=True)
class ProblemFile:
    name: str
    A: np.ndarray
    B: np.ndarray
    dA: np.ndarray
    dB: np.ndarray
    order: list | None = None
    E: np.ndarray | None = None
    F: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.A.shape[0]


def _entry(v, where: str) -> complex:
    if isinstance(v, bool):
        raise ParseError(f"{where}: booleans are not matrix entries")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        return complex(v[0], v[1])
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity"):
        return complex(np.inf, 0.0)
    raise ParseError(f"{where}: expected a number or [re, im], got {v!r}")


def _matrix(obj, field: str, n: int | None) -> np.ndarray:
    if isinstance(obj, str):
        if n is None:
            raise ParseError(f"{field}: {obj!r} needs the dimension from A or 'n'")
        if obj == "identity":
            return np.eye(n, dtype=complex)
        if obj == "zero":
            return np.zeros((n, n), dtype=complex)
        raise ParseError(f"{field}: unknown matrix keyword {obj!r}")
    scale = 1.0
    rows = obj
    if isinstance(obj, dict):
        unknown = set(obj) - {"scale", "rows"}
        if unknown or "rows" not in obj:
            raise ParseError(f"{field}: a scaled matrix needs exactly 'rows' and optional 'scale'")
        scale = obj.get("scale", 1.0)
        if not isinstance(scale, (int, float)) or isinstance(scale, bool):
            raise ParseError(f"{field}.scale: expected a number, got {scale!r}")
        rows = obj["rows"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{field}: expected a non-empty list of rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionMismatch(f"{field}: ragged rows (lengths {sorted(widths)})")
    m = np.array([[_entry(v, f"{field}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)], dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ParseError(f"{field}: non-finite entry")
    return scale * m


def parse_problem(data: dict, name: str = "problem") -> ProblemFile:
    """Build a :class:`ProblemFile` from an already decoded JSON object."""
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    if "A" not in data or "B" not in data:
        raise ParseError("fields 'A' and 'B' are required")
    n = data.get("n")
    if n is not None and (not isinstance(n, int) or isinstance(n, bool) or n < 1):
        raise ParseError(f"n: expected a positive integer, got {n!r}")
    A = _matrix(data["A"], "A", n)
    n = A.shape[0] if n is None else n
    mats = {"A": A, "B": _matrix(data["B"], "B", n)}
    for key in ("dA", "dB"):
        mats[key] = _matrix(data[key], key, n) if key in data else np.zeros((n, n), dtype=complex)
    for key, m in mats.items():
        if m.shape != (n, n):
            raise DimensionMismatch(f"{key} is {m.shape[0]}x{m.shape[1]}, expected {n}x{n}")
    order = None
    if "order" in data:
        if not isinstance(data["order"], list) or len(data["order"]) != n:
            raise ParseError(f"order: expected a list of {n} eigenvalues")
        order = [_entry(v, f"order[{k}]") for k, v in enumerate(data["order"])]
    E = F = None
    if "weights" in data:
        w = data["weights"]
        if not isinstance(w, dict):
            raise ParseError("weights: expected an object with 'E' and/or 'F'")
        E = _matrix(w["E"], "weights.E", n).real if "E" in w else None
        F = _matrix(w["F"], "weights.F", n).real if "F" in w else None
        for key, m in (("weights.E", E), ("weights.F", F)):
            if m is not None and m.shape != (n, n):
                raise DimensionMismatch(f"{key} is {m.shape}, expected {(n, n)}")
    return ProblemFile(name=str(data.get("name", name)), A=mats["A"], B=mats["B"], dA=mats["dA"], dB=mats["dB"],
                       order=order, E=E, F=F)


def load_problem(path) -> ProblemFile:
    """Read a problem file, or a built-in problem by name.

    Raises
    ------
    ParseError
        Malformed JSON or schema violation; the message names the field.
    DimensionMismatch
        Matrices of inconsistent size.
    """
    p = str(path)
    if p in BUILTIN:
        text = resources.files("gsp.data").joinpath(f"{p}.json").read_text()
        src = p
    else:
        try:
            text = Path(p).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {p}: {exc}") from exc
        src = Path(p).stem
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_problem(data, name=src)
