"""Reading and writing vector sets as JSON documents.

File layout::

    {
      "d": 3,
      "N": 9,
      "accuracy": "1e-32",          # optional declared input accuracy
      "labels": ["00", "01", ...],  # optional
      "entries": [[re, im], ...]    # N*d pairs, vector after vector
    }

``entries`` is the row-major flattening of the ``N x d`` matrix whose rows
are the vectors.  Each component may be a JSON number or a decimal string;
strings with 34+ significant digits are parsed with correct rounding to
double precision, and can be kept verbatim in extended precision with
:func:`load_vectors_mp`.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import DEFAULT_TOLERANCES, StructureError, VectorSet

__all__ = [
    "VectorFileError",
    "VectorFile",
    "load_vectors",
    "load_vector_file",
    "load_vectors_mp",
    "save_vectors",
    "dumps_vectors",
]


class VectorFileError(StructureError):
    """Malformed or inconsistent vector file.  ``line`` is 1-based when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class VectorFile:
    """A parsed vector file: the vector set plus declared metadata."""

    vectors: VectorSet
    accuracy: float | None
    meta: dict[str, Any]


def _line_of(text: str, needle: str) -> int | None:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _component(x: Any) -> float:
    if isinstance(x, bool):
        raise ValueError("boolean is not a number")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        return float(x.strip())
    raise ValueError(f"expected number or decimal string, got {type(x).__name__}")


def _parse(text: str, path: str | None) -> tuple[dict[str, Any], list]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise VectorFileError(f"parse error: {exc.msg}", path, exc.lineno) from None
    if not isinstance(doc, dict):
        raise VectorFileError("top level must be an object", path, 1)
    for key in ("d", "N", "entries"):
        if key not in doc:
            raise VectorFileError(f"missing field '{key}'", path, None)
    d, n = doc["d"], doc["N"]
    if not (isinstance(d, int) and isinstance(n, int) and d >= 1 and n >= 1):
        raise VectorFileError("fields d and N must be positive integers", path, _line_of(text, '"d"'))
    entries = doc["entries"]
    if not isinstance(entries, list):
        raise VectorFileError("'entries' must be a list", path, _line_of(text, '"entries"'))
    if len(entries) != d * n:
        raise VectorFileError(
            f"inconsistent d/N: expected {d * n} entries for d={d}, N={n}, found {len(entries)}",
            path,
            _line_of(text, '"entries"'),
        )
    return doc, entries


def load_vector_file(path: str | os.PathLike, norm_tol: float | None = None) -> VectorFile:
    """Parse a vector file into a :class:`VectorFile`.

    Vectors must be unit-norm within ``max(accuracy, norm_tol)`` where
    ``accuracy`` is the declared input accuracy (if any) and ``norm_tol``
    defaults to the global norm tolerance.
    """
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    doc, entries = _parse(text, path)
    d, n = doc["d"], doc["N"]
    flat = np.empty(d * n, dtype=complex)
    for i, e in enumerate(entries):
        try:
            if not (isinstance(e, list) and len(e) == 2):
                raise ValueError("each entry must be a [re, im] pair")
            flat[i] = complex(_component(e[0]), _component(e[1]))
        except ValueError as exc:
            raise VectorFileError(f"entry {i}: {exc}", path, _line_of(text, json.dumps(e)) if isinstance(e, list) else None) from None
    acc = doc.get("accuracy")
    accuracy = None if acc is None else float(acc)
    tol = DEFAULT_TOLERANCES.norm if norm_tol is None else norm_tol
    if accuracy is not None:
        tol = max(tol, accuracy)
    labels = doc.get("labels")
    arr = flat.reshape(n, d).T
    try:
        vs = VectorSet(arr, tuple(labels) if labels is not None else None, norm_tol=None)
    except StructureError as exc:
        raise VectorFileError(str(exc), path, None) from None
    dev = float(np.abs(np.linalg.norm(vs.vectors, axis=0) - 1.0).max())
    if dev > tol:
        raise VectorFileError(f"vectors not normalised beyond declared accuracy (max |norm-1| = {dev:.3e} > {tol:.1e})", path)
    vs = VectorSet(vs.vectors, vs.labels, norm_tol=max(tol, dev))
    meta = {k: v for k, v in doc.items() if k not in ("entries",)}
    return VectorFile(vs, accuracy, meta)


def load_vectors(path: str | os.PathLike, norm_tol: float | None = None) -> VectorSet:
    """Read a vector set (double precision)."""
    return load_vector_file(path, norm_tol).vectors


def load_vectors_mp(path: str | os.PathLike, dps: int = 50):
    """Read the entries of a vector file in extended precision.

    Returns ``(d, N, rows)`` where ``rows[j][i]`` is the ``i``-th component
    of vector ``j`` as an :class:`mpmath.mpc` at ``dps`` decimal digits.
    """
    import mpmath

    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    doc, entries = _parse(text, path)
    d, n = doc["d"], doc["N"]
    with mpmath.workdps(dps):
        vals = [mpmath.mpc(mpmath.mpf(str(re)), mpmath.mpf(str(im))) for re, im in entries]
    return d, n, [vals[j * d : (j + 1) * d] for j in range(n)]


def dumps_vectors(v: VectorSet, accuracy: float | None = None, **meta: Any) -> str:
    """Serialise ``v``; floats are written with ``repr`` so they round-trip
    bit-exactly."""
    rows = v.vectors.T
    doc: dict[str, Any] = {"d": v.d, "N": v.N}
    if accuracy is not None:
        doc["accuracy"] = repr(float(accuracy))
    if v.labels is not None:
        doc["labels"] = list(v.labels)
    doc.update(meta)
    lines = [f"  [{float(z.real)!r}, {float(z.imag)!r}]" for z in rows.ravel()]
    head = json.dumps(doc, indent=2)[:-2]
    return head + ',\n  "entries": [\n' + ",\n".join("  " + s for s in lines) + "\n  ]\n}\n"


def save_vectors(v: VectorSet, path: str | os.PathLike, accuracy: float | None = None, **meta: Any) -> None:
    """Write ``v`` to ``path`` in the JSON vector-file format."""
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(dumps_vectors(v, accuracy, **meta))
