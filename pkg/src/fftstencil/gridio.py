"""Grid files: CSV text and raw little-endian binary with a JSON sidecar.

CSV has one line per (cell, field): ``i1,...,id,f,value``.  Values are
written as the shortest decimal that round-trips to the same double, with a
trailing ``.0`` dropped, so reading back is exact.

Raw files hold ``float64`` little-endian values, row-major over the
spatial axes with the field index innermost.  ``PATH.meta.json`` carries
``dims``, ``fields``, ``dtype`` and ``order``.
"""

from __future__ import annotations

import json
import os
from itertools import product

import numpy as np

from fftstencil.grid import FieldGrid, GridShape

__all__ = ["GridFormatError", "format_value", "write_grid", "read_grid", "meta_path"]

FORMATS = ("csv", "raw")
_RAW_DTYPE = "<f8"


class GridFormatError(ValueError):
    """A grid file is malformed; the message names the line or byte count."""


def meta_path(path) -> str:
    return os.fspath(path) + ".meta.json"


def format_value(x: float) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def _detect_format(path: str) -> str:
    if os.path.exists(meta_path(path)):
        return "raw"
    return "csv"


def write_grid(grid: FieldGrid, path, format: str = "csv") -> None:
    """Write ``grid`` to ``path`` in ``csv`` or ``raw`` form."""
    path = os.fspath(path)
    if format == "csv":
        data = grid.data
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            for cell in product(*(range(n) for n in grid.shape.dims)):
                prefix = ",".join(map(str, cell))
                for f, v in enumerate(data[cell]):
                    fh.write(f"{prefix},{f},{format_value(v)}\n")
    elif format == "raw":
        grid.data.astype(_RAW_DTYPE).tofile(path)
        meta = {
            "dims": list(grid.shape.dims),
            "fields": grid.shape.fields,
            "dtype": "float64-le",
            "order": "row-major, field innermost",
        }
        with open(meta_path(path), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown grid format {format!r}; expected one of {FORMATS}")


def _read_raw(path: str) -> FieldGrid:
    try:
        with open(meta_path(path), encoding="utf-8") as fh:
            meta = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"{meta_path(path)}: bad metadata at line {exc.lineno}: {exc.msg}") from None
    try:
        dims = tuple(int(n) for n in meta["dims"])
        fields = int(meta["fields"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GridFormatError(f"{meta_path(path)}: missing or invalid key ({exc})") from None
    if meta.get("dtype", "float64-le") != "float64-le":
        raise GridFormatError(f"{meta_path(path)}: unsupported dtype {meta['dtype']!r}")
    shape = GridShape(dims, fields)
    expected = shape.size * fields * 8
    actual = os.path.getsize(path)
    if actual != expected:
        raise GridFormatError(
            f"{path}: expected {expected} bytes for dims {dims} x {fields} fields, found {actual}"
        )
    data = np.fromfile(path, dtype=_RAW_DTYPE).astype(np.float64)
    return FieldGrid(shape, data.reshape(shape.array_shape))


def _read_csv(path: str) -> FieldGrid:
    rows = []
    width = None
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
                if width < 3:
                    raise GridFormatError(f"{path}:{lineno}: need at least one index, a field and a value")
            elif len(parts) != width:
                raise GridFormatError(f"{path}:{lineno}: expected {width} columns, found {len(parts)}")
            try:
                idx = tuple(int(p) for p in parts[:-1])
                value = float(parts[-1])
            except ValueError:
                raise GridFormatError(f"{path}:{lineno}: cannot parse {line!r}") from None
            if min(idx) < 0:
                raise GridFormatError(f"{path}:{lineno}: negative index")
            if not np.isfinite(value):
                raise GridFormatError(f"{path}:{lineno}: non-finite value")
            rows.append((lineno, idx, value))
    if not rows:
        raise GridFormatError(f"{path}: empty grid file")
    idx = np.array([r[1] for r in rows])
    extent = tuple(int(n) + 1 for n in idx.max(axis=0))
    shape = GridShape(extent[:-1], extent[-1])
    data = np.full(shape.array_shape, np.nan)
    seen = np.zeros(shape.array_shape, dtype=bool)
    for lineno, key, value in rows:
        if seen[key]:
            raise GridFormatError(f"{path}:{lineno}: duplicate entry {key}")
        seen[key] = True
        data[key] = value
    if not seen.all():
        missing = tuple(int(i) for i in np.argwhere(~seen)[0])
        raise GridFormatError(f"{path}: no value for entry {missing}")
    return FieldGrid(shape, data)


def read_grid(path, format: str | None = None) -> FieldGrid:
    """Read a grid written by :func:`write_grid`.

    The format is inferred from the presence of a sidecar file unless given.
    """
    path = os.fspath(path)
    format = format or _detect_format(path)
    if format == "raw":
        return _read_raw(path)
    if format == "csv":
        return _read_csv(path)
    raise ValueError(f"unknown grid format {format!r}; expected one of {FORMATS}")
