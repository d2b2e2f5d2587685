"""Flat-file snapshot format: one JSON header line, then raw field data.

The header is a single line of JSON (terminated by a newline) describing
the grid, the field kind and the payload encoding; the payload is the
C-order array as little-endian 64-bit floats, with complex data stored as
interleaved (re, im) pairs.  Round trips are bit-exact and the format is
readable from any language with a JSON parser and a binary reader.

Version is explicit: readers reject headers whose version they do not
implement instead of guessing.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fields import FieldSnapshot
from .modes import KGrid, PhysicalConstants, build_kgrid

FORMAT_NAME = "photonlab-field"
FORMAT_VERSION = 1


class FieldIOError(Exception):
    """Dump/load failure; `field` names the offending header entry if any."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def dump_field(snapshot: FieldSnapshot, path) -> Path:
    """Write a snapshot; returns the path written."""
    path = Path(path)
    grid = snapshot.grid
    complex_data = bool(np.iscomplexobj(snapshot.data))
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": snapshot.kind,
        "time": snapshot.time,
        "dim": grid.dim,
        "n_points": grid.n_points,
        "box_length": grid.box_length,
        "constants": {"c": grid.constants.c, "eps0": grid.constants.eps0,
                      "hbar": grid.constants.hbar},
        "components": 3 if grid.dim == 3 else 1,
        "dtype": "complex128" if complex_data else "float64",
        "layout": "row-major",
        "endianness": "little",
    }
    payload = np.ascontiguousarray(snapshot.data).astype(
        "<c16" if complex_data else "<f8").tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
            fh.write(b"\n")
            fh.write(payload)
    except OSError as e:
        raise FieldIOError("io", f"cannot write {path}: {e}") from e
    return path


_REQUIRED = {
    "format": str, "version": int, "kind": str, "time": (int, float),
    "dim": int, "n_points": int, "box_length": (int, float),
    "components": int, "dtype": str, "layout": str, "endianness": str,
}


def _parse_header(raw: bytes) -> dict:
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FieldIOError("header", f"not valid JSON: {e}") from e
    if not isinstance(header, dict):
        raise FieldIOError("header", "expected a JSON object")
    for key, typ in _REQUIRED.items():
        if key not in header:
            raise FieldIOError(key, "missing from header")
        if not isinstance(header[key], typ) or isinstance(header[key], bool):
            raise FieldIOError(key, f"has invalid type {type(header[key]).__name__}")
    if header["format"] != FORMAT_NAME:
        raise FieldIOError("format", f"unknown format {header['format']!r}")
    if header["version"] != FORMAT_VERSION:
        raise FieldIOError(
            "version", f"incompatible format version {header['version']}; "
            f"this build reads version {FORMAT_VERSION}")
    if header["endianness"] != "little":
        raise FieldIOError("endianness", f"unsupported {header['endianness']!r}")
    if header["layout"] != "row-major":
        raise FieldIOError("layout", f"unsupported {header['layout']!r}")
    return header


def load_field(path, grid: KGrid | None = None) -> FieldSnapshot:
    """Read a snapshot; pass `grid` to reuse one instead of rebuilding it."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise FieldIOError("io", f"cannot read {path}: {e}") from e
    sep = blob.find(b"\n")
    if sep < 0:
        raise FieldIOError("header", "no header line found")
    header = _parse_header(blob[:sep])
    payload = blob[sep + 1:]

    dim, n = header["dim"], header["n_points"]
    if grid is not None:
        if (grid.dim, grid.n_points) != (dim, n) or \
                grid.box_length != header["box_length"]:
            raise FieldIOError("grid", "supplied grid does not match the header")
    else:
        cdict = header.get("constants", {})
        const = PhysicalConstants(c=cdict.get("c", 1.0),
                                  eps0=cdict.get("eps0", 1.0),
                                  hbar=cdict.get("hbar", 1.0))
        grid = build_kgrid(dim, n, header["box_length"], const)

    shape = (3,) + grid.shape if dim == 3 else grid.shape
    count = int(np.prod(shape))
    is_complex = header["dtype"] == "complex128"
    expected = count * (16 if is_complex else 8)
    if header["dtype"] not in ("float64", "complex128"):
        raise FieldIOError("dtype", f"unsupported dtype {header['dtype']!r}")
    if len(payload) != expected:
        raise FieldIOError(
            "payload", f"expected {expected} bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype="<c16" if is_complex else "<f8")
    data = data.reshape(shape).copy()
    return FieldSnapshot(grid=grid, kind=header["kind"],
                         time=float(header["time"]), data=data)
