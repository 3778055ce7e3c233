"""
File formats for fields, matrices and tables.

Binary field layout (little-endian):
    magic b"RSC1" | n: int64 | L: float64 | n^3 complex128 (re, im interleaved)
Binary matrix layout (little-endian, row-major):
    magic b"RSM1" | rows: int64 | cols: int64 | rows*cols complex128
CSV tables carry a header row and one record per line.
"""

import logging
import struct
from pathlib import Path
from typing import Dict, Sequence, Union

import numpy as np

from ..core.error_handler import ShapeError
from .grid import Field, make_grid

logger = logging.getLogger("relscat.spectral.field_io")

FIELD_MAGIC = b"RSC1"
MATRIX_MAGIC = b"RSM1"
_FIELD_HEADER = struct.Struct("<4sqd")
_MATRIX_HEADER = struct.Struct("<4sqq")

PathLike = Union[str, Path]


def write_field(path: PathLike, f: Field) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _FIELD_HEADER.pack(FIELD_MAGIC, f.grid.n, f.grid.L)
    payload = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    path.write_bytes(header + payload)
    logger.debug(f"Wrote field n={f.grid.n} to {path}")
    return path


def read_field(path: PathLike) -> Field:
    """
    Read a binary field file.

    Raises:
        ShapeError: bad magic or payload size
    """
    data = Path(path).read_bytes()
    if len(data) < _FIELD_HEADER.size:
        raise ShapeError(f"{path}: truncated field header")
    magic, n, L = _FIELD_HEADER.unpack_from(data)
    if magic != FIELD_MAGIC:
        raise ShapeError(f"{path}: not a field file (magic {magic!r})")
    grid = make_grid(int(n), float(L))
    payload = np.frombuffer(data, dtype="<c16", offset=_FIELD_HEADER.size)
    if payload.size != grid.n**3:
        raise ShapeError(f"{path}: payload has {payload.size} values, expected {grid.n ** 3}")
    return Field(grid, payload.astype(complex).reshape(grid.shape))


def write_matrix(path: PathLike, matrix: np.ndarray) -> Path:
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.ndim != 2:
        raise ShapeError(f"matrix must be 2-D, got shape {matrix.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = matrix.shape
    header = _MATRIX_HEADER.pack(MATRIX_MAGIC, rows, cols)
    path.write_bytes(header + np.ascontiguousarray(matrix, dtype="<c16").tobytes())
    return path


def read_matrix(path: PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _MATRIX_HEADER.size:
        raise ShapeError(f"{path}: truncated matrix header")
    magic, rows, cols = _MATRIX_HEADER.unpack_from(data)
    if magic != MATRIX_MAGIC:
        raise ShapeError(f"{path}: not a matrix file (magic {magic!r})")
    payload = np.frombuffer(data, dtype="<c16", offset=_MATRIX_HEADER.size)
    if payload.size != rows * cols:
        raise ShapeError(f"{path}: payload has {payload.size} values, expected {rows * cols}")
    return payload.astype(complex).reshape(rows, cols)


def write_radial_csv(path: PathLike, r: np.ndarray, values: np.ndarray) -> Path:
    """Radial profile with columns r, re, im."""
    values = np.asarray(values, dtype=complex)
    return write_table(
        path, {"r": np.asarray(r, dtype=float), "re": values.real, "im": values.imag}
    )


def write_table(path: PathLike, columns: Dict[str, Sequence]) -> Path:
    """
    Write equal-length columns as CSV in insertion order.

    Numbers are written with 12 significant digits so that reruns produce
    identical files.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[name]) for name in names]
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ShapeError(f"table columns differ in length: {sorted(lengths)}")

    def fmt(value: object) -> str:
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return f"{float(value):.12e}"
        return str(value)

    lines = [",".join(names)]
    for row in zip(*arrays):
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"Wrote table {path.name} ({len(lines) - 1} rows)")
    return path


def read_table(path: PathLike) -> Dict[str, np.ndarray]:
    """Read a numeric CSV table written by write_table."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    names = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    out: Dict[str, np.ndarray] = {}
    for j, name in enumerate(names):
        out[name] = np.array([_parse_cell(row[j]) for row in rows])
    return out


def _parse_cell(text: str) -> float:
    if text == "true":
        return 1.0
    if text == "false":
        return 0.0
    return float(text)
