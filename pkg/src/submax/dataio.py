"""File formats for feature matrices, kernels and concept covers.

Feature matrices are accepted as headerless CSV (one row per point) or as a
raw binary layout: two little-endian unsigned 64-bit integers (rows, then
columns) followed by rows*columns little-endian float64 values, row major.
Precomputed dense kernels use the same binary layout with rows == columns.

Concept covers travel as JSON::

    {"num_concepts": C, "weights": [...], "covers": [[concept, ...], ...]}

with ``covers`` replaced by ``probs`` ([[concept, p], ...] per element) for
probabilistic covers, or by ``scores`` ([[feature, score], ...] per element)
plus ``num_features`` for feature tables.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

_HEADER = struct.Struct("<QQ")


def read_csv_matrix(path: str | Path) -> np.ndarray:
    """Parse a headerless CSV of floats; errors name the file and row."""
    path = Path(path)
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            try:
                rows.append([float(cell) for cell in record])
            except ValueError as exc:
                raise ValueError(f"{path}: row {lineno}: {exc}") from None
            if len(rows) > 1 and len(rows[-1]) != len(rows[0]):
                raise ValueError(
                    f"{path}: row {lineno}: expected {len(rows[0])} columns, got {len(rows[-1])}")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def write_csv_matrix(path: str | Path, matrix: np.ndarray) -> None:
    arr = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(arr):
            writer.writerow([repr(float(v)) for v in row])


def read_binary_matrix(path: str | Path) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    n, dims = _HEADER.unpack_from(raw)
    expect = _HEADER.size + 8 * n * dims
    if len(raw) != expect:
        raise ValueError(f"{path}: expected {expect} bytes for {n}x{dims} matrix, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return data.reshape(n, dims).astype(np.float64)


def write_binary_matrix(path: str | Path, matrix: np.ndarray) -> None:
    arr = np.ascontiguousarray(np.atleast_2d(np.asarray(matrix, dtype=np.float64)))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(arr.shape[0], arr.shape[1]))
        fh.write(arr.astype("<f8").tobytes())


def read_matrix(path: str | Path) -> np.ndarray:
    """Dispatch on extension: .csv is parsed as text, anything else as binary."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_csv_matrix(path)
    return read_binary_matrix(path)


def load_concept_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: row {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return payload


def load_concept_list(path: str | Path) -> list:
    """A JSON list of concept indices (or of per-concept probabilities)."""
    path = Path(path)
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: row {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(payload, list):
        raise ValueError(f"{path}: expected a JSON list")
    return payload
