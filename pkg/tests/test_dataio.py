"""Matrix file formats: CSV and the binary header layout."""

import struct

import numpy as np
import pytest

from submax import (read_binary_matrix, read_csv_matrix, read_matrix,
                    write_binary_matrix, write_csv_matrix)
from conftest import random_points


def test_csv_round_trip(tmp_path):
    path = tmp_path / "m.csv"
    m = random_points(0, 5, 3)
    write_csv_matrix(path, m)
    assert np.allclose(read_csv_matrix(path), m)


def test_binary_round_trip(tmp_path):
    path = tmp_path / "m.bin"
    m = random_points(1, 4, 6)
    write_binary_matrix(path, m)
    assert np.array_equal(read_binary_matrix(path), m)


def test_binary_header_layout(tmp_path):
    """8-byte LE unsigned n, 8-byte LE unsigned dims, then LE float64 rows."""
    path = tmp_path / "m.bin"
    m = np.array([[1.5, -2.0], [0.25, 8.0], [0.0, 1.0]])
    write_binary_matrix(path, m)
    raw = path.read_bytes()
    n, dims = struct.unpack("<QQ", raw[:16])
    assert (n, dims) == (3, 2)
    body = np.frombuffer(raw[16:], dtype="<f8").reshape(3, 2)
    assert np.array_equal(body, m)


def test_read_matrix_dispatches_on_extension(tmp_path):
    m = random_points(2, 3, 2)
    csv_path, bin_path = tmp_path / "a.csv", tmp_path / "a.dat"
    write_csv_matrix(csv_path, m)
    write_binary_matrix(bin_path, m)
    assert np.allclose(read_matrix(csv_path), m)
    assert np.array_equal(read_matrix(bin_path), m)


def test_csv_bad_cell_names_file_and_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(ValueError) as err:
        read_csv_matrix(path)
    assert "bad.csv" in str(err.value) and "row 2" in str(err.value)


def test_csv_ragged_rows_rejected(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(ValueError, match="row 2"):
        read_csv_matrix(path)


def test_binary_truncated_rejected(tmp_path):
    path = tmp_path / "short.bin"
    m = random_points(3, 4, 4)
    write_binary_matrix(path, m)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="short.bin"):
        read_binary_matrix(path)
