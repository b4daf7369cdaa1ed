"""Flat text format for complex matrices.

Line 1 is ``rows,cols``; every following line is one matrix row written as
interleaved ``re,im`` pairs (``2*cols`` fields) with 17 significant digits, so
a write/read round trip is lossless.
"""
from __future__ import annotations

import numpy as np


def write_complex_csv(path, array) -> None:
    a = np.asarray(array, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError("only vectors and matrices can be written")
    rows, cols = a.shape
    inter = np.empty((rows, 2 * cols))
    inter[:, 0::2] = a.real
    inter[:, 1::2] = a.imag
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{rows},{cols}\n")
        for row in inter:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_complex_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        try:
            rows, cols = (int(v) for v in header.split(","))
        except ValueError:
            raise ValueError(f"{path}: bad header {header!r}, expected 'rows,cols'") from None
        data = np.loadtxt(fh, delimiter=",", ndmin=2) if rows else np.empty((0, 2 * cols))
    if data.shape != (rows, 2 * cols):
        raise ValueError(f"{path}: expected {rows}x{2 * cols} values, found {data.shape}")
    return data[:, 0::2] + 1j * data[:, 1::2]
