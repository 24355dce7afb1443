"""Plain-text file formats: features, labels, sparse count matrices, metrics.

All writers produce byte-stable output for identical inputs: floats are
rendered through json (shortest round-trip representation) and key order is
the insertion order of the caller.
"""

from __future__ import annotations

import json
import math

import numpy as np


def read_features(path):
    """CSV features, one sample per row, no header; all values finite reals."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                values = [float(p) for p in parts]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a numeric row") from None
            if any(not math.isfinite(v) for v in values):
                raise ValueError(f"{path}: line {lineno}: non-finite value")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValueError(
                    f"{path}: line {lineno}: expected {width} columns, found {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def read_label_assignments(path):
    """Label CSV of `index,class` lines; returns a list of (index, class)."""
    assignments = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected `index,class`")
            try:
                assignments.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: indices must be integers") from None
    return assignments


def read_truth(path):
    """Ground-truth file: one integer class per line."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: expected an integer class") from None
    if not labels:
        raise ValueError(f"{path}: no labels")
    return np.asarray(labels, dtype=np.int64)


def write_predictions(path, labels):
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            fh.write(f"{int(label)}\n")


def read_bow(path):
    """Sparse triplet count matrix: header `n M nnz`, then `row col value` lines."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: line 1: expected header `n M nnz`")
        try:
            n, m, nnz = (int(h) for h in header)
        except ValueError:
            raise ValueError(f"{path}: line 1: header fields must be integers") from None
        if n < 1 or m < 1 or nnz < 0:
            raise ValueError(f"{path}: line 1: invalid dimensions")
        matrix = np.zeros((n, m))
        count = 0
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}: line {lineno}: expected `row col value`")
            try:
                i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed triplet") from None
            if not 0 <= i < n or not 0 <= j < m:
                raise ValueError(f"{path}: line {lineno}: index out of range")
            if not math.isfinite(value):
                raise ValueError(f"{path}: line {lineno}: non-finite value")
            matrix[i, j] = value
            count += 1
        if count != nnz:
            raise ValueError(f"{path}: header declares {nnz} entries, found {count}")
    return matrix


def write_bow(path, matrix, threshold=1e-12):
    """Write a matrix in the sparse triplet format, dropping |value| <= threshold."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = np.nonzero(np.abs(matrix) > threshold)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]} {rows.size}\n")
        for i, j in zip(rows, cols):
            fh.write(f"{i} {j} {_render_float(matrix[i, j])}\n")


def _render_float(value):
    return json.dumps(float(value))


def _plain(value):
    """Recursively convert numpy scalars/arrays so json can serialize them."""
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def render_metrics(items):
    """Render ordered (key, value) pairs as `key = <json>` lines."""
    lines = []
    for key, value in items:
        lines.append(f"{key} = {json.dumps(_plain(value))}")
    return "\n".join(lines) + "\n"


def parse_metrics(text):
    """Inverse of render_metrics; returns an ordered dict of key -> value."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, payload = line.partition(" = ")
        if not sep:
            raise ValueError(f"metrics line {lineno}: missing ` = ` separator")
        out[key] = json.loads(payload)
    return out
