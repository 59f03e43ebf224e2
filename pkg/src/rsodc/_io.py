"""CSV and JSON plumbing for the command line: full-precision matrix
round-trips, schema-validated JSON emission, and input diagnostics."""

from __future__ import annotations

import csv
import importlib.resources
import json
import math

import numpy as np

import jsonschema


class InputError(Exception):
    """Malformed user input; the CLI maps it to exit code 2."""


def read_matrix_csv(path, header: bool = True) -> np.ndarray:
    """Parse a numeric CSV into an n x p array.

    Reports the offending 1-based row and column on parse failures. The
    header row, when present, is skipped without interpretation.
    """
    rows = []
    width = None
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        for lineno, cells in enumerate(reader, start=1):
            if not cells or (len(cells) == 1 and cells[0].strip() == ""):
                continue
            if header and lineno == 1:
                continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise InputError(
                    f"{path}: row {lineno} has {len(cells)} cells, expected {width}")
            parsed = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise InputError(
                        f"{path}: non-numeric value {cell!r} at row {lineno}, "
                        f"column {colno}") from None
            rows.append(parsed)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def read_labels_csv(path, header: bool = True) -> np.ndarray:
    """First column of a CSV as an integer label vector."""
    data = read_matrix_csv(path, header=header)
    col = data[:, 0]
    labels = col.astype(int)
    if np.any(labels != col):
        raise InputError(f"{path}: labels must be integers")
    return labels


def write_matrix_csv(path, X, columns, labels=None) -> None:
    """Write rows of X at 17 significant digits, optionally with a label column."""
    X = np.asarray(X, dtype=float)
    header = list(columns) + (["label"] if labels is not None else [])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for i in range(X.shape[0]):
            row = [f"{v:.17g}" for v in X[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)


def write_rows_csv(path, header, rows) -> None:
    """Write heterogeneous result rows; floats at full precision."""
    def fmt(v):
        if isinstance(v, float):
            return f"{v:.17g}"
        return str(v)

    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def jsonable(value):
    """Recursively convert arrays and numpy scalars; non-finite floats
    become strings so the emitted JSON stays standard."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def load_schema(name: str) -> dict:
    ref = importlib.resources.files("rsodc.schemas").joinpath(name)
    return json.loads(ref.read_text(encoding="utf-8"))


def write_json(path, payload: dict, schema_name: str) -> None:
    """Validate the payload against the bundled schema, then write it."""
    payload = jsonable(payload)
    jsonschema.validate(payload, load_schema(schema_name))
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, allow_nan=False)
        handle.write("\n")
