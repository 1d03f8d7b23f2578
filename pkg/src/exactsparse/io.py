"""CSV ingestion and tidy output tables.

Dataset files have a header of feature names followed by ``label``. Output
tables carry a leading ``schema_version`` column so downstream readers can
detect format changes. Floats are written with ``repr`` so they round-trip
exactly and repeated runs produce identical bytes.
"""
import csv
import json
import math
import os

import numpy as np

from .dataset import Dataset, standardize_columns

SCHEMA_VERSION = 1
LABEL_COLUMN = "label"


class CSVParseError(ValueError):
    """Malformed CSV input; the message names the file and location."""


def load_csv(path, standardize=False):
    """Read a dataset CSV.

    Labels may be -1/+1 or 0/1; 0 is mapped to -1.

    Parameters
    ----------
    path : str or PathLike
    standardize : bool
        Center and scale each feature column.
    """
    path = os.fspath(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as err:
        raise CSVParseError(f"{path}: cannot open ({err.strerror})") from err
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise CSVParseError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if header[-1] != LABEL_COLUMN:
            raise CSVParseError(f"{path}: last header column must be '{LABEL_COLUMN}'")
        if len(header) < 2:
            raise CSVParseError(f"{path}: no feature columns")
        width = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise CSVParseError(
                    f"{path}: line {lineno} has {len(row)} fields, expected {width}")
            vals = []
            for col, cell in zip(header, row):
                cell = cell.strip()
                if cell == "":
                    raise CSVParseError(f"{path}: line {lineno}, column '{col}': missing value")
                try:
                    v = float(cell)
                except ValueError:
                    raise CSVParseError(
                        f"{path}: line {lineno}, column '{col}': not a number: {cell!r}") from None
                if not math.isfinite(v):
                    raise CSVParseError(
                        f"{path}: line {lineno}, column '{col}': non-finite value")
                vals.append(v)
            if vals[-1] not in (-1.0, 0.0, 1.0):
                raise CSVParseError(
                    f"{path}: line {lineno}, column '{LABEL_COLUMN}': "
                    f"label must be -1, 0 or 1, got {row[-1].strip()!r}")
            rows.append(vals)
    if len(rows) < 2:
        raise CSVParseError(f"{path}: need at least two data rows")
    A = np.array(rows)
    X, y = A[:, :-1], np.where(A[:, -1] > 0, 1.0, -1.0)
    if standardize:
        X = standardize_columns(X)
    return Dataset(X, y, names=header[:-1])


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def write_dataset_csv(path, data, label_values=(-1, 1)):
    names = data.feature_names()
    neg, pos = label_values
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + [LABEL_COLUMN])
        for x, y in zip(data.X, data.y):
            w.writerow([_fmt(v) for v in x] + [pos if y > 0 else neg])


def write_table(path, rows, columns):
    """Write ``rows`` (dicts) with ``schema_version`` prepended to ``columns``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["schema_version"] + list(columns))
        for row in rows:
            w.writerow([SCHEMA_VERSION] + [_fmt(row.get(c)) for c in columns])


def read_table(path):
    """Rows of a table written by :func:`write_table`, as string dicts."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[0] != "schema_version":
            raise CSVParseError(f"{path}: missing schema_version column")
        rows = list(reader)
    for i, row in enumerate(rows, start=2):
        if row["schema_version"] != str(SCHEMA_VERSION):
            raise CSVParseError(
                f"{path}: line {i}: unsupported schema_version {row['schema_version']!r}")
    return rows


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_report(path, report):
    """Write a JSON record with ``schema_version`` and sorted keys."""
    body = {"schema_version": SCHEMA_VERSION, **_jsonable(report)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
