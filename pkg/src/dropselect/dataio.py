"""CSV ingestion with positional error reporting."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .dataset import CLASSIFICATION, REGRESSION, Dataset
from .errors import DataError

NUMERIC = "numeric"
LABEL = "label"


def _parse_number(cell: str, row: int, col_name: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(
            f"unparsable cell at row {row}, column {col_name!r}: {cell!r}"
        ) from None
    if not math.isfinite(value):
        raise DataError(
            f"non-finite cell at row {row}, column {col_name!r}: {cell!r}"
        )
    return value


def load_csv(path, target_column: str, target_kind: str = NUMERIC,
             header: bool = True) -> Dataset:
    """Load a feature matrix and target from an RFC-4180-style CSV file.

    Feature columns keep file order minus the target column. ``target_kind``
    is 'numeric' (regression) or 'label' (classification). Without a header
    row, columns are named c1..cp and ``target_column`` must be a 1-based
    column position.
    """
    if target_kind not in (NUMERIC, LABEL):
        raise DataError(f"target_kind must be 'numeric' or 'label', got {target_kind!r}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows = [row for row in reader if row]
    if not rows:
        raise DataError(f"empty file: {path}")
    if header:
        names = [name.strip() for name in rows[0]]
        body = rows[1:]
        if target_column not in names:
            raise DataError(
                f"target column {target_column!r} not found; columns: {names}"
            )
        target_pos = names.index(target_column)
    else:
        names = [f"c{i + 1}" for i in range(len(rows[0]))]
        body = rows
        try:
            target_pos = int(target_column) - 1
        except (TypeError, ValueError):
            raise DataError(
                "without a header, target_column must be a 1-based position"
            ) from None
        if not 0 <= target_pos < len(names):
            raise DataError(f"target position {target_column} out of range")
    if not body:
        raise DataError(f"no data rows in {path}")
    n_cols = len(names)
    X, target = [], []
    for r, row in enumerate(body):
        line = r + (2 if header else 1)  # 1-based file line for messages
        if len(row) != n_cols:
            raise DataError(
                f"row {line} has {len(row)} cells, expected {n_cols}"
            )
        features = []
        for c, cell in enumerate(row):
            cell = cell.strip()
            if c == target_pos:
                if target_kind == NUMERIC:
                    target.append(_parse_number(cell, line, names[c]))
                else:
                    if not cell:
                        raise DataError(f"empty label at row {line}")
                    target.append(cell)
            else:
                features.append(_parse_number(cell, line, names[c]))
        X.append(features)
    feature_names = [n for i, n in enumerate(names) if i != target_pos]
    task = REGRESSION if target_kind == NUMERIC else CLASSIFICATION
    return Dataset(X=X, target=target, column_names=feature_names, task=task)
