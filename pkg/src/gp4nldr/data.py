"""Tabular dataset loading, validation and min-max scaling.

A :class:`Dataset` keeps both the original feature matrix and a per-column
min-max scaled view in [0, 1]; the scaled view is what the evolutionary
search consumes, the original view is what users see in previews.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dataset",
    "DatasetError",
    "assign_feature_names",
    "dataset_to_csv",
    "load_csv",
    "scale_minmax",
]


class DatasetError(ValueError):
    """Raised when a CSV source cannot be turned into a valid Dataset."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        if row is not None:
            location = f" (row {row}" + (f", column {col})" if col is not None else ")")
            message = message + location
        super().__init__(message)
        self.row = row
        self.col = col


def assign_feature_names(count: int) -> list[str]:
    """Generate placeholder feature names "f0" .. "f{count-1}"."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return [f"f{i}" for i in range(count)]


def scale_minmax(rows: np.ndarray) -> np.ndarray:
    """Scale each column to [0, 1]; constant columns map to all zeros.

    Constant columns are kept (as zeros) rather than dropped so feature
    indices stay stable for the expression trees.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ValueError("expected a non-empty 2-D matrix")
    lo = rows.min(axis=0)
    hi = rows.max(axis=0)
    span = hi - lo
    constant = span == 0
    span = np.where(constant, 1.0, span)
    scaled = (rows - lo) / span
    scaled[:, constant] = 0.0
    return scaled


@dataclass(frozen=True)
class Dataset:
    """Named tabular data with class labels and a scaled view.

    Immutable after construction; safe to share across threads.
    """

    name: str
    feature_names: tuple[str, ...]
    rows: np.ndarray
    labels: tuple[str, ...]
    scaled: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2:
            raise DatasetError("rows must form a 2-D matrix")
        n, m = rows.shape
        if len(self.feature_names) != m:
            raise DatasetError(
                f"{len(self.feature_names)} feature names for {m} columns"
            )
        if len(set(self.feature_names)) != m:
            raise DatasetError("feature names must be unique")
        if len(self.labels) != n:
            raise DatasetError(f"{len(self.labels)} labels for {n} rows")
        if not np.isfinite(rows).all():
            raise DatasetError("rows contain non-finite values")
        if self.scaled is None:
            object.__setattr__(self, "scaled", scale_minmax(rows))
        rows.setflags(write=False)
        self.scaled.setflags(write=False)

    @property
    def num_instances(self) -> int:
        return self.rows.shape[0]

    @property
    def num_features(self) -> int:
        return self.rows.shape[1]

    @property
    def class_names(self) -> tuple[str, ...]:
        """Distinct labels in order of first appearance."""
        seen: dict[str, None] = {}
        for lab in self.labels:
            seen.setdefault(lab, None)
        return tuple(seen)


def _resolve_label_column(
    label_column: int | str, header: list[str] | None, width: int
) -> int:
    if isinstance(label_column, str) and label_column.lower() == "last":
        return width - 1
    if isinstance(label_column, str):
        try:
            return _resolve_label_column(int(label_column), header, width)
        except ValueError:
            pass
        if header is None:
            raise DatasetError(
                f"label column {label_column!r} given by name but the CSV has no header"
            )
        if label_column not in header:
            raise DatasetError(f"label column {label_column!r} not found in header")
        return header.index(label_column)
    idx = int(label_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise DatasetError(f"label column index {label_column} out of range for {width} columns")
    return idx


def load_csv(
    source: bytes | str | io.IOBase,
    *,
    has_header: bool = True,
    label_column: int | str = "last",
    name: str = "dataset",
) -> Dataset:
    """Parse a UTF-8 CSV into a Dataset.

    Every non-label cell must parse as a real number (decimal point only).
    The label column is required and may be selected by header name,
    0-based index (negative allowed), or the string "last".
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    records = list(csv.reader(io.StringIO(text)))
    records = [rec for rec in records if rec]  # drop blank lines
    if not records:
        raise DatasetError("empty CSV")

    header: list[str] | None = None
    if has_header:
        header = [cell.strip() for cell in records[0]]
        records = records[1:]
    if not records:
        raise DatasetError("CSV has a header but no data rows")

    width = len(records[0])
    if width < 2:
        raise DatasetError("need at least one feature column plus the label column")
    label_idx = _resolve_label_column(label_column, header, width)

    labels: list[str] = []
    values: list[list[float]] = []
    for r, rec in enumerate(records):
        if len(rec) != width:
            raise DatasetError(
                f"expected {width} cells, found {len(rec)}", row=r + (1 if has_header else 0)
            )
        row_vals: list[float] = []
        for c, cell in enumerate(rec):
            if c == label_idx:
                labels.append(cell.strip())
                continue
            try:
                row_vals.append(float(cell))
            except ValueError:
                raise DatasetError(
                    f"non-numeric cell {cell!r}",
                    row=r + (1 if has_header else 0),
                    col=c,
                ) from None
        values.append(row_vals)

    if len(values) < 2:
        raise DatasetError("need at least 2 data rows")

    if header is not None:
        feature_names = tuple(h for i, h in enumerate(header) if i != label_idx)
    else:
        feature_names = tuple(assign_feature_names(width - 1))

    return Dataset(
        name=name,
        feature_names=feature_names,
        rows=np.array(values, dtype=float),
        labels=tuple(labels),
    )


def dataset_to_csv(dataset: Dataset, *, label_column_name: str = "class") -> bytes:
    """Serialize a Dataset back to CSV (label column last) for round-trips."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(dataset.feature_names) + [label_column_name])
    for row, label in zip(dataset.rows, dataset.labels):
        writer.writerow([repr(float(v)) for v in row] + [label])
    return buf.getvalue().encode("utf-8")
