"""Tabular datasets: the unit of ingestion, generation, and training."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list = field(default_factory=list)
    target_name: str = "y"

    def __post_init__(self):
        self.X = np.ascontiguousarray(self.X, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        if self.X.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        if self.y.ndim != 1 or self.y.shape[0] != self.X.shape[0]:
            raise DataError("response length must match the number of rows")
        if self.X.shape[0] == 0:
            raise DataError("dataset is empty")
        if not self.feature_names:
            self.feature_names = [f"x{j + 1}" for j in range(self.X.shape[1])]
        if len(self.feature_names) != self.X.shape[1]:
            raise DataError("feature_names length must match the number of columns")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def validate_finite(self):
        if not np.all(np.isfinite(self.X)):
            i, j = np.argwhere(~np.isfinite(self.X))[0]
            raise DataError(
                f"non-finite feature value at row {i + 1}, "
                f"column {self.feature_names[j]!r}"
            )
        if not np.all(np.isfinite(self.y)):
            i = int(np.nonzero(~np.isfinite(self.y))[0][0])
            raise DataError(f"non-finite response value at row {i + 1}")
        return self


def load_csv(path, target: str | None = None) -> Dataset:
    """Read a dataset from CSV: header row, numeric cells, one response
    column (named by `target`, default the last column)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if target is None:
            target = header[-1]
        if target not in header:
            raise DataError(f"{path}: no column named {target!r}")
        t_col = header.index(target)
        feature_names = [h for i, h in enumerate(header) if i != t_col]
        rows = []
        ys = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {line_no} has {len(row)} cells, "
                    f"expected {len(header)}"
                )
            vals = []
            for i, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell {cell!r} at row {line_no}, "
                        f"column {header[i]!r}"
                    ) from None
                if i == t_col:
                    ys.append(v)
                else:
                    vals.append(v)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(ys), feature_names, target)


def load_feature_csv(path, expected_names=None, target=None) -> np.ndarray:
    """Read a feature matrix from CSV for prediction.

    A ``target`` column is dropped if present.  When ``expected_names``
    is given the columns are matched (and reordered) by name, and any
    missing or unexpected column is an error naming the offender.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        keep = [i for i, h in enumerate(header)
                if not (target is not None and h == target)]
        names = [header[i] for i in keep]
        if expected_names is not None:
            expected = list(expected_names)
            for name in expected:
                if name not in names:
                    raise DataError(f"{path}: missing feature column {name!r}")
            for name in names:
                if name not in expected:
                    raise DataError(f"{path}: unexpected column {name!r}")
            pos = {h: i for i, h in zip(keep, names)}
            keep = [pos[name] for name in expected]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {line_no} has {len(row)} cells, "
                    f"expected {len(header)}"
                )
            vals = []
            for i in keep:
                try:
                    vals.append(float(row[i]))
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell {row[i]!r} at row "
                        f"{line_no}, column {header[i]!r}"
                    ) from None
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def save_csv(path, dataset: Dataset):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [dataset.target_name])
        for i in range(dataset.n):
            writer.writerow([repr(float(v)) for v in dataset.X[i]]
                            + [repr(float(dataset.y[i]))])
