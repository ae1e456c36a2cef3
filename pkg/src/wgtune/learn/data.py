from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTrainingSet, InvalidArgument, SchemaError
from ..space import WorkgroupSize

WG_FEATURES = ("w_c", "w_r", "w_area")

RUNTIME = "runtime"
SPEEDUP = "speedup"


@dataclass(frozen=True, eq=False)
class LabelledDataset:
    """Feature matrix with one atomic class label per row."""

    schema: tuple
    X: np.ndarray
    labels: tuple

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.schema):
            raise SchemaError(f"feature matrix shape {X.shape} does not match a schema of {len(self.schema)}")
        if X.shape[0] != len(self.labels):
            raise InvalidArgument("one label per row required")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_rows(cls, rows) -> "LabelledDataset":
        rows = list(rows)
        if not rows:
            raise EmptyTrainingSet("no training rows")
        schema = rows[0][0].names
        for f, _ in rows:
            if f.names != schema:
                raise SchemaError("feature vectors do not share a schema")
        return cls(schema, np.array([f.values for f, _ in rows], dtype=float), tuple(lbl for _, lbl in rows))

    def __len__(self):
        return len(self.labels)


def wg_columns(sizes) -> np.ndarray:
    return np.array([[w.w_c, w.w_r, w.w_c * w.w_r] for w in sizes], dtype=float).reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class RegressionDataset:
    """``(features, workgroup size, target)`` rows for the forest regressor.

    ``mode`` tags the target as a runtime in ms or a dimensionless speedup.
    """

    schema: tuple
    X: np.ndarray
    sizes: tuple
    targets: np.ndarray
    mode: str

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.targets, dtype=float).reshape(-1)
        if self.mode not in (RUNTIME, SPEEDUP):
            raise InvalidArgument(f"unknown regression mode {self.mode!r}")
        if X.ndim != 2 or X.shape[1] != len(self.schema):
            raise SchemaError(f"feature matrix shape {X.shape} does not match a schema of {len(self.schema)}")
        if not (X.shape[0] == len(self.sizes) == y.size):
            raise InvalidArgument("features, sizes and targets differ in length")
        if not np.all(np.isfinite(y)):
            raise InvalidArgument("targets must be finite")
        if self.mode == RUNTIME and np.any(y <= 0):
            raise InvalidArgument("runtime targets must be positive")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "sizes", tuple(self.sizes))

    @classmethod
    def from_rows(cls, rows, mode: str) -> "RegressionDataset":
        rows = list(rows)
        if not rows:
            raise EmptyTrainingSet("no training rows")
        schema = rows[0][0].names
        for f, _, _ in rows:
            if f.names != schema:
                raise SchemaError("feature vectors do not share a schema")
        return cls(
            schema,
            np.array([f.values for f, _, _ in rows], dtype=float),
            tuple(w for _, w, _ in rows),
            np.array([t for _, _, t in rows], dtype=float),
            mode,
        )

    def __len__(self):
        return self.targets.size

    def design_matrix(self) -> np.ndarray:
        return np.hstack([self.X, wg_columns(self.sizes)])


def as_wgsize(label):
    if isinstance(label, WorkgroupSize):
        return label
    return WorkgroupSize.parse(label)
