"""The data-in-hand: ordered (input, objective) pairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Inputs of shape (n, d) and objective values of shape (n,), in evaluation order."""

    inputs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        y = np.asarray(self.values, dtype=np.float64).ravel()
        if x.shape[0] != y.shape[0]:
            raise ValueError(f"{x.shape[0]} inputs but {y.shape[0]} values")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "values", y)

    @classmethod
    def empty(cls, dim: int) -> "ObservationSet":
        return cls(np.empty((0, dim)), np.empty(0))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def best_value(self) -> float:
        if len(self) == 0:
            raise ValueError("no observations")
        return float(self.values.min())

    def subset(self, indices) -> "ObservationSet":
        idx = np.asarray(indices, dtype=np.intp)
        return ObservationSet(self.inputs[idx], self.values[idx])

    def append(self, x, y: float) -> "ObservationSet":
        x = np.asarray(x, dtype=np.float64).reshape(1, -1)
        return ObservationSet(np.vstack([self.inputs, x]), np.append(self.values, y))

    def __eq__(self, other):
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return np.array_equal(self.inputs, other.inputs) and np.array_equal(self.values, other.values)
