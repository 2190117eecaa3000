"""Discrete benchmark tasks and initial designs.

Every task exposes the same small surface used by the optimizer: a
candidate matrix in the unit cube, ``evaluate(index)`` for the true
objective, ``point(index)`` for the raw coordinates and ``optimum``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np


# -- objective formulas (vectorized over rows) ------------------------------------


def ackley(x: np.ndarray, a: float = 20.0, b: float = 0.2, c: float = 2.0 * math.pi) -> np.ndarray:
    x = np.atleast_2d(x)
    d = x.shape[1]
    t1 = np.exp(-b * np.sqrt(np.sum(x * x, axis=1) / d))
    t2 = np.exp(np.sum(np.cos(c * x), axis=1) / d)
    # grouped so the origin evaluates to exactly zero
    return (a - a * t1) + (math.e - t2)


def levy(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(math.pi * w[:, 0]) ** 2
    mid = np.sum((w[:, :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(math.pi * w[:, :-1] + 1.0) ** 2), axis=1)
    tail = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * math.pi * w[:, -1]) ** 2)
    return head + mid + tail


def rosenbrock(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.sum(100.0 * (x[:, 1:] - x[:, :-1] ** 2) ** 2 + (1.0 - x[:, :-1]) ** 2, axis=1)


def sum_squares(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.sum(np.arange(1, x.shape[1] + 1) * x * x, axis=1)


FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "ackley": ackley,
    "levy": levy,
    "rosenbrock": rosenbrock,
    "sumsquares": sum_squares,
}

# analytic minimizer as a per-axis value
_ARGMIN = {"ackley": 0.0, "levy": 1.0, "rosenbrock": 1.0, "sumsquares": 0.0}


# -- search spaces -------------------------------------------------------------------


def even_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` evenly spaced values; integer-weighted so grid nodes like 0 or 1 are exact."""
    i = np.arange(n, dtype=np.float64)
    return (lo * (n - 1 - i) + hi * i) / (n - 1)


class DiscreteSearchSpace:
    """Cartesian product of per-axis sorted value lists, flattened in C order."""

    def __init__(self, axes: Sequence[Sequence[float]]):
        axes = tuple(np.asarray(a, dtype=np.float64).ravel() for a in axes)
        if not axes:
            raise ValueError("need at least one axis")
        for a in axes:
            if a.size < 2 or np.any(np.diff(a) <= 0):
                raise ValueError("each axis needs >= 2 strictly increasing values")
        self.axes = axes
        self.shape = tuple(a.size for a in axes)
        self._lo = np.array([a[0] for a in axes])
        self._span = np.array([a[-1] - a[0] for a in axes])

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def normalize(self, points) -> np.ndarray:
        return (np.atleast_2d(np.asarray(points, dtype=np.float64)) - self._lo) / self._span

    @cached_property
    def normalized_axes(self) -> tuple[np.ndarray, ...]:
        return tuple((a - a[0]) / (a[-1] - a[0]) for a in self.axes)

    @cached_property
    def unit_points(self) -> np.ndarray:
        """All grid nodes scaled to [0, 1]^d, shape (size, d)."""
        mesh = np.meshgrid(*self.normalized_axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def point(self, index: int) -> np.ndarray:
        multi = np.unravel_index(int(index), self.shape)
        return np.array([a[i] for a, i in zip(self.axes, multi)])

    def points(self, indices) -> np.ndarray:
        multi = np.unravel_index(np.asarray(indices, dtype=np.intp), self.shape)
        return np.stack([a[i] for a, i in zip(self.axes, multi)], axis=-1)

    def axis_indices(self, point) -> tuple[int, ...]:
        """Per-axis node indices of an on-grid point; raises when off-grid."""
        x = np.asarray(point, dtype=np.float64).ravel()
        if x.size != self.dim:
            raise ValueError(f"expected a {self.dim}-vector, got {x.size} values")
        out = []
        for a, v in zip(self.axes, x):
            j = int(np.argmin(np.abs(a - v)))
            if abs(a[j] - v) > 1e-9 * (a[-1] - a[0]):
                raise ValueError(f"{v} is not a grid value on this axis")
            out.append(j)
        return tuple(out)

    def index_of(self, point) -> int:
        return int(np.ravel_multi_index(self.axis_indices(point), self.shape))


# -- tasks ---------------------------------------------------------------------------


class SyntheticTask:
    def __init__(self, function: str, space: DiscreteSearchSpace, name: str | None = None):
        key = function.lower()
        if key not in FUNCTIONS:
            raise ValueError(f"unknown function {function!r}; choose from {sorted(FUNCTIONS)}")
        self.function = key
        self.space = space
        self.name = name or key
        self._f = FUNCTIONS[key]

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def size(self) -> int:
        return self.space.size

    def candidate_inputs(self) -> np.ndarray:
        return self.space.unit_points

    def point(self, index: int) -> np.ndarray:
        return self.space.point(index)

    def index_of(self, point) -> int:
        return self.space.index_of(point)

    def evaluate(self, index: int) -> float:
        return float(self._f(self.space.point(index)[None, :])[0])

    @cached_property
    def known_optimum(self) -> float:
        """Analytic minimum when its minimizer is a grid node, else a grid scan."""
        target = np.full(self.dim, _ARGMIN[self.function])
        try:
            self.space.index_of(target)
        except ValueError:
            return self.grid_minimum()
        return float(self._f(target[None, :])[0])

    def grid_minimum(self, chunk: int = 1 << 18) -> float:
        best = math.inf
        for start in range(0, self.size, chunk):
            idx = np.arange(start, min(start + chunk, self.size))
            best = min(best, float(self._f(self.space.points(idx)).min()))
        return best

    @property
    def optimum(self) -> float:
        return self.known_optimum

    def describe(self) -> dict:
        return {
            "kind": "synthetic",
            "name": self.name,
            "function": self.function,
            "axes": [[float(a[0]), float(a[-1]), int(a.size)] for a in self.space.axes],
        }


def eval_synthetic(task: SyntheticTask, x) -> float:
    """Objective at an on-grid point given in raw coordinates."""
    idx = task.space.axis_indices(x)
    node = np.array([a[i] for a, i in zip(task.space.axes, idx)])
    return float(FUNCTIONS[task.function](node[None, :])[0])


_STANDARD = {
    # name: (lo, hi, points per axis)
    "ackley": (-31.5, 31.5, 41),
    "levy": (-10.0, 10.0, 31),
    "rosenbrock": (-5.0, 10.0, 31),
    "sumsquares": (-10.0, 10.0, 31),
}


def standard_task(name: str, dim: int = 4) -> SyntheticTask:
    key = name.lower()
    if key not in _STANDARD:
        raise ValueError(f"unknown standard task {name!r}; choose from {sorted(_STANDARD)}")
    lo, hi, n = _STANDARD[key]
    return SyntheticTask(key, DiscreteSearchSpace([even_axis(lo, hi, n)] * dim))


def build_standard_grids(dim: int = 4) -> dict[str, SyntheticTask]:
    return {name: standard_task(name, dim) for name in _STANDARD}


@dataclass(frozen=True, eq=False)
class TabularTask:
    """Pre-evaluated table: unique rounded inputs in [0,1]^d and objectives in [0,1]."""

    inputs: np.ndarray
    values: np.ndarray
    name: str = "table"
    source: str | None = None

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def size(self) -> int:
        return self.inputs.shape[0]

    @property
    def rows(self) -> dict[tuple[float, ...], float]:
        return {tuple(map(float, k)): float(v) for k, v in zip(self.inputs, self.values)}

    @cached_property
    def _lookup(self) -> dict[tuple[float, ...], int]:
        return {tuple(map(float, k)): i for i, k in enumerate(self.inputs)}

    def candidate_inputs(self) -> np.ndarray:
        return self.inputs

    def point(self, index: int) -> np.ndarray:
        return self.inputs[int(index)].copy()

    def index_of(self, point) -> int:
        key = tuple(float(v) for v in np.round(np.asarray(point, dtype=np.float64).ravel(), 5))
        try:
            return self._lookup[key]
        except KeyError:
            raise ValueError(f"{key} is not a row of this table") from None

    def evaluate(self, index: int) -> float:
        return float(self.values[int(index)])

    @property
    def optimum(self) -> float:
        return float(self.values.min())

    def describe(self) -> dict:
        return {"kind": "tabular", "name": self.name, "source": self.source, "dim": self.dim,
                "rows": self.size}


def _minmax(a: np.ndarray, bounds: np.ndarray | None = None) -> np.ndarray:
    if bounds is None:
        lo, hi = a.min(axis=0), a.max(axis=0)
    else:
        lo, hi = bounds[:, 0], bounds[:, 1]
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    # constant columns map to 0
    return np.where(span > 0, (a - lo) / safe, 0.0)


def load_tabular(rows, name: str = "table", source: str | None = None,
                 bounds=None) -> TabularTask:
    """Min-max normalize, round inputs to 1e-5, average duplicate rows.

    ``bounds`` optionally gives each input axis range as ``(lo, hi)``
    rows; by default the observed range is used.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("table is empty")
    x = np.array([np.asarray(r[0], dtype=np.float64).ravel() for r in rows])
    y = np.array([float(r[1]) for r in rows])
    if x.ndim != 2 or x.shape[1] == 0:
        raise ValueError("rows must share one input dimension")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("table contains non-finite entries")
    if bounds is not None:
        bounds = np.asarray(bounds, dtype=np.float64).reshape(-1, 2)
        if bounds.shape[0] != x.shape[1]:
            raise ValueError(f"bounds give {bounds.shape[0]} axes, rows have {x.shape[1]}")
        if np.any(x < bounds[:, 0]) or np.any(x > bounds[:, 1]):
            raise ValueError("rows fall outside the given axis bounds")
    keys = np.round(_minmax(x, bounds), 5) + 0.0  # + 0.0 folds -0.0
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    sums = np.bincount(inverse, weights=y, minlength=uniq.shape[0])
    counts = np.bincount(inverse, minlength=uniq.shape[0])
    means = sums / counts
    return TabularTask(uniq, _minmax(means[:, None])[:, 0], name=name, source=source)


def read_table(path: str | Path, name: str | None = None) -> TabularTask:
    """Read ``x1,...,xd,y`` delimited text (header required) into a task."""
    path = Path(path)
    with path.open(newline="") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        try:
            dialect = csv.Sniffer().sniff(sample, delimiters=",;\t ")
        except csv.Error:
            dialect = csv.excel
        reader = csv.reader(fh, dialect)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ValueError(f"{path}: expected a header 'x1,...,xd,y'")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            vals = [float(c) for c in rec]
            rows.append((vals[:-1], vals[-1]))
    return load_tabular(rows, name=name or path.stem, source=str(path))


# -- initial designs -----------------------------------------------------------------


def lhs_unit_samples(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube in [0,1)^d: one sample per stratum per axis."""
    u = np.empty((n, dim))
    for c in range(dim):
        u[:, c] = (rng.permutation(n) + rng.random(n)) / n
    return u


def _snap(axis: np.ndarray, u: np.ndarray) -> np.ndarray:
    j = np.clip(np.searchsorted(axis, u), 1, axis.size - 1)
    left = axis[j - 1]
    return np.where(u - left <= axis[j] - u, j - 1, j)


def lhs_initial_design(space: DiscreteSearchSpace, n: int, seed: int) -> np.ndarray:
    """LHS snapped to grid nodes; collisions move to the nearest unused node.

    Returns raw coordinates, shape (n, d).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > space.size:
        raise ValueError(f"cannot draw {n} distinct points from a grid of {space.size}")
    rng = np.random.default_rng(seed)
    u = lhs_unit_samples(n, space.dim, rng)
    naxes = space.normalized_axes
    used: set[int] = set()
    chosen = []
    for row in u:
        idx = int(np.ravel_multi_index(tuple(int(_snap(a, v)) for a, v in zip(naxes, row)), space.shape))
        if idx in used:
            grid = space.unit_points
            d2 = np.sum((grid - row) ** 2, axis=1)
            d2[list(used)] = np.inf
            idx = int(np.argmin(d2))
        used.add(idx)
        chosen.append(idx)
    return space.points(chosen)


def random_initial_design(task: TabularTask, n: int, seed: int) -> np.ndarray:
    """Uniform draw of ``n`` distinct rows; returns their inputs."""
    if not 1 <= n <= task.size:
        raise ValueError(f"need 1 <= n <= {task.size}, got {n}")
    rng = np.random.default_rng(seed)
    return task.inputs[rng.choice(task.size, size=n, replace=False)].copy()


def initial_design(task, n: int, seed: int) -> np.ndarray:
    """LHS for grid tasks (anything with a ``space``), a row draw for tables."""
    space = getattr(task, "space", None)
    if isinstance(space, DiscreteSearchSpace):
        return lhs_initial_design(space, n, seed)
    return random_initial_design(task, n, seed)
