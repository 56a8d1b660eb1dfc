"""Uniform grids on the unit square and grid functions on interior nodes.

Values are stored as a 2-D array of shape ``(n2 - 1, n1 - 1)``: axis 0 runs
over ``i2`` and axis 1 over ``i1``, so the flattened (C-order) layout is
lexicographic with ``i2`` outer and ``i1`` inner.  Boundary values are zero
and never stored.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class GridMismatchError(ValueError):
    """Raised when two grid functions live on different grids."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with ``n1 x n2`` cells on the unit square."""

    n1: int
    n2: int

    def __post_init__(self):
        for n in (self.n1, self.n2):
            if int(n) != n or n < 2:
                raise ValueError(f"node counts must be integers >= 2, got {n}")

    @classmethod
    def square(cls, n: int) -> "GridSpec":
        return cls(n, n)

    @property
    def h1(self) -> float:
        return 1.0 / self.n1

    @property
    def h2(self) -> float:
        return 1.0 / self.n2

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape of the interior values, ``(n2 - 1, n1 - 1)``."""
        return (self.n2 - 1, self.n1 - 1)

    @property
    def size(self) -> int:
        return (self.n1 - 1) * (self.n2 - 1)

    @property
    def cell_area(self) -> float:
        return self.h1 * self.h2

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(x1, x2)`` arrays of interior node coordinates."""
        x1 = np.arange(1, self.n1) * self.h1
        x2 = np.arange(1, self.n2) * self.h2
        X2, X1 = np.meshgrid(x2, x1, indexing="ij")
        return X1, X2

    def flat_index(self, i1: int, i2: int) -> int:
        """Position of interior node ``(i1, i2)`` in the flattened values."""
        if not (1 <= i1 < self.n1 and 1 <= i2 < self.n2):
            raise IndexError(f"({i1}, {i2}) is not an interior node")
        return (i2 - 1) * (self.n1 - 1) + (i1 - 1)

    def node_of(self, k: int) -> tuple[int, int]:
        """Inverse of :meth:`flat_index`."""
        if not 0 <= k < self.size:
            raise IndexError(k)
        i2, i1 = divmod(k, self.n1 - 1)
        return i1 + 1, i2 + 1


class GridFunction:
    """Real scalar field on the interior nodes of a :class:`GridSpec`.

    Supports the vector-space operations used by the time schemes
    (``+``, ``-``, scalar ``*`` and ``/``).  Multiplying two grid functions is
    pointwise.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: GridSpec, values):
        values = np.asarray(values, dtype=np.float64)
        if values.size != grid.size:
            raise ValueError(
                f"expected {grid.size} values for {grid}, got {values.size}")
        self.grid = grid
        self.values = values.reshape(grid.shape)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: GridSpec, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def _other(self, other):
        if isinstance(other, GridFunction):
            _check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __repr__(self):
        return f"GridFunction({self.grid!r}, max|u|={np.abs(self.values).max():.6g})"


def _check_same_grid(u: GridFunction, w: GridFunction) -> None:
    if u.grid != w.grid:
        raise GridMismatchError(f"grid mismatch: {u.grid} vs {w.grid}")


def inner_product(u: GridFunction, w: GridFunction) -> float:
    """Discrete L2 inner product ``sum u(x) w(x) h1 h2`` over interior nodes."""
    _check_same_grid(u, w)
    return float(np.vdot(u.values, w.values)) * u.grid.cell_area


def norm_l2(u: GridFunction) -> float:
    return math.sqrt(inner_product(u, u))


def norm_linf(u: GridFunction) -> float:
    return float(np.abs(u.values).max())


def sample(grid: GridSpec, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> GridFunction:
    """Evaluate ``f(x1, x2)`` at every interior node.

    ``f`` is called once with coordinate arrays, so it must be vectorized.
    """
    X1, X2 = grid.coordinates()
    values = np.broadcast_to(np.asarray(f(X1, X2), dtype=np.float64), grid.shape)
    return GridFunction(grid, values.copy())


def delta_lower_bound(grid: GridSpec) -> float:
    """Smallest eigenvalue of the 5-point Dirichlet Laplacian on ``grid``."""
    return sum(4.0 / h**2 * math.sin(math.pi * h / 2.0) ** 2
               for h in (grid.h1, grid.h2))


def write_csv(u: GridFunction, path) -> None:
    """Write ``u`` as CSV with header ``i1,i2,value``, one row per interior node."""
    grid = u.grid
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i1", "i2", "value"])
        for i2 in range(1, grid.n2):
            for i1 in range(1, grid.n1):
                writer.writerow([i1, i2, repr(float(u.values[i2 - 1, i1 - 1]))])


def read_csv(path, grid: GridSpec | None = None) -> GridFunction:
    """Read a grid function written by :func:`write_csv`.

    When ``grid`` is omitted it is inferred from the largest node indices.
    """
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    idx = np.array([(int(r["i1"]), int(r["i2"])) for r in rows], dtype=int)
    vals = np.array([float(r["value"]) for r in rows])
    if grid is None:
        grid = GridSpec(int(idx[:, 0].max()) + 1, int(idx[:, 1].max()) + 1)
    if len(rows) != grid.size:
        raise ValueError(f"{path}: expected {grid.size} rows, got {len(rows)}")
    out = np.full(grid.shape, np.nan)
    out[idx[:, 1] - 1, idx[:, 0] - 1] = vals
    if np.isnan(out).any():
        raise ValueError(f"{path}: missing interior nodes")
    return GridFunction(grid, out)
