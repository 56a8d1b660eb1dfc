"""Matrix-free 5-point Laplacian and a conjugate-gradient solver for
shifted systems ``(b I + c A) x = r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import GridFunction, GridSpec, _check_same_grid


class ConvergenceError(RuntimeError):
    """A shifted solve did not reach its tolerance.

    ``residual`` is the final relative true residual.  Callers further up
    fill in ``term``, ``substep`` or ``level`` so the failing solve can be
    located.
    """

    def __init__(self, message, *, residual=math.nan, iterations=0,
                 term=None, substep=None, level=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.term = term
        self.substep = substep
        self.level = level

    def locate(self, **where) -> "ConvergenceError":
        """Return a copy annotated with extra location info."""
        info = dict(residual=self.residual, iterations=self.iterations,
                    term=self.term, substep=self.substep, level=self.level)
        info.update(where)
        tags = ", ".join(f"{k}={v}" for k, v in where.items())
        return ConvergenceError(f"{self.args[0]} [{tags}]", **info)


@dataclass(frozen=True)
class ShiftedSolveConfig:
    rel_tolerance: float = 1e-12
    max_iterations: int = 20000
    #: how often the recurrence residual is replaced by the true residual
    check_every: int = 50

    def __post_init__(self):
        if not 0.0 < self.rel_tolerance < 1.0:
            raise ValueError("rel_tolerance must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")


DEFAULT_SOLVE = ShiftedSolveConfig()

_WORKING_PRECISION = 1e3 * np.finfo(np.float64).eps


def _stencil(u: np.ndarray, h1: float, h2: float, out: np.ndarray | None = None) -> np.ndarray:
    # axis 1 is x1, axis 0 is x2; zero Dirichlet data outside the array
    u = np.ascontiguousarray(u, dtype=np.float64)
    if out is None:
        out = np.empty_like(u)
    _kernels.apply_op_scalar(u, out, 1.0 / h1**2, 1.0 / h2**2, 1.0, 0.0)
    return out


def apply_A(u: GridFunction) -> GridFunction:
    """Apply the 5-point Laplacian ``A`` with zero boundary values."""
    g = u.grid
    return GridFunction(g, _stencil(u.values, g.h1, g.h2))


def assemble_A(grid: GridSpec) -> np.ndarray:
    """Dense matrix of ``A`` in the flat node ordering, built from 1-D
    second-difference matrices.  For small grids only."""

    def second_difference(n, h):
        k = n - 1
        return (2.0 * np.eye(k) - np.eye(k, k=1) - np.eye(k, k=-1)) / h**2

    # flat index is i1 + (n1 - 1) * i2, so x1 is the fast (right) factor
    T1 = second_difference(grid.n1, grid.h1)
    T2 = second_difference(grid.n2, grid.h2)
    return np.kron(np.eye(grid.n2 - 1), T1) + np.kron(T2, np.eye(grid.n1 - 1))


def lambda_max(grid: GridSpec) -> float:
    """Largest eigenvalue of ``A``."""
    return sum(4.0 / h**2 * math.sin(math.pi * (n - 1) * h / 2.0) ** 2
               for n, h in ((grid.n1, grid.h1), (grid.n2, grid.h2)))


def solve_shifted(b, c: float, r: GridFunction,
                  cfg: ShiftedSolveConfig = DEFAULT_SOLVE,
                  x0: GridFunction | None = None) -> GridFunction:
    """Solve ``(b I + c A) x = r`` by unpreconditioned conjugate gradients.

    Parameters
    ----------
    b : float or GridFunction
        Nonnegative shift.  A grid function is treated as a diagonal
        operator, which keeps the system symmetric positive definite.
    c : float
        Positive multiplier of ``A``.
    r : GridFunction
        Right-hand side.
    cfg : ShiftedSolveConfig
        Stopping rule: ``||(bI + cA)x - r|| <= rel_tolerance * ||r||``,
        checked on the true residual.
    x0 : GridFunction, optional
        Initial guess (zero by default).

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``cfg.max_iterations``.
    """
    g = r.grid
    if isinstance(b, GridFunction):
        _check_same_grid(b, r)
        shift = b.values
        if (shift < 0).any():
            raise ValueError("diagonal shift must be nonnegative")
    else:
        shift = float(b)
        if shift < 0:
            raise ValueError(f"shift b must be >= 0, got {b}")
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")
    x = _cg(shift, float(c), r.values, g.h1, g.h2, cfg,
            None if x0 is None else x0.values)
    return GridFunction(g, x)


def _cg(shift, c, rhs, h1, h2, cfg, x0=None):
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    c1, c2 = 1.0 / h1**2, 1.0 / h2**2
    if np.ndim(shift):
        shift = np.ascontiguousarray(shift, dtype=np.float64)
        apply_op = _kernels.apply_op
    else:
        apply_op = _kernels.apply_op_scalar

    rnorm = math.sqrt(float(np.vdot(rhs, rhs)))
    if rnorm == 0.0:
        return np.zeros_like(rhs)
    target2 = (cfg.rel_tolerance * rnorm) ** 2
    # upper bound on ||bI + cA|| from Gershgorin discs
    op_norm = float(np.max(shift)) + c * 4.0 * (c1 + c2)

    ap = np.empty_like(rhs)
    res = np.empty_like(rhs)
    if x0 is None:
        x = np.zeros_like(rhs)
        res[...] = rhs
        rr = rnorm * rnorm
    else:
        x = np.array(x0, dtype=np.float64)
        apply_op(x, ap, c1, c2, c, shift)
        rr = _kernels.residual(rhs, ap, res)
    if rr <= target2:
        return x
    p = res.copy()

    last_true = math.inf
    early_checked = False
    for it in range(1, cfg.max_iterations + 1):
        alpha = rr / apply_op(p, ap, c1, c2, c, shift)
        rr_new = _kernels.step_xr(x, res, p, ap, alpha)
        periodic = it % cfg.check_every == 0
        if periodic or (rr_new <= target2 and not early_checked):
            early_checked = not periodic
            apply_op(x, ap, c1, c2, c, shift)
            rr_new = _kernels.residual(rhs, ap, res)
            if rr_new <= target2:
                return x
            # The true residual cannot drop much below eps * ||M|| * ||x||.
            # Once it stagnates with the backward error at working precision
            # the iterate is as good as float64 allows.
            true_norm = math.sqrt(rr_new)
            backward = true_norm / (op_norm * math.sqrt(float(np.vdot(x, x))) + rnorm)
            if true_norm > 0.5 * last_true and backward <= _WORKING_PRECISION:
                return x
            last_true = true_norm
        _kernels.step_p(p, res, rr_new / rr)
        rr = rr_new

    apply_op(x, ap, c1, c2, c, shift)
    rel = math.sqrt(_kernels.residual(rhs, ap, res)) / rnorm
    raise ConvergenceError(
        f"CG stopped after {cfg.max_iterations} iterations at relative residual {rel:.3e}",
        residual=rel, iterations=cfg.max_iterations)
