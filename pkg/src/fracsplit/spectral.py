"""Exact reference solutions through the sine eigenbasis of ``A``.

The 5-point Dirichlet Laplacian is diagonalized by sampled products
``sin(pi k1 x1) sin(pi k2 x2)``; the transform is an orthonormal type-I
discrete sine transform along each axis.  Any function of ``A`` is then a
pointwise multiplication of the coefficients.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.fft import dstn, idstn

from .grid import GridFunction, GridSpec


class EigenBasis:
    """Eigenvalues and transforms of ``A`` on one grid (immutable)."""

    def __init__(self, grid: GridSpec):
        self.grid = grid
        lam1 = 4.0 / grid.h1**2 * np.sin(np.pi * np.arange(1, grid.n1) * grid.h1 / 2.0) ** 2
        lam2 = 4.0 / grid.h2**2 * np.sin(np.pi * np.arange(1, grid.n2) * grid.h2 / 2.0) ** 2
        ev = lam2[:, None] + lam1[None, :]
        ev.setflags(write=False)
        self.eigenvalues = ev

    def forward(self, u: GridFunction) -> np.ndarray:
        """Eigen-coefficients of ``u``."""
        return dstn(u.values, type=1, norm="ortho")

    def inverse(self, coeffs: np.ndarray) -> GridFunction:
        return GridFunction(self.grid, idstn(coeffs, type=1, norm="ortho"))

    def apply_function(self, u: GridFunction, f) -> GridFunction:
        """Apply ``f(A)`` for a vectorized scalar function ``f``."""
        return self.inverse(self.forward(u) * f(self.eigenvalues))

    def mode(self, k1: int, k2: int) -> GridFunction:
        """Sampled eigenvector ``sin(pi k1 x1) sin(pi k2 x2)``."""
        X1, X2 = self.grid.coordinates()
        return GridFunction(self.grid, np.sin(np.pi * k1 * X1) * np.sin(np.pi * k2 * X2))

    def eigenvalue(self, k1: int, k2: int) -> float:
        return float(self.eigenvalues[k2 - 1, k1 - 1])


@lru_cache(maxsize=16)
def eigenbasis(grid: GridSpec) -> EigenBasis:
    return EigenBasis(grid)


def apply_power(u: GridFunction, gamma: float) -> GridFunction:
    """``A**gamma u`` for any real ``gamma``."""
    return eigenbasis(u.grid).apply_function(u, lambda lam: lam**gamma)


def evolve_exact(u0: GridFunction, t: float, alpha: float) -> GridFunction:
    """Solution ``exp(-t A**alpha) u0`` of ``du/dt + A**alpha u = 0``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return eigenbasis(u0.grid).apply_function(u0, lambda lam: np.exp(-t * lam**alpha))


def evolve_rational(u0: GridFunction, t: float, coeffs) -> GridFunction:
    """Exact solution of ``dv/dt + R_m(A) A v = 0`` for rational coefficients.

    This is the limit the splitting schemes converge to as the step goes to
    zero; each mode decays at rate ``r_m(lambda) * lambda``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    return eigenbasis(u0.grid).apply_function(
        u0, lambda lam: np.exp(-t * coeffs.evaluate(lam) * lam))


def explicit_step(y: GridFunction, tau: float, alpha: float) -> GridFunction:
    """One step of ``(y' - y)/tau + A**alpha y = 0``."""
    return eigenbasis(y.grid).apply_function(y, lambda lam: 1.0 - tau * lam**alpha)


def weighted_step(y: GridFunction, tau: float, alpha: float, sigma: float) -> GridFunction:
    """One step of the two-level scheme with weight ``sigma`` in ``(0, 1]``."""
    if not 0.0 < sigma <= 1.0:
        raise ValueError("sigma must lie in (0, 1]")

    def amp(lam):
        p = tau * lam**alpha
        return (1.0 - (1.0 - sigma) * p) / (1.0 + sigma * p)

    return eigenbasis(y.grid).apply_function(y, amp)


def explicit_step_bound(grid: GridSpec, alpha: float) -> float:
    """Largest stable step ``2 / lambda_max**alpha`` of the explicit scheme."""
    return 2.0 / float(eigenbasis(grid).eigenvalues.max()) ** alpha
