"""Rational approximations ``A**(-beta) ~ sum_i a_i (b_i I + A)**(-1)``.

Two constructions are provided, both from quadrature of an integral
representation of the negative fractional power:

* :func:`gauss_jacobi_coeffs` maps ``(0, inf)`` onto ``(-1, 1)`` with
  ``theta = mu (1 - eta) / (1 + eta)`` and integrates with a Gauss-Jacobi rule
  whose weight absorbs the endpoint singularities;
* :func:`simpson_coeffs` uses a representation on ``[0, 1]`` with a smooth,
  vanishing-at-one integrand (smoothness tuned by ``kappa``) and composite
  Simpson weights.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .grid import GridFunction
from .laplacian import DEFAULT_SOLVE, ConvergenceError, ShiftedSolveConfig, solve_shifted

DEFAULT_MU = 4.0
DEFAULT_KAPPA = 5.0


class QuadratureError(RuntimeError):
    """The quadrature rule could not be constructed."""


@dataclass(frozen=True, eq=False)
class RationalCoefficients:
    """Terms ``(a_i, b_i)`` of ``r_m(lam) = sum a_i / (b_i + lam)``.

    Terms are kept in ascending order of ``b``; that order is also the
    summation order everywhere the approximation is applied.
    """

    beta: float
    a: np.ndarray
    b: np.ndarray
    method: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64).ravel()
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if a.shape != b.shape or a.size == 0:
            raise ValueError("a and b must be nonempty and of equal length")
        if not (a > 0).all():
            raise ValueError("all a_i must be positive")
        if not (b >= 0).all():
            raise ValueError("all b_i must be nonnegative")
        order = np.argsort(b, kind="stable")
        a, b = a[order], b[order]
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return int(self.a.size)

    @property
    def terms(self) -> list[tuple[float, float]]:
        return list(zip(self.a.tolist(), self.b.tolist()))

    def evaluate(self, lam):
        """Scalar approximation ``r_m(lam)`` of ``lam**(-beta)``."""
        lam = np.asarray(lam, dtype=np.float64)
        out = np.zeros(np.broadcast(lam).shape)
        for ai, bi in zip(self.a, self.b):
            out += ai / (bi + lam)
        return out

    def scaled(self, factor: float) -> "RationalCoefficients":
        return RationalCoefficients(self.beta, self.a * factor, self.b,
                                    self.method, dict(self.params))


def _check_beta(beta):
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")


def gauss_jacobi_rule(m: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``m``-point Gauss-Jacobi rule.

    Weight function ``(1 - x)**a (1 + x)**b`` on ``(-1, 1)``, ``a, b > -1``.
    Computed by the Golub-Welsch eigenvalue method on the Jacobi matrix of
    the monic three-term recurrence.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    n = np.arange(m, dtype=np.float64)
    s = 2.0 * n + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2.0))
    diag[0] = (b - a) / (a + b + 2.0)

    k = np.arange(1, m, dtype=np.float64)
    s = 2.0 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        off2 = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0))
    if m > 1:
        # the general k = 1 entry is 0/0 when a + b = -1; use the reduced form
        off2[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) ** 2 * (3.0 + a + b))
    off = np.sqrt(off2)
    try:
        x = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise QuadratureError(f"Gauss-Jacobi eigenproblem failed for m={m}") from exc

    log_mu0 = ((a + b + 1.0) * math.log(2.0) + gammaln(a + 1.0) + gammaln(b + 1.0)
               - gammaln(a + b + 2.0))
    # Christoffel numbers 1 / sum_k p_k(x)^2 over the orthonormal polynomials;
    # unlike squared eigenvector entries these keep small weights accurate
    p_prev = np.zeros_like(x)
    p = np.full_like(x, math.exp(-0.5 * log_mu0))
    total = p * p
    for j in range(m - 1):
        p_next = ((x - diag[j]) * p - (off[j - 1] if j else 0.0) * p_prev) / off[j]
        p_prev, p = p, p_next
        total += p * p
    w = 1.0 / total
    if not (np.all(np.abs(x) < 1.0) and np.all(w > 0)):
        raise QuadratureError(f"Gauss-Jacobi rule for m={m} produced invalid nodes or weights")
    return x, w


def gauss_jacobi_coeffs(beta: float, m: int, mu: float = DEFAULT_MU) -> RationalCoefficients:
    """Rational coefficients from Gauss-Jacobi quadrature after the map
    ``theta = mu (1 - eta) / (1 + eta)``.

    The rule uses weight ``(1 - eta)**(-beta) (1 + eta)**(beta - 1)``; node
    ``eta_i`` with weight ``w_i`` gives
    ``a_i = 2 mu**(1 - beta) sin(pi beta) / pi * w_i / (1 + eta_i)`` and
    ``b_i = mu (1 - eta_i) / (1 + eta_i)``.  The approximation is exact at
    ``lam = mu`` for ``m = 1``.
    """
    _check_beta(beta)
    if not mu > 0:
        raise ValueError("mu must be positive")
    eta, w = gauss_jacobi_rule(m, -beta, beta - 1.0)
    scale = 2.0 * mu ** (1.0 - beta) * math.sin(math.pi * beta) / math.pi
    a = scale * w / (1.0 + eta)
    b = mu * (1.0 - eta) / (1.0 + eta)
    return RationalCoefficients(beta, a, b, "gauss_jacobi", {"mu": float(mu)})


def simpson_weights(m: int) -> np.ndarray:
    """Composite Simpson weights ``1, 4, 2, ..., 2, 4`` (times ``1/(3m)``) on
    the first ``m`` of the ``m + 1`` nodes of ``[0, 1]``."""
    w = np.full(m, 2.0)
    w[1::2] = 4.0
    w[0] = 1.0
    return w / (3.0 * m)


def simpson_coeffs(beta: float, m: int, kappa: float = DEFAULT_KAPPA) -> RationalCoefficients:
    """Rational coefficients from composite Simpson quadrature on ``[0, 1]``.

    Nodes are ``eta_i = (i - 1)/m``; the node ``eta = 1`` is dropped since the
    integrand vanishes there.  With
    ``d_i = sin(pi beta)/((1 - beta) pi) (1 - eta_i)**(kappa - 1 - kappa/beta)
    (1 + (kappa (1 - beta)/beta - 1) eta_i)`` the terms are
    ``a_i = w_i d_i`` and ``b_i = eta_i**(1/(1 - beta)) (1 - eta_i)**(-kappa/beta)``.
    """
    _check_beta(beta)
    if m < 2 or m % 2:
        raise ValueError(f"m must be a positive even integer, got {m}")
    if not kappa > 1:
        raise ValueError(f"kappa must exceed 1, got {kappa}")
    eta = np.arange(m, dtype=np.float64) / m
    c = math.sin(math.pi * beta) / ((1.0 - beta) * math.pi)
    d = (c * (1.0 - eta) ** (kappa - 1.0 - kappa / beta)
         * (1.0 + (kappa * (1.0 - beta) / beta - 1.0) * eta))
    b = eta ** (1.0 / (1.0 - beta)) * (1.0 - eta) ** (-kappa / beta)
    return RationalCoefficients(beta, simpson_weights(m) * d, b, "simpson",
                                {"kappa": float(kappa)})


def make_coeffs(method: str, beta: float, m: int, *, mu: float = DEFAULT_MU,
                kappa: float = DEFAULT_KAPPA) -> RationalCoefficients:
    if method == "gauss_jacobi":
        return gauss_jacobi_coeffs(beta, m, mu)
    if method == "simpson":
        return simpson_coeffs(beta, m, kappa)
    raise ValueError(f"unknown method {method!r}")


def apply_Rm(coeffs: RationalCoefficients, phi: GridFunction,
             cfg: ShiftedSolveConfig = DEFAULT_SOLVE) -> GridFunction:
    """``sum_i a_i (b_i I + A)**(-1) phi``, one CG solve per term."""
    out = np.zeros(phi.grid.shape)
    for i, (ai, bi) in enumerate(zip(coeffs.a, coeffs.b)):
        try:
            x = solve_shifted(bi, 1.0, phi, cfg)
        except ConvergenceError as exc:
            raise exc.locate(term=i) from exc
        out += ai * x.values
    return GridFunction(phi.grid, out)


def scalar_error_profile(coeffs: RationalCoefficients, lambda_lo: float,
                         lambda_hi: float, samples: int = 1000):
    """Relative error of ``r_m(lam)`` against ``lam**(-beta)``.

    Samples are geometrically spaced on ``[lambda_lo, lambda_hi]``.  Returns
    ``(max_rel_error, table)`` where ``table`` has columns
    ``lambda, r_m, exact, rel_error``.
    """
    if not 0 < lambda_lo <= lambda_hi:
        raise ValueError("need 0 < lambda_lo <= lambda_hi")
    if samples < 1:
        raise ValueError("samples must be positive")
    lam = np.geomspace(lambda_lo, lambda_hi, samples)
    approx = coeffs.evaluate(lam)
    exact = lam ** (-coeffs.beta)
    rel = np.abs(approx - exact) / exact
    return float(rel.max()), np.column_stack([lam, approx, exact, rel])


def write_coeffs_csv(coeffs: RationalCoefficients, path) -> None:
    """Export terms as CSV with header ``i,a,b`` (``i`` starts at 1)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "a", "b"])
        for i, (ai, bi) in enumerate(coeffs.terms, start=1):
            writer.writerow([i, repr(ai), repr(bi)])


def read_coeffs_csv(path, beta: float) -> RationalCoefficients:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    a = [float(r["a"]) for r in rows]
    b = [float(r["b"]) for r in rows]
    return RationalCoefficients(beta, a, b)
