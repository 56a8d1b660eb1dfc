"""Experiment drivers for the model problem on the unit square.

Each ``run_*`` function takes an :class:`ExperimentSpec` and returns a
:class:`ResultTable`.  Cells (one per parameter combination) run in the
order the parameters are listed.  A cell whose linear solves or quadrature
fail is recorded in ``ResultTable.failures`` and the run moves on.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import GridFunction, GridSpec, delta_lower_bound, norm_l2, norm_linf, sample
from .laplacian import ConvergenceError, ShiftedSolveConfig, lambda_max
from .rational import (DEFAULT_KAPPA, DEFAULT_MU, QuadratureError, RationalCoefficients,
                       apply_Rm, make_coeffs, scalar_error_profile, write_coeffs_csv)
from .spectral import apply_power, evolve_exact, evolve_rational
from .splitting import SchemeConfig, default_levels, evolve

log = logging.getLogger(__name__)

EXPERIMENTS = ("stationary_table", "evolution", "scalar_profile", "convergence_order")
METHODS = ("gauss_jacobi", "simpson")

#: exceptions that mark a single cell as failed without stopping the run
CELL_ERRORS = (ConvergenceError, QuadratureError, ValueError, FloatingPointError)


def initial_condition(x1, x2):
    """``100 x1^2 (1 - x1) x2^2 (1 - x2)``."""
    return 100 * x1**2 * (1 - x1) * x2**2 * (1 - x2)


def source(x1, x2):
    """Right-hand side of the stationary problem, ``x1 * x2``."""
    return x1 * x2


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters shared by all experiment drivers.

    Attributes
    ----------
    experiment : str
        One of :data:`EXPERIMENTS`.
    n1, n2 : int
        Grid intervals per direction.
    alphas, ms : tuple
        Fractional orders and numbers of rational terms; every pair is a cell.
    method : str
        ``"gauss_jacobi"`` (uses ``mu``) or ``"simpson"`` (uses ``kappa``).
    sigma : float
        Scheme weight for time-dependent runs.
    taus : tuple
        Time steps.  Each must divide ``T`` into a whole number of steps.
    T : float
        Final time.
    tol : float
        Relative tolerance for every shifted solve.
    ordering : str
        Substep ordering, ``"forward"`` or ``"symmetrized"``.
    levels : int
        Number of evenly spaced time levels recorded by ``evolution``.
    samples : int
        Sample count for ``scalar_profile``.
    """

    experiment: str = "stationary_table"
    n1: int = 256
    n2: int = 256
    alphas: tuple = (0.25, 0.5, 0.75)
    ms: tuple = (50, 100, 200)
    method: str = "simpson"
    mu: float = DEFAULT_MU
    kappa: float = DEFAULT_KAPPA
    sigma: float = 1.0
    taus: tuple = (0.01,)
    T: float = 0.1
    tol: float = 1e-12
    ordering: str = "forward"
    levels: int = 10
    samples: int = 1000

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "ms", tuple(int(m) for m in self.ms))
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        if not self.alphas or not self.ms:
            raise ValueError("need at least one alpha and one m")
        if not all(0 < a < 1 for a in self.alphas):
            raise ValueError("alpha must lie in (0, 1)")
        if self.T < 0:
            raise ValueError("T must be non-negative")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        ShiftedSolveConfig(rel_tolerance=self.tol)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.n1, self.n2)

    @property
    def solve_config(self) -> ShiftedSolveConfig:
        return ShiftedSolveConfig(rel_tolerance=self.tol)

    def coefficients(self, beta: float, m: int) -> RationalCoefficients:
        return make_coeffs(self.method, beta, m, mu=self.mu, kappa=self.kappa)

    def beta_for(self, alpha: float) -> float:
        """Exponent approximated by ``R_m``: ``A**(-alpha)`` for the stationary
        problem, ``A**(alpha - 1)`` for the evolution operator ``R_m A``."""
        if self.experiment in ("evolution", "convergence_order"):
            return 1.0 - alpha
        return alpha

    def steps_for(self, tau: float) -> int:
        n = round(self.T / tau)
        if n < 0 or not math.isclose(n * tau, self.T, rel_tol=1e-9, abs_tol=1e-15):
            raise ValueError(f"tau={tau} does not divide T={self.T}")
        return n


@dataclass
class ResultTable:
    """Rows of one experiment plus the cells that failed."""

    columns: tuple
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)

    def write_csv(self, target) -> None:
        """One header line; integers as is, floats as ``%.9e``.

        ``target`` is a path or an open text file.
        """
        if hasattr(target, "write"):
            self._write(target)
        else:
            with open(target, "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([v if isinstance(v, (int, np.integer)) else "%.9e" % v
                             for v in row])


@dataclass(frozen=True)
class OrderEstimate:
    """Observed orders ``log2(e(tau)/e(tau/2))`` for successive halvings.

    ``mean`` is ``None`` when the errors are floor-limited.
    """

    pair_orders: tuple
    mean: float | None
    floor_limited: bool


def estimate_order(errors, floor: float | None = None,
                   min_ratio: float = 1.1, floor_margin: float = 10.0) -> OrderEstimate:
    """Observed convergence order from errors at ``tau, tau/2, tau/4, ...``.

    Parameters
    ----------
    errors : sequence of float
        At least two positive errors, each at half the previous step.
    floor : float, optional
        Size of the time-independent error (from the rational approximation).
        Errors within ``floor_margin * floor`` count as floor-limited.
    min_ratio : float
        Successive ratios below this count as stalled.
    """
    e = np.asarray(errors, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise ValueError("need at least two errors")
    if np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise ValueError("errors must be positive and finite")
    ratios = e[:-1] / e[1:]
    orders = tuple(float(p) for p in np.log2(ratios))
    limited = bool(np.any(ratios < min_ratio))
    if floor is not None and e.min() < floor_margin * floor:
        limited = True
    mean = None if limited else float(np.mean(orders))
    return OrderEstimate(orders, mean, limited)


def _fail(table: ResultTable, cell: dict, exc: Exception) -> None:
    log.warning("cell %s failed: %s", cell, exc)
    table.failures.append((cell, f"{type(exc).__name__}: {exc}"))


def _cells(spec: ExperimentSpec):
    for alpha in spec.alphas:
        for m in spec.ms:
            yield alpha, m


def emit_coefficients(spec: ExperimentSpec, directory) -> list[Path]:
    """Write the ``R_m`` coefficients used by each cell as CSV files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for alpha, m in _cells(spec):
        beta = spec.beta_for(alpha)
        path = directory / f"coeffs_{spec.method}_beta{beta:g}_m{m}.csv"
        write_coeffs_csv(spec.coefficients(beta, m), path)
        paths.append(path)
    return paths


def run_stationary_table(spec: ExperimentSpec) -> ResultTable:
    """Relative errors of ``R_m(A; alpha) phi`` against ``A**(-alpha) phi``."""
    g = spec.grid
    phi = sample(g, source)
    table = ResultTable(("alpha", "m", "eps2", "epsinf"))
    for alpha, m in _cells(spec):
        cell = {"alpha": alpha, "m": m}
        try:
            exact = apply_power(phi, -alpha)
            approx = apply_Rm(spec.coefficients(alpha, m), phi, spec.solve_config)
        except CELL_ERRORS as exc:
            _fail(table, cell, exc)
            continue
        diff = approx - exact
        eps2 = norm_l2(diff) / norm_l2(exact)
        epsinf = norm_linf(diff) / norm_linf(exact)
        log.info("stationary alpha=%g m=%d eps2=%.6e epsinf=%.6e", alpha, m, eps2, epsinf)
        table.rows.append((alpha, m, eps2, epsinf))
    return table


def run_evolution(spec: ExperimentSpec, u0: GridFunction | None = None) -> ResultTable:
    """Componentwise splitting against the exact fractional evolution.

    Errors are absolute, recorded at step 0 and ``spec.levels`` evenly spaced
    levels up to ``T``.
    """
    g = spec.grid
    u0 = sample(g, initial_condition) if u0 is None else u0
    table = ResultTable(("alpha", "m", "sigma", "tau", "t", "eps2", "epsinf"))
    for alpha, m in _cells(spec):
        for tau in spec.taus:
            cell = {"alpha": alpha, "m": m, "tau": tau}
            try:
                n = spec.steps_for(tau)
                scheme = SchemeConfig("componentwise", spec.sigma, tau, n, spec.ordering)
                traj = evolve(scheme, spec.coefficients(1 - alpha, m), u0,
                              oracle=lambda u, t, a=alpha: evolve_exact(u, t, a),
                              cfg=spec.solve_config,
                              levels=default_levels(n, spec.levels))
            except CELL_ERRORS as exc:
                _fail(table, cell, exc)
                continue
            for step, e2, ei in zip(traj.recorded_steps, traj.eps2, traj.epsinf):
                table.rows.append((alpha, m, spec.sigma, tau, traj.times[step], e2, ei))
            log.info("evolution alpha=%g m=%d tau=%g eps2(T)=%.6e",
                     alpha, m, tau, traj.eps2[-1])
    return table


def run_scalar_profile(spec: ExperimentSpec) -> ResultTable:
    """``r_m(lam)`` against ``lam**(-alpha)`` over the grid's spectral interval."""
    g = spec.grid
    lo, hi = delta_lower_bound(g), lambda_max(g)
    table = ResultTable(("alpha", "m", "lambda", "r_m", "exact", "rel_error"))
    for alpha, m in _cells(spec):
        try:
            worst, prof = scalar_error_profile(spec.coefficients(alpha, m), lo, hi, spec.samples)
        except CELL_ERRORS as exc:
            _fail(table, {"alpha": alpha, "m": m}, exc)
            continue
        log.info("profile alpha=%g m=%d max rel error %.6e", alpha, m, worst)
        table.rows.extend((alpha, m, *map(float, r)) for r in prof)
    return table


def run_convergence_order(spec: ExperimentSpec, u0: GridFunction | None = None) -> ResultTable:
    """Final-time errors over the step sizes in ``spec.taus`` (largest first).

    ``floor`` is the distance between the exact evolution and the evolution
    with ``R_m`` in place of ``A**(alpha - 1)``, i.e. the error left as the
    step goes to zero.  ``order`` compares each step with the previous one.
    """
    g = spec.grid
    u0 = sample(g, initial_condition) if u0 is None else u0
    taus = sorted(spec.taus, reverse=True)
    table = ResultTable(("alpha", "m", "sigma", "tau", "eps2", "floor", "order",
                         "floor_limited"))
    for alpha, m in _cells(spec):
        cell = {"alpha": alpha, "m": m}
        try:
            coeffs = spec.coefficients(1 - alpha, m)
            exact = evolve_exact(u0, spec.T, alpha)
            floor = norm_l2(evolve_rational(u0, spec.T, coeffs) - exact)
            errors = []
            for tau in taus:
                n = spec.steps_for(tau)
                scheme = SchemeConfig("componentwise", spec.sigma, tau, n, spec.ordering)
                traj = evolve(scheme, coeffs, u0, cfg=spec.solve_config, levels=[n])
                errors.append(norm_l2(traj.final - exact))
        except CELL_ERRORS as exc:
            _fail(table, cell, exc)
            continue
        est = estimate_order(errors, floor) if len(errors) > 1 else None
        for k, (tau, e) in enumerate(zip(taus, errors)):
            p = est.pair_orders[k - 1] if k > 0 else math.nan
            limited = int(est.floor_limited) if est else 0
            table.rows.append((alpha, m, spec.sigma, tau, e, floor, p, limited))
        if est:
            log.info("order alpha=%g m=%d pairs=%s mean=%s", alpha, m,
                     ["%.3f" % p for p in est.pair_orders], est.mean)
    return table


RUNNERS = {
    "stationary_table": run_stationary_table,
    "evolution": run_evolution,
    "scalar_profile": run_scalar_profile,
    "convergence_order": run_convergence_order,
}


def run(spec: ExperimentSpec) -> ResultTable:
    return RUNNERS[spec.experiment](spec)
