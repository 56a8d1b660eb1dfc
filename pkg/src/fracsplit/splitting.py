"""Splitting time integrators for ``dv/dt + R_m(A; beta) A v = 0``.

With ``R_m(A; beta) = sum a_i (b_i I + A)**(-1)`` the operator splits into
commuting self-adjoint terms ``D_i = a_i (b_i I + A)**(-1) A``.  A time step
advances through the terms one after another, each with a two-level weighted
scheme, so only shifted Laplacian systems are ever solved.

Three substep families are provided:

``componentwise``
    ``(w' - w)/tau + D_i(sigma w' + (1 - sigma) w) = 0``.
``mass_weighted``
    Same with ``B (w' - w)/tau`` for a diagonal mass operator ``B``.
``regularized``
    Explicit ``B (w' - w)/tau + R_i w = 0`` with the perturbed term
    ``R_i = a_i (b_i I + A + sigma tau a_i A)**(-1) A``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grid import GridFunction, GridSpec, inner_product, norm_l2, norm_linf
from .laplacian import (DEFAULT_SOLVE, ConvergenceError, ShiftedSolveConfig,
                        apply_A, solve_shifted)
from .rational import RationalCoefficients

KINDS = ("componentwise", "mass_weighted", "regularized")
ORDERINGS = ("forward", "symmetrized")


@dataclass(frozen=True)
class MassOperator:
    """Diagonal positive mass operator ``B`` with certified bound ``B >= gamma I``."""

    diagonal: GridFunction
    gamma: float = None

    def __post_init__(self):
        dmin = float(self.diagonal.values.min())
        gamma = dmin if self.gamma is None else float(self.gamma)
        if not gamma > 0:
            raise ValueError("mass operator must be positive definite")
        if dmin < gamma:
            raise ValueError(f"diagonal minimum {dmin} is below gamma={gamma}")
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def identity(cls, grid: GridSpec) -> "MassOperator":
        return cls(GridFunction.constant(grid, 1.0))

    @property
    def grid(self) -> GridSpec:
        return self.diagonal.grid

    def apply(self, u: GridFunction) -> GridFunction:
        return self.diagonal * u

    def solve(self, u: GridFunction) -> GridFunction:
        return u / self.diagonal

    def norm(self, u: GridFunction) -> float:
        """Energy norm ``(B u, u)**0.5``."""
        return math.sqrt(inner_product(self.apply(u), u))


@dataclass(frozen=True)
class SchemeConfig:
    kind: str = "componentwise"
    sigma: float = 1.0
    tau: float = 0.01
    n_steps: int = 10
    ordering: str = "forward"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise ValueError("n_steps must be a nonnegative integer")

    def stability_guaranteed(self, gamma: float = 1.0) -> bool:
        """Whether the unconditional stability theorem covers this config.

        ``gamma`` is the lower bound of the mass operator (regularized only).
        """
        if self.kind == "regularized":
            return 2.0 * gamma * self.sigma >= 1.0
        return self.sigma >= 0.5

    @property
    def final_time(self) -> float:
        return self.n_steps * self.tau


def _substeps(m: int, tau: float, ordering: str):
    """Sequence of ``(term index, substep weight)`` for one time step."""
    if ordering == "forward":
        return [(i, tau) for i in range(m)]
    half = 0.5 * tau
    return [(i, half) for i in range(m)] + [(i, half) for i in reversed(range(m))]


def _componentwise_substep(w, a, b, sigma, tau, cfg):
    Aw = apply_A(w)
    chi = b * w + (1.0 - a * (1.0 - sigma) * tau) * Aw
    return solve_shifted(b, 1.0 + a * sigma * tau, chi, cfg, x0=w)


def _mass_substep(w, a, b, B: MassOperator, sigma, tau, cfg):
    # ((bI + A)B + cA) w' = chi with c = a sigma tau.  Substituting
    # z = (B + cI) w' gives (A + diag(bB/(B + c))) z = chi, which is SPD.
    c = a * sigma * tau
    Bw = B.apply(w)
    chi = b * Bw + apply_A(Bw) - a * (1.0 - sigma) * tau * apply_A(w)
    Bc = B.diagonal + c
    z = solve_shifted(b * B.diagonal / Bc, 1.0, chi, cfg, x0=Bc * w)
    return z / Bc


def _regularized_substep(w, a, b, B: MassOperator, sigma, tau, cfg):
    Rw = a * solve_shifted(b, 1.0 + sigma * tau * a, apply_A(w), cfg)
    return w - tau * B.solve(Rw)


def _run_step(w, coeffs, kind, sigma, tau, ordering, cfg, B=None):
    for s, (i, weight) in enumerate(_substeps(coeffs.m, tau, ordering)):
        a, b = float(coeffs.a[i]), float(coeffs.b[i])
        try:
            if kind == "componentwise":
                w = _componentwise_substep(w, a, b, sigma, weight, cfg)
            elif kind == "mass_weighted":
                w = _mass_substep(w, a, b, B, sigma, weight, cfg)
            else:
                w = _regularized_substep(w, a, b, B, sigma, weight, cfg)
        except ConvergenceError as exc:
            raise exc.locate(term=i, substep=s) from exc
    return w


def split_step_componentwise(w: GridFunction, coeffs: RationalCoefficients,
                             sigma: float, tau: float,
                             cfg: ShiftedSolveConfig = DEFAULT_SOLVE,
                             ordering: str = "forward") -> GridFunction:
    """One componentwise splitting step.

    Substep ``i`` solves
    ``(b_i I + (1 + a_i sigma tau) A) w' = (b_i I + (1 - a_i (1 - sigma) tau) A) w``.
    The symmetrized ordering sweeps the terms forward then backward with
    half steps.  ``coeffs`` must approximate ``A**-(1 - alpha)``.
    """
    if tau == 0:
        return w.copy()
    return _run_step(w, coeffs, "componentwise", sigma, tau, ordering, cfg)


def split_step_mass(w: GridFunction, coeffs: RationalCoefficients, B: MassOperator,
                    sigma: float, tau: float,
                    cfg: ShiftedSolveConfig = DEFAULT_SOLVE,
                    ordering: str = "forward") -> GridFunction:
    """One splitting step for ``B dv/dt + D v = 0``.

    Substep ``i`` solves ``((b_i I + A) B + a_i sigma tau A) w' =
    ((b_i I + A) B - a_i (1 - sigma) tau A) w``.  Stable in the ``B``-norm for
    ``sigma >= 0.5``.
    """
    if tau == 0:
        return w.copy()
    return _run_step(w, coeffs, "mass_weighted", sigma, tau, ordering, cfg, B)


def regularized_step(w: GridFunction, coeffs: RationalCoefficients, B: MassOperator,
                     sigma: float, tau: float,
                     cfg: ShiftedSolveConfig = DEFAULT_SOLVE,
                     ordering: str = "forward") -> GridFunction:
    """One regularized explicit splitting step: ``w' = w - tau B^{-1} R_i w``
    per term.  Stable in the ``B``-norm when ``2 gamma sigma >= 1``."""
    if tau == 0:
        return w.copy()
    return _run_step(w, coeffs, "regularized", sigma, tau, ordering, cfg, B)


def build_D_terms(coeffs: RationalCoefficients,
                  cfg: ShiftedSolveConfig = DEFAULT_SOLVE) -> list[Callable]:
    """Callables ``D_i(v) = a_i (b_i I + A)**(-1) A v``."""

    def make(i, a, b):
        def D(v: GridFunction) -> GridFunction:
            try:
                return a * solve_shifted(b, 1.0, apply_A(v), cfg)
            except ConvergenceError as exc:
                raise exc.locate(term=i) from exc
        return D

    return [make(i, float(a), float(b)) for i, (a, b) in enumerate(coeffs.terms)]


@dataclass
class Trajectory:
    """Norms at every time level plus snapshots and errors at recorded levels."""

    times: np.ndarray
    l2_norms: np.ndarray
    b_norms: Optional[np.ndarray] = None
    recorded_steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    eps2: list = field(default_factory=list)
    epsinf: list = field(default_factory=list)

    @property
    def final(self) -> GridFunction:
        return self.snapshots[-1]

    def write_csv(self, path) -> None:
        """Rows ``step,t,l2_norm,eps2,epsinf`` for every recorded level."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "t", "l2_norm", "eps2", "epsinf"])
            for j, n in enumerate(self.recorded_steps):
                e2 = self.eps2[j] if self.eps2 else math.nan
                ei = self.epsinf[j] if self.epsinf else math.nan
                writer.writerow([n, "%.9e" % self.times[n], "%.9e" % self.l2_norms[n],
                                 "%.9e" % e2, "%.9e" % ei])


def default_levels(n_steps: int, count: int = 10) -> list[int]:
    """``count`` evenly spaced step indices ending at ``n_steps`` (plus step 0)."""
    if n_steps == 0:
        return [0]
    levels = {0, n_steps}
    levels.update(int(round(k * n_steps / count)) for k in range(1, count + 1))
    return sorted(levels)


def evolve(scheme: SchemeConfig, coeffs: RationalCoefficients, u0: GridFunction,
           B: MassOperator | None = None,
           oracle: Callable[[GridFunction, float], GridFunction] | None = None,
           cfg: ShiftedSolveConfig = DEFAULT_SOLVE,
           levels: list[int] | None = None) -> Trajectory:
    """Run ``scheme.n_steps`` steps from ``u0``.

    ``oracle(u0, t)`` returns the reference solution at time ``t``; when given,
    absolute ``eps2``/``epsinf`` discrepancies are recorded at each level in
    ``levels`` (default: step 0 and ten evenly spaced levels).
    """
    if scheme.kind == "componentwise":
        if B is not None:
            raise ValueError("componentwise scheme takes no mass operator")
    elif B is None:
        raise ValueError(f"{scheme.kind} scheme requires a mass operator")

    n = int(scheme.n_steps)
    levels = default_levels(n) if levels is None else sorted(set(levels) | {0})
    if levels[-1] > n:
        raise ValueError("requested level beyond n_steps")
    wanted = set(levels)

    times = np.arange(n + 1) * scheme.tau
    traj = Trajectory(times=times, l2_norms=np.empty(n + 1),
                      b_norms=None if B is None else np.empty(n + 1))

    def record(step, w):
        traj.l2_norms[step] = norm_l2(w)
        if B is not None:
            traj.b_norms[step] = B.norm(w)
        if step in wanted:
            traj.recorded_steps.append(step)
            traj.snapshots.append(w)
            if oracle is not None:
                diff = oracle(u0, times[step]) - w
                traj.eps2.append(norm_l2(diff))
                traj.epsinf.append(norm_linf(diff))

    w = u0.copy()
    record(0, w)
    for step in range(1, n + 1):
        try:
            w = _run_step(w, coeffs, scheme.kind, scheme.sigma, scheme.tau,
                          scheme.ordering, cfg, B)
        except ConvergenceError as exc:
            raise exc.locate(level=step) from exc
        record(step, w)
    return traj
