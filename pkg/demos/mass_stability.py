# Equations with a mass operator, B dv/dt + R_m(A) A v = 0, with B diagonal.
#
# The weighted scheme is stable in the B-norm for sigma >= 0.5.  The explicit
# regularized scheme needs 2 gamma sigma >= 1, where B >= gamma I.  Running
# the terms forward then backward (symmetrized) restores second order when B
# and A do not commute.  The stability conditions are sufficient, not
# necessary: a run outside them may still decay.

import numpy as np
from scipy.linalg import expm

from fracsplit import (GridFunction, GridSpec, MassOperator, SchemeConfig, assemble_A,
                       evolve, norm_l2, sample, simpson_coeffs)

rng = np.random.default_rng(0)
grid = GridSpec.square(8)
B = MassOperator(GridFunction(grid, rng.uniform(0.5, 2.0, grid.shape)))
coeffs = simpson_coeffs(0.5, 10)
u0 = sample(grid, lambda x1, x2: 100 * x1**2 * (1 - x1) * x2**2 * (1 - x2))
print(f"gamma = {B.gamma:.3f}")

for kind, sigma in [("mass_weighted", 0.5), ("regularized", 1 / (2 * B.gamma)),
                    ("regularized", 0.1)]:
    scheme = SchemeConfig(kind, sigma, tau=0.5, n_steps=8)
    traj = evolve(scheme, coeffs, u0, B=B)
    grows = bool(np.any(np.diff(traj.b_norms) > 0))
    print(f"{kind:>13} sigma={sigma:.3f} guaranteed={scheme.stability_guaranteed(B.gamma)!s:5}"
          f" B-norm grows: {grows}  final {traj.b_norms[-1]:.3e}")

# Reference solution from the dense matrix exponential of B^-1 sum_i D_i.
A = assemble_A(grid)
eye = np.eye(grid.size)
D = sum(a * np.linalg.solve(b * eye + A, A) for a, b in coeffs.terms)
T = 0.2
ref = expm(-T * D / B.diagonal.values.ravel()[:, None]) @ u0.values.ravel()
ref = GridFunction(grid, ref.reshape(grid.shape))

for ordering in ("forward", "symmetrized"):
    errs = []
    for n in (16, 32, 64):
        traj = evolve(SchemeConfig("mass_weighted", 0.5, T / n, n, ordering), coeffs, u0,
                      B=B, levels=[n])
        errs.append(norm_l2(traj.final - ref))
    p = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    print(f"{ordering:>11}: errors {errs[0]:.2e} {errs[1]:.2e} {errs[2]:.2e}  orders {p.round(2)}")
