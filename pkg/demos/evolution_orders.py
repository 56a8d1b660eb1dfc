# Fractional diffusion dv/dt + A^alpha v = 0 from u0 = 100 x1^2 (1-x1) x2^2 (1-x2).
#
# A^alpha is replaced by R_m(A; 1-alpha) A = sum_i D_i, and each time step
# runs through the D_i one at a time.  With sigma = 1 the step is first order,
# with sigma = 0.5 second order until the error reaches the floor set by
# the rational approximation itself.

import numpy as np

from fracsplit import (GridSpec, SchemeConfig, estimate_order, evolve, evolve_exact,
                       evolve_rational, norm_l2, sample, simpson_coeffs)

grid = GridSpec.square(32)
u0 = sample(grid, lambda x1, x2: 100 * x1**2 * (1 - x1) * x2**2 * (1 - x2))
T, alpha = 0.1, 0.5
exact = evolve_exact(u0, T, alpha)

for m in (20, 100):
    coeffs = simpson_coeffs(1 - alpha, m)
    floor = norm_l2(evolve_rational(u0, T, coeffs) - exact)
    print(f"\nm={m}: approximation floor {floor:.3e}")
    for sigma in (1.0, 0.5):
        steps = [4, 8, 16, 32, 64]
        errors = []
        for n in steps:
            traj = evolve(SchemeConfig("componentwise", sigma, T / n, n), coeffs, u0, levels=[n])
            errors.append(norm_l2(traj.final - exact))
        est = estimate_order(errors, floor)
        orders = " ".join(f"{p:5.2f}" for p in est.pair_orders)
        print(f"  sigma={sigma}: errors " + " ".join(f"{e:.2e}" for e in errors))
        print(f"             orders {orders}  floor-limited: {est.floor_limited}")

# The norm never grows, whatever the step size.
coeffs = simpson_coeffs(1 - alpha, 50)
traj = evolve(SchemeConfig("componentwise", 0.5, 1.0, 5), coeffs, u0)
print("\nnorms with tau=1:", np.array2string(traj.l2_norms, precision=4))
assert np.all(np.diff(traj.l2_norms) <= 0)
