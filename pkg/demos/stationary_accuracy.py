# Solve A^alpha v = x1 x2 with a sum of shifted Laplacian solves and compare
# against the exact fractional power computed in the sine eigenbasis.
#
# Run with a larger N (e.g. 256) to get the full-size accuracy tables; 64
# keeps this under a minute.

import sys

from fracsplit import (GridSpec, apply_power, apply_Rm, gauss_jacobi_coeffs, norm_l2,
                       norm_linf, sample, simpson_coeffs)

N = int(sys.argv[1]) if len(sys.argv) > 1 else 64
grid = GridSpec.square(N)
phi = sample(grid, lambda x1, x2: x1 * x2)

print(f"grid {N}x{N}, {grid.size} unknowns")
print(f"{'method':>13} {'alpha':>5} {'m':>4} {'eps2':>12} {'epsinf':>12}")

for name, make in [("gauss_jacobi", gauss_jacobi_coeffs), ("simpson", simpson_coeffs)]:
    for alpha in (0.25, 0.5, 0.75):
        exact = apply_power(phi, -alpha)
        for m in (50, 100, 200):
            approx = apply_Rm(make(alpha, m), phi)
            diff = approx - exact
            eps2 = norm_l2(diff) / norm_l2(exact)
            epsinf = norm_linf(diff) / norm_linf(exact)
            print(f"{name:>13} {alpha:5.2f} {m:4d} {eps2:12.4e} {epsinf:12.4e}")

# Simpson's error drops about 16x each time m doubles, on any grid.  The
# Gauss-Jacobi error depends on N: its scalar error sits at the top of the
# spectrum, which grows with N (see quadrature_profile.py).
