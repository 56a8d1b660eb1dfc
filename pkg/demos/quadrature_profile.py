# How well does r_m(lam) = sum a_i / (b_i + lam) approximate lam^(-beta)?
#
# The grid operator's spectrum lies in [delta, lambda_max], so the worst
# scalar error over that interval bounds the matrix error in the l2 norm.

import numpy as np

from fracsplit import (GridSpec, delta_lower_bound, gauss_jacobi_coeffs, lambda_max,
                       scalar_error_profile, simpson_coeffs)

grid = GridSpec.square(256)
lo, hi = delta_lower_bound(grid), lambda_max(grid)
print(f"spectral interval of the 256x256 operator: [{lo:.6f}, {hi:.6e}]")

for beta in (0.25, 0.5, 0.75):
    for m in (50, 100, 200):
        gj, _ = scalar_error_profile(gauss_jacobi_coeffs(beta, m), lo, hi, 5000)
        sp, _ = scalar_error_profile(simpson_coeffs(beta, m), lo, hi, 5000)
        print(f"beta={beta:4.2f} m={m:3d}  gauss_jacobi {gj:9.3e}  simpson {sp:9.3e}")

# Where on the spectrum does the error live?
_, table = scalar_error_profile(gauss_jacobi_coeffs(0.5, 50), lo, hi, 9)
print("\ngauss_jacobi beta=0.5 m=50")
print("      lambda        r_m      exact  rel_error")
for lam, rm, exact, rel in table:
    print(f"{lam:12.4e} {rm:10.4e} {exact:10.4e} {rel:10.2e}")

# Accurate at the bottom of the spectrum, poor at the top.  The stationary
# errors stay far smaller than these numbers because x1 x2 has little weight
# on the high eigenmodes.
assert np.all(np.diff(table[2:, 3]) > 0)
