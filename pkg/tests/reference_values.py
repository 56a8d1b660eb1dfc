"""Reference stationary accuracy values on the 256^2 grid."""

# Stationary accuracy tables for A^alpha v = x1 x2 on the 256^2 grid:
# {alpha: (eps2 for m = 50, 100, 200), (epsinf for m = 50, 100, 200)}
TABLE_GAUSS_JACOBI = {
    0.25: ((7.078046e-03, 1.903738e-03, 2.231284e-04), (9.264885e-02, 3.370878e-02, 4.947108e-03)),
    0.5: ((1.057186e-03, 2.550164e-04, 3.030576e-05), (1.142293e-02, 4.200140e-03, 6.576673e-04)),
    0.75: ((1.047861e-04, 2.028716e-05, 2.169714e-06), (9.453449e-04, 3.028348e-04, 4.497895e-05)),
}
TABLE_SIMPSON = {
    0.25: ((3.444934e-07, 2.380002e-08, 1.539020e-09), (5.568729e-07, 2.234692e-08, 1.443448e-09)),
    0.5: ((9.686650e-08, 6.073046e-09, 3.799713e-10), (9.506237e-08, 5.990690e-09, 3.748065e-10)),
    0.75: ((2.433874e-08, 1.493598e-09, 9.359871e-11), (5.835720e-08, 1.491888e-09, 9.344940e-11)),
}

M_VALUES = (50, 100, 200)
