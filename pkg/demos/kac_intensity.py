"""
Real zeros of the Kac polynomial
================================

With all Verblunsky coefficients zero the orthonormal polynomials are the
monomials, and sum eta_k z^k is Kac's random polynomial.  Its real-zero
intensity piles up next to x = +-1, and the expected count grows like
(2/pi) log(n+1).

"""

import math

import numpy as np

from opuc_zeros import MeasureSpec, OpucBasis, density_grid, expect_total

lebesgue = MeasureSpec.lebesgue()
basis = OpucBasis.from_spec(lebesgue, 64)

# Intensity for n = 64 on a coarse grid; note the two peaks of height ~ n/(2 pi sqrt 3)
xs = np.array([-1.0, -0.99, -0.9, -0.5, 0.0, 0.5, 0.9, 0.99, 1.0])
grid = density_grid(basis, 64, xs)
for x, r in zip(grid.xs, grid.rho):
    print(f"x = {x:+.2f}   rho = {r:.5f}")

# Expected number of real zeros against the two leading terms
for n in (1, 4, 16, 64, 256):
    value = expect_total(lebesgue, n).value
    print(f"n = {n:4d}   E_n = {value:.8f}   (2/pi) log(n+1) = {2 / math.pi * math.log(n + 1):.8f}")
