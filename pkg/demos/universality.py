"""
Is A_0 the same for every measure?
==================================

Fit E_n = (2/pi) log(n+1) + A_0 + A_1/(n+1) + A_2/(n+1)^2 on a ladder of
degrees for an analytic weight and for Lebesgue measure, then compare the
fitted constants with the universal value computed from its integral
representation.

A measure with a point mass on the circle sits outside this picture:
Geronimus(0.3) has constant coefficients, |phi_n(1)|^2 is summable, and the
boundary layer at x = 1 is gone.  Its ladder grows at half the rate.

"""

from opuc_zeros import MeasureSpec, a0_constant, fit_expansion, ladder

ns = [16, 32, 64, 128, 256, 512, 1024]
a0 = a0_constant()
print(f"A_0 = {a0:.12f}")

for spec in (MeasureSpec.lebesgue(), MeasureSpec.bernstein_szego(0.5)):
    fit = fit_expansion(ladder(spec, ns), P=2)
    print(f"{spec.spec_id:22s} A_0 = {fit.a[0]:.9f} +- {fit.stderr[0]:.1e}   "
          f"A_1 = {fit.a[1]:+.6f}   max residual {fit.resid_max:.1e}")

geronimus = MeasureSpec.geronimus(0.3)
free = fit_expansion(ladder(geronimus, ns), P=2, fix_slope=False)
print(f"{geronimus.spec_id:22s} free slope = {free.slope:.4f} (2/pi = 0.6366)")
