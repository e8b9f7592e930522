"""
Counting roots by hand
======================

Draw Gaussian coefficient vectors in the orthonormal basis of
Bernstein-Szego(0.5), count real roots with a comrade-matrix eigensolver, and
compare the sample mean with the quadrature value.

"""

from opuc_zeros import McConfig, MeasureSpec, expect_total, run_mc

spec = MeasureSpec.bernstein_szego(0.5)
n = 32

stats = run_mc(spec, McConfig(n, 4000, seed=7))
exact = expect_total(spec, n).value
print(f"sample mean {stats.mean:.4f} +- {stats.stderr:.4f}, quadrature {exact:.6f}")
print(f"z-score {(stats.mean - exact) / stats.stderr:+.2f}")

# Real-root counts of a degree-32 polynomial share its parity
for count, freq in stats.histogram.items():
    print(f"{count:3d} {'#' * (freq // 40)}")
