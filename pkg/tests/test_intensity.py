import math

import numpy as np
import pytest

from opuc_zeros.intensity import (
    DensityGrid,
    density_grid,
    h_fun,
    one_minus_h2,
    rho_blaschke,
    rho_kernel,
)
from opuc_zeros.opuc import OpucBasis

from .conftest import GERONIMUS, LEBESGUE, TEST_MEASURES


def _basis(spec, n=60):
    return OpucBasis.from_spec(spec, n)


def kac_h(n, x):
    return (n + 1) * x**n * (1 - x**2) / (1 - x ** (2 * n + 2))


def test_lebesgue_degree_one_values():
    leb = _basis(LEBESGUE)
    assert rho_blaschke(leb, 1, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert rho_kernel(leb, 1, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert h_fun(leb, 1, 0.5) == pytest.approx(0.8, abs=1e-15)
    for x in (1 - 1e-12, 1.0, -1.0, -(1 - 1e-12)):
        assert rho_blaschke(leb, 1, x) == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    x = np.linspace(-5, 5, 201)
    assert np.allclose(rho_blaschke(leb, 1, x), (1 / math.pi) / (1 + x**2), rtol=0, atol=1e-12)


def test_density_grid_example():
    grid = density_grid(_basis(LEBESGUE), 1, [-0.5, 0.0, 0.5])
    want = np.array([1 / (1.25 * math.pi), 1 / math.pi, 1 / (1.25 * math.pi)])
    assert np.allclose(grid.rho, want, atol=1e-15)
    assert grid.method == "blaschke" and grid.n == 1 and grid.spec_id == "lebesgue"
    empty = density_grid(_basis(LEBESGUE), 1, [])
    assert empty.xs.size == 0 and empty.rho.size == 0


@pytest.mark.parametrize("n", [1, 2, 7, 30, 100])
def test_kac_closed_form(n):
    basis = _basis(LEBESGUE, n + 1)
    x = np.concatenate([np.linspace(-0.99, 0.99, 199), [0.3, -0.7]])
    x = x[x != 0] if n > 1 else x
    h = h_fun(basis, n, x)
    assert np.allclose(h, kac_h(n, x), rtol=1e-12, atol=0)


def test_kac_three_kernel():
    # closed-form Kac integrand at n = 3
    x = 0.5
    k = sum(x ** (2 * i) for i in range(4))
    k10 = sum(i * x ** (2 * i - 1) for i in range(1, 4))
    k11 = sum(i * i * x ** (2 * i - 2) for i in range(1, 4))
    want = math.sqrt(k * k11 - k10**2) / (math.pi * k)
    basis = _basis(LEBESGUE, 4)
    assert rho_kernel(basis, 3, x) == pytest.approx(want, rel=1e-14)
    assert rho_blaschke(basis, 3, x) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("spec", TEST_MEASURES, ids=lambda s: s.spec_id)
@pytest.mark.parametrize("n", [5, 20, 50])
def test_kernel_matches_blaschke(spec, n):
    basis = _basis(spec, n + 1)
    x = np.linspace(-0.999, 0.999, 200)
    kern = density_grid(basis, n, x, method="kernel")
    blas = density_grid(basis, n, x, method="blaschke")
    assert kern.clamped == 0
    assert np.max(np.abs(kern.rho - blas.rho) / blas.rho) < 1e-8


def test_symmetry_under_inversion():
    basis = _basis(GERONIMUS, 13)
    assert h_fun(basis, 12, 0.8) == pytest.approx(h_fun(basis, 12, 1 / 0.8), abs=1e-9)
    assert h_fun(basis, 12, -0.8) == pytest.approx(h_fun(basis, 12, -1 / 0.8), abs=1e-9)


def test_lebesgue_even_symmetry():
    basis = _basis(LEBESGUE, 40)
    x = np.linspace(0, 3, 301)
    for n in (4, 9, 33):
        assert np.array_equal(rho_blaschke(basis, n, x), rho_blaschke(basis, n, -x))


@pytest.mark.parametrize("spec", TEST_MEASURES, ids=lambda s: s.spec_id)
def test_h_bounds_and_boundary(spec):
    basis = _basis(spec, 65)
    x = np.concatenate([np.linspace(-4, 4, 801), [1 - 1e-15, -1 + 1e-15]])
    for n in (1, 8, 64):
        h = h_fun(basis, n, x)
        omh2 = one_minus_h2(basis, n, x)
        assert np.all(np.abs(h) <= 1 + 1e-12)
        assert np.all((omh2 >= 0) & (omh2 <= 1 + 1e-12))
        assert abs(h_fun(basis, n, 1.0)) == 1.0
        assert abs(h_fun(basis, n, -1.0)) == 1.0
        rho = rho_blaschke(basis, n, x)
        assert np.all(np.isfinite(rho)) and np.all(rho >= 0)


def test_interior_kernel_has_no_clamps():
    for spec in TEST_MEASURES:
        for n in (10, 100, 256):
            basis = _basis(spec, n + 1)
            edge = 1 - 10 / (n + 1)
            grid = density_grid(basis, n, np.linspace(-edge, edge, 101), method="kernel")
            assert grid.clamped == 0


def test_boundary_limit_continuity():
    # the filled-in value at x = 1 matches the approach from inside
    for spec in TEST_MEASURES:
        basis = _basis(spec, 33)
        edge = rho_blaschke(basis, 32, 1.0)
        near = rho_blaschke(basis, 32, 1 - 1e-9)
        assert edge == pytest.approx(near, rel=1e-6)


def test_csv_roundtrip():
    grid = density_grid(_basis(GERONIMUS, 10), 9, np.linspace(-2, 2, 17))
    text = grid.to_csv()
    assert text.splitlines()[0] == "x,rho,method,n"
    back = DensityGrid.from_csv(text, grid.spec_id)
    assert np.array_equal(back.xs, grid.xs) and np.array_equal(back.rho, grid.rho)
    assert back.n == 9 and back.method == "blaschke"


def test_errors():
    basis = _basis(LEBESGUE, 300)
    with pytest.raises(ValueError):
        rho_kernel(basis, 257, 0.2)
    with pytest.raises(ValueError):
        density_grid(basis, 3, [0.5, 0.1])
    with pytest.raises(ValueError):
        density_grid(basis, 3, [0.1], method="nope")
    with pytest.raises(ValueError):
        rho_blaschke(basis, 3, float("nan"))
    with pytest.raises(ValueError):
        h_fun(_basis(LEBESGUE, 3), 10, 0.5)
