import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opuc_zeros.measure import (
    MeasureError,
    MeasureSpec,
    levinson,
    moments,
    parse_measure,
    reflect,
    verblunsky,
    weight_at,
)

from .conftest import BS, GERONIMUS, LEBESGUE, TRIG


def test_weight_examples():
    assert weight_at(LEBESGUE, 1.234) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert weight_at(BS, 0.0) == pytest.approx(3 / (2 * math.pi), rel=1e-12)
    assert weight_at(BS, math.pi) == pytest.approx(1 / (6 * math.pi), rel=1e-12)


@pytest.mark.parametrize("spec", [LEBESGUE, BS, TRIG, MeasureSpec.trig_poly([0.3, -0.2, 0.1])])
def test_weight_normalized_and_symmetric(spec):
    theta = 2 * math.pi * np.arange(4096) / 4096
    w = weight_at(spec, theta)
    assert np.all(w > 0)
    assert w.mean() * 2 * math.pi == pytest.approx(1.0, abs=1e-13)
    assert np.allclose(w[1:], w[1:][::-1], rtol=1e-13)


def test_weight_requires_weight_family():
    with pytest.raises(MeasureError):
        weight_at(GERONIMUS, 0.0)
    with pytest.raises(MeasureError):
        weight_at(MeasureSpec.explicit([0.1, 0.2]), 0.0)


def test_moments_examples():
    assert np.array_equal(moments(LEBESGUE, 4).c, [1, 0, 0, 0, 0])
    assert np.allclose(moments(BS, 3).c, [1, 0.5, 0.25, 0.125], atol=1e-13)
    assert np.array_equal(moments(TRIG, 0).c, [1.0])


@pytest.mark.parametrize("spec", [BS, TRIG, MeasureSpec.bernstein_szego(-0.7)])
def test_moments_grid_refinement(spec):
    a = moments(spec, 40, grid_size=1024).c
    b = moments(spec, 40, grid_size=2048).c
    assert np.max(np.abs(a - b)) < 1e-12


@pytest.mark.parametrize("spec", [BS, TRIG, MeasureSpec.trig_poly([0.5, 0.3])])
def test_toeplitz_positive_definite(spec):
    c = moments(spec, 24).c
    T = c[np.abs(np.subtract.outer(np.arange(25), np.arange(25)))]
    assert np.all(np.linalg.eigvalsh(T) > 0)
    assert c[0] == 1.0 and np.all(np.abs(c) <= 1)


def test_verblunsky_examples():
    assert np.array_equal(verblunsky(LEBESGUE, 5).alphas, np.zeros(5))
    assert np.array_equal(verblunsky(GERONIMUS, 3).alphas, [0.3, 0.3, 0.3])
    a = verblunsky(BS, 4).alphas
    assert a[0] == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.abs(a[1:]) < 1e-10)
    assert verblunsky(BS, 4).source == "levinson"


def test_levinson_matches_gram_schmidt():
    # Gram-Schmidt oracle: Phi_m solves the Toeplitz system; alpha_m = -conj(Phi_{m+1}(0))
    c = moments(TRIG, 12).c
    alphas, _ = levinson(c, 10)
    for m in range(1, 11):
        T = c[np.abs(np.subtract.outer(np.arange(m), np.arange(m)))]
        # <Phi_m, z^k> = 0 for k < m with Phi_m monic: T x = -c[m:0:-1] on the low coefficients
        rhs = -np.array([c[m - k] for k in range(m)])
        low = np.linalg.solve(T, rhs)
        assert -low[0] == pytest.approx(alphas[m - 1], abs=1e-12)


def test_trig_decay_negative():
    a = np.abs(verblunsky(MeasureSpec.trig_poly([0.4, 0.2]), 30).alphas)
    keep = a > 1e-14
    m = np.arange(30)[keep]
    slope = np.polyfit(m, np.log(a[keep]), 1)[0]
    assert slope < 0


def test_levinson_rejects_non_measure():
    with pytest.raises(MeasureError):
        levinson([1.0, 1.5, 0.2])


@pytest.mark.parametrize("bad", [1.0, -1.0, 1.5])
def test_invalid_parameters(bad):
    with pytest.raises(MeasureError):
        MeasureSpec.geronimus(bad)
    with pytest.raises(MeasureError):
        MeasureSpec.bernstein_szego(bad)


def test_parse_roundtrip():
    for spec in [LEBESGUE, GERONIMUS, BS, TRIG, MeasureSpec.explicit([0.1, -0.2]),
                 reflect(GERONIMUS), MeasureSpec.trig_poly([0.2, 0.1])]:
        assert parse_measure(spec.spec_id) == spec
    assert parse_measure("bernstein-szego:0.5") == BS
    with pytest.raises(MeasureError):
        parse_measure("cauchy:1")
    with pytest.raises(MeasureError):
        parse_measure("geronimus:abc")


def test_reflect_examples():
    assert reflect(LEBESGUE) == LEBESGUE
    theta = np.linspace(0, 2 * math.pi, 333)
    assert np.allclose(weight_at(reflect(BS), theta),
                       weight_at(MeasureSpec.bernstein_szego(-0.5), theta), rtol=1e-14)
    for spec in [BS, TRIG, GERONIMUS, MeasureSpec.explicit([0.2, 0.1, -0.3])]:
        assert reflect(reflect(spec)) == spec


@pytest.mark.parametrize("spec", [BS, TRIG, MeasureSpec.trig_poly([0.3, -0.2, 0.1])])
def test_reflect_weight_is_shift_by_pi(spec):
    theta = np.linspace(0, 2 * math.pi, 257)
    assert np.allclose(weight_at(reflect(spec), theta), weight_at(spec, theta + math.pi), rtol=1e-13)


@pytest.mark.parametrize("spec", [BS, TRIG, MeasureSpec.trig_poly([0.3, -0.2, 0.1])])
def test_reflect_sign_rule_on_weights(spec):
    # alpha_m(sigma) = (-1)^(m+1) alpha_m(mu), checked through Levinson on the reflected weight
    a = verblunsky(spec, 12).alphas
    b = verblunsky(reflect(spec), 12).alphas
    signs = (-1.0) ** (np.arange(12) + 1)
    assert np.allclose(b, signs * a, atol=1e-13)


@given(st.lists(st.floats(-0.95, 0.95, allow_nan=False), min_size=1, max_size=12))
@settings(max_examples=50, deadline=None)
def test_explicit_padding(alphas):
    spec = MeasureSpec.explicit(alphas)
    seq = verblunsky(spec, 20).alphas
    assert np.array_equal(seq[: len(alphas)], alphas)
    assert np.all(seq[len(alphas):] == 0)
    refl = verblunsky(reflect(spec), 20).alphas
    assert np.allclose(refl, (-1.0) ** (np.arange(20) + 1) * seq)
