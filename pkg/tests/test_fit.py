import json
import math

import numpy as np
import pytest

from opuc_zeros.expect import expect_total
from opuc_zeros.fit import (
    CACHE_ENV,
    KAC_SLOPE,
    ExpansionFit,
    FitError,
    LadderRow,
    default_ladder,
    fit_expansion,
    geometric_ladder,
    ladder,
    universality_report,
)
from opuc_zeros.special import a0_constant

from .conftest import BS, GERONIMUS, LEBESGUE


@pytest.fixture(scope="module")
def lebesgue_ladder(tmp_path_factory):
    path = tmp_path_factory.mktemp("cache") / "results.jsonl"
    return ladder(LEBESGUE, cache=path)


def _synthetic(ns, slope, a, noise=0.0, seed=0):
    n1 = np.asarray(ns, dtype=float) + 1
    y = slope * np.log(n1) + sum(ap * n1 ** (-p) for p, ap in enumerate(a))
    y = y + noise * np.random.default_rng(seed).standard_normal(len(ns))
    return [(n, v, max(noise, 1e-15)) for n, v in zip(ns, y)]


def test_ladder_helpers():
    assert default_ladder() == [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
    assert geometric_ladder(3, 30, 3) == [3, 9, 27]
    with pytest.raises(ValueError):
        ladder(LEBESGUE, [8, 8])
    with pytest.raises(ValueError):
        ladder(LEBESGUE, [])


def test_synthetic_recovery():
    ns = default_ladder()
    fit = fit_expansion(_synthetic(ns, KAC_SLOPE, (0.6, -0.2, 0.1), noise=1e-12), P=2)
    assert np.allclose(fit.a, (0.6, -0.2, 0.1), atol=1e-8, rtol=0)
    assert fit.accepted and fit.resid_max < 1e-10


@pytest.mark.parametrize("fix_slope", [True, False])
@pytest.mark.parametrize("P", [0, 1, 2, 3])
def test_synthetic_recovery_orders(P, fix_slope):
    # small n pins the high inverse powers; from n = 16 the cubic column is
    # only 2e-4, which turns 1e-10 noise into ~1e-6 coefficient error
    ns = geometric_ladder(1, 2**16)
    truth = (0.6, -0.2, 0.1, 0.05)[: P + 1]
    # at P = 3 the least-squares stderr of a[3] under 1e-10 noise is ~1e-8
    # itself, so the 1e-8 bound is checked one decade lower there
    noise = 1e-10 if P < 3 else 1e-11
    fit = fit_expansion(_synthetic(ns, KAC_SLOPE, truth, noise=noise, seed=P), P=P,
                        fix_slope=fix_slope)
    assert abs(fit.slope - KAC_SLOPE) < 1e-8
    assert np.allclose(fit.a, truth, atol=1e-8, rtol=0)


@pytest.mark.parametrize("seed", range(4))
def test_stderr_calibrated_at_cubic_order(seed):
    ns = geometric_ladder(1, 2**16)
    truth = (0.6, -0.2, 0.1, 0.05)
    fit = fit_expansion(_synthetic(ns, KAC_SLOPE, truth, noise=1e-10, seed=seed), P=3)
    z = (np.array(fit.a) - truth) / np.array(fit.stderr)
    assert np.all(np.abs(z) < 5)
    assert max(fit.stderr) < 3e-8


def test_fit_errors():
    rows = _synthetic([16, 32, 64, 128], KAC_SLOPE, (0.6,))
    with pytest.raises(FitError):
        fit_expansion(rows, P=2)
    with pytest.raises(FitError):
        fit_expansion(rows * 3, P=5)
    close = _synthetic(range(1000, 1008), KAC_SLOPE, (0.6, 0.1, 0.1, 0.1, 0.1))
    with pytest.raises(FitError, match="condition number"):
        fit_expansion(close, P=4)


def test_cache_passthrough(tmp_path):
    path = tmp_path / "r.jsonl"
    (row,) = ladder(LEBESGUE, [15], cache=path)
    assert row.value == expect_total(LEBESGUE, 15).value
    lines = path.read_text().splitlines()
    rec = json.loads(lines[0])
    assert set(rec) >= {"spec_id", "n", "tol", "value", "err", "timestamp"}
    (again,) = ladder(LEBESGUE, [15], cache=path)
    assert again == row
    assert len(path.read_text().splitlines()) == 1
    # a different tolerance is a different key
    ladder(LEBESGUE, [15], tol=1e-9, cache=path)
    assert len(path.read_text().splitlines()) == 2


def test_cache_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "env.jsonl"
    monkeypatch.setenv(CACHE_ENV, str(path))
    ladder(LEBESGUE, [3, 5])
    assert len(path.read_text().splitlines()) == 2


def test_cache_tolerates_torn_lines(tmp_path):
    path = tmp_path / "r.jsonl"
    ladder(BS, [7], cache=path)
    with path.open("a") as fh:
        fh.write('{"spec_id": "bernstein')
    (row,) = ladder(BS, [7], cache=path)
    assert row.value == expect_total(BS, 7).value


def test_lebesgue_fit(lebesgue_ladder):
    fit = fit_expansion(lebesgue_ladder, P=2, spec_id="lebesgue")
    assert abs(fit.a[0] - a0_constant()) < 1e-3
    assert fit.accepted and fit.cond < 1e3
    free = fit_expansion(lebesgue_ladder, P=2, fix_slope=False)
    assert abs(free.slope - KAC_SLOPE) < 1e-3


def test_residuals_decay_with_order(lebesgue_ladder):
    resid = [fit_expansion(lebesgue_ladder, P=p).resid_max for p in (0, 1, 2)]
    assert resid[0] > resid[1] > resid[2]


def test_a0_stable_when_dropping_small_n(lebesgue_ladder):
    full = fit_expansion(lebesgue_ladder, P=2).a[0]
    trimmed = fit_expansion(lebesgue_ladder[2:], P=2).a[0]
    assert abs(full - trimmed) < 5e-4


def test_geronimus_ladder_increasing():
    rows = ladder(GERONIMUS, [16, 64, 256, 1024])
    assert all(b.value > a.value for a, b in zip(rows, rows[1:]))


def test_fit_json_roundtrip(lebesgue_ladder):
    fit = fit_expansion(lebesgue_ladder, P=2, spec_id="lebesgue")
    back = ExpansionFit.from_json(fit.to_json())
    assert back == fit
    assert back.predict(100) == pytest.approx(fit.predict(100), rel=1e-15)
    assert fit.order == 2


def test_ladder_rows_accept_pairs():
    pairs = [(n, v) for n, v, _ in _synthetic(default_ladder(), KAC_SLOPE, (0.5, 0.2))]
    assert fit_expansion(pairs, P=1).a == pytest.approx((0.5, 0.2), abs=1e-10)
    assert isinstance(LadderRow(1, 1.0, 0.0), tuple)


def test_universality_report_preconditions():
    with pytest.raises(ValueError):
        universality_report([LEBESGUE])


def test_universality_report_analytic_pair():
    ns = default_ladder()[:7]
    rep = universality_report([LEBESGUE, BS], ns=ns, P=2)
    assert set(rep.fits) == {"lebesgue", "bernstein-szego:0.5"}
    assert rep.max_delta < 2e-3
    assert all(abs(d) < 1e-3 for d in rep.slope_deviation().values())
    assert len(rep.rows()) == 2
    assert math.isfinite(rep.rows()[0]["a0"])
