import numpy as np
import pytest

from opuc_zeros.measure import MeasureSpec

LEBESGUE = MeasureSpec.lebesgue()
GERONIMUS = MeasureSpec.geronimus(0.3)
BS = MeasureSpec.bernstein_szego(0.5)
TRIG = MeasureSpec.trig_poly([0.2])

TEST_MEASURES = [LEBESGUE, GERONIMUS, BS, TRIG]


@pytest.fixture(params=TEST_MEASURES, ids=lambda s: s.spec_id)
def any_spec(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# (number, title, passed, seconds, detail) from tests/test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, title, passed, seconds, detail in sorted(ACCEPTANCE):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {k:>2}. {title} ({seconds:.2f} s): {detail}")
