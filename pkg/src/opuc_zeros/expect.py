"""Expected number of real zeros by quadrature of the intensity.

``E_n(mu) = Ehat_n(mu) + Ehat_n(sigma)`` where ``sigma`` is ``mu`` reflected
through ``z -> -z`` and::

    Ehat_n(nu) = (2/pi) int_0^1 sqrt(1 - h_{n+1}(x; nu)^2) / (1 - x^2) dx

The integral is taken in ``s = log(1 - x)``, which turns the boundary layer
``x = 1 - t/(n+1)`` into a smooth, exponentially decaying tail and the bulk
``1/(1 - x^2)`` growth into a plateau of length ``log(n+1)``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .measure import MeasureSpec, reflect
from .opuc import OpucBasis, angle_recursion
from .quadrature import QuadResult, adaptive_gk

__all__ = [
    "S_FLOOR",
    "ExpectationResult",
    "default_tol",
    "half_integrand",
    "expect_half",
    "expect_total",
    "expect_many",
]

log = logging.getLogger(__name__)

# exp(S_FLOOR) is the smallest positive double; below it x == 1 exactly.
S_FLOOR = -745.0
PANEL_WIDTH = 8.0


def default_tol(n: int) -> float:
    return 1e-10 if n <= 2**12 else 1e-8


@dataclass(frozen=True)
class ExpectationResult:
    n: int
    value: float
    err_est: float
    spec_id: str
    half_values: tuple[float, float]

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "value": self.value,
            "err_est": self.err_est,
            "half1": self.half_values[0],
            "half2": self.half_values[1],
        }


def half_integrand(alphas, n: int):
    """Integrand of ``Ehat_n`` as a function of ``s = log(1 - x)``."""
    alphas = np.asarray(alphas, dtype=float)[: n + 1]
    two_over_pi = 2.0 / math.pi

    def func(s):
        s = np.asarray(s, dtype=float)
        d = np.exp(s)
        big_x = 0.5 * (np.log(2.0 - d) - s)
        D, E, _, _ = angle_recursion(alphas, n, big_x)
        return two_over_pi * np.sqrt(D * E) / (2.0 - d)

    return func


def boundary_log_slope(alphas, n: int) -> float:
    """``log b_{n+1}'(1)`` from ``b'_{m+1}(1) = (1+a_m)/(1-a_m) (1 + b'_m(1))``.

    ``1/b'(1)`` is the smallest length scale on which ``h`` can vary next to
    ``x = 1``; it is ``~ 1/n`` for analytic weights but exponentially small
    when the measure has a point mass at 1.
    """
    alphas = np.asarray(alphas, dtype=float)[: n + 1]
    log_q = np.log1p(alphas) - np.log1p(-alphas)
    ell = -np.inf
    for lq in log_q:
        ell = lq + np.logaddexp(0.0, ell)
    return float(ell)


def _half(alphas, n, tol, s_floor=None) -> QuadResult:
    func = half_integrand(alphas, n)
    if s_floor is None:
        s_floor = min(S_FLOOR, -(boundary_log_slope(alphas, n) + 40.0))
    s_split = -math.log(n + 1)
    layer_panels = max(1, math.ceil((s_split - s_floor) / PANEL_WIDTH))
    bulk = adaptive_gk(func, s_split, 0.0, tol=tol / 2, initial_panels=2)
    layer = adaptive_gk(func, s_floor, s_split, tol=tol / 2, initial_panels=layer_panels)
    # Below s_floor the integrand is bounded by its value at the floor.
    tail = float(func(np.array([s_floor]))[0])
    return QuadResult(bulk.value + layer.value, bulk.error + layer.error + tail,
                      bulk.n_intervals + layer.n_intervals, bulk.n_evals + layer.n_evals)


def expect_half(spec: MeasureSpec, n: int, tol: float | None = None) -> QuadResult:
    """``Ehat_n(spec)`` with an error estimate."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    tol = default_tol(n) if tol is None else float(tol)
    if tol < 1e-12:
        raise ValueError("tol must be at least 1e-12")
    basis = OpucBasis.from_spec(spec, n)
    return _half(basis.alphas, n, tol)


def expect_total(spec: MeasureSpec, n: int, tol: float | None = None) -> ExpectationResult:
    """``E_n(spec)`` as the sum of the two half-line contributions."""
    n = int(n)
    tol = default_tol(n) if tol is None else float(tol)
    first = expect_half(spec, n, tol / 2)
    second = expect_half(reflect(spec), n, tol / 2)
    value = first.value + second.value
    lower = (2 / math.pi) * math.log(n + 1) - 2
    if n >= 4 and value < lower:
        log.warning("E_%d(%s) = %.6g is below the sanity envelope %.6g", n, spec, value, lower)
    return ExpectationResult(n, value, first.error + second.error, spec.spec_id,
                             (first.value, second.value))


def expect_many(spec: MeasureSpec, ns, tol: float | None = None, workers: int | None = None):
    """``expect_total`` over several degrees; results come back in input order."""
    ns = [int(n) for n in ns]
    if workers is None or workers <= 1:
        results = [expect_total(spec, n, tol) for n in ns]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda n: expect_total(spec, n, tol), ns))
    values = [r.value for r in results]
    if any(b <= a for a, b in zip(values, values[1:])):
        log.warning("E_n(%s) is not increasing along %s", spec, ns)
    return results

