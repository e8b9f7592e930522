"""The universal profile ``f(t) = sqrt(1 - t^2 csch^2 t)`` and its constants.

``A_0`` is the measure-independent constant term in the expansion of the
expected number of real zeros; ``H_p`` are the moments of ``1 - f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .quadrature import QuadResult, adaptive_gk, fixed_gauss_legendre

__all__ = [
    "T_SWITCH",
    "P_MAX",
    "UniversalConstants",
    "tcsch2",
    "one_minus_tcsch2",
    "f_of_t",
    "one_minus_f",
    "f_over_t",
    "a0_estimate",
    "a0_constant",
    "h_estimate",
    "h_constant",
    "universal_constants",
]

T_SWITCH = 1e-2
P_MAX = 8
TAIL_THRESHOLD = 1e-16

# 1 - t^2 csch^2 t = t^2/3 - t^4/15 + 2 t^6/189 - t^8/675 + O(t^10)
_SERIES = (1.0 / 3.0, -1.0 / 15.0, 2.0 / 189.0, -1.0 / 675.0)


def _as_t(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise ValueError("t must be finite and nonnegative")
    return t


def _sinh_minus_id(t):
    # sinh t - t by its Taylor series; used for t < 1 only.
    term = t**3 / 6.0
    total = term.copy()
    t2 = t * t
    for k in range(2, 11):
        term = term * t2 / ((2 * k) * (2 * k + 1))
        total += term
    return total


def tcsch2(t):
    """``t^2 csch^2 t`` without overflow; equals 1 at ``t = 0``."""
    t = _as_t(t)
    out = np.ones_like(t)
    small = (t > 0) & (t < 1)
    ts = t[small]
    out[small] = (ts / np.sinh(ts)) ** 2
    big = t >= 1
    tb = t[big]
    out[big] = 4.0 * tb**2 * np.exp(-2.0 * tb) / np.expm1(-2.0 * tb) ** 2
    return out if out.ndim else float(out)


def one_minus_tcsch2(t, t_switch=T_SWITCH):
    """``1 - t^2 csch^2 t`` accurate down to ``t = 0``."""
    t = _as_t(t)
    out = np.empty_like(t)
    s = t < t_switch
    t2 = t[s] ** 2
    c0, c1, c2, c3 = _SERIES
    out[s] = t2 * (c0 + t2 * (c1 + t2 * (c2 + t2 * c3)))
    m = (~s) & (t < 1)
    tm = t[m]
    sh = np.sinh(tm)
    out[m] = _sinh_minus_id(tm) * (sh + tm) / sh**2
    b = t >= 1
    out[b] = 1.0 - tcsch2(t[b])
    return out if out.ndim else float(out)


def f_of_t(t, t_switch=T_SWITCH):
    """The profile ``f(t) = sqrt(1 - t^2 csch^2 t)``, with ``f(0) = 0``."""
    return np.sqrt(one_minus_tcsch2(t, t_switch))


def one_minus_f(t, t_switch=T_SWITCH):
    """``1 - f(t)`` computed as ``g / (1 + f)`` so the tail keeps its digits."""
    t = _as_t(t)
    return tcsch2(t) / (1.0 + f_of_t(t, t_switch))


def f_over_t(t, t_switch=T_SWITCH):
    """``f(t)/t``, continuously extended by ``1/sqrt(3)`` at zero."""
    t = _as_t(t)
    out = np.empty_like(t)
    s = t < t_switch
    t2 = t[s] ** 2
    c0, c1, c2, c3 = _SERIES
    out[s] = np.sqrt(c0 + t2 * (c1 + t2 * (c2 + t2 * c3)))
    out[~s] = f_of_t(t[~s], t_switch) / t[~s]
    return out if out.ndim else float(out)


def _tail_cutoff(power: int = 0, threshold: float = TAIL_THRESHOLD) -> float:
    # Smallest T with t^power * (1 - f(t)) < threshold beyond it; uses the
    # bound 1 - f <= t^2 csch^2 t.
    def excess(t):
        return math.log(tcsch2(t)) + power * math.log(t) - math.log(threshold)

    return float(brentq(excess, 1.0, 200.0 + 10 * power))


def a0_estimate(
    *,
    split: float = 1.0,
    tail_cutoff: float | None = None,
    tol: float = 1e-12,
    method: str = "adaptive",
) -> QuadResult:
    """Evaluate ``A_0`` with an error estimate.

    ``A_0 = (2/pi) (log 2 - log c + int_0^c f/t + int_c^inf (f - 1)/t)`` for
    any splitting point ``c > 0``; ``c = 1`` is the textbook form.

    ``method="adaptive"`` uses adaptive Gauss-Kronrod; ``method="fixed"``
    uses a composite 48-point Gauss-Legendre rule on unit panels and reports
    the difference between 48 and 32 points as its error.
    """
    if split <= 0:
        raise ValueError("split must be positive")
    upper = _tail_cutoff() if tail_cutoff is None else float(tail_cutoff)
    if upper <= split:
        raise ValueError("tail_cutoff must exceed split")

    def inner(t):
        return f_over_t(t)

    def outer(t):
        return -one_minus_f(t) / t

    if method == "adaptive":
        r1 = adaptive_gk(inner, 0.0, split, tol=tol / 4)
        r2 = adaptive_gk(outer, split, upper, tol=tol / 4, initial_panels=8)
        total = r1.value + r2.value
        err = r1.error + r2.error
    elif method == "fixed":
        inner_edges = np.linspace(0.0, split, max(2, math.ceil(split)) + 1)
        outer_edges = np.linspace(split, upper, math.ceil(upper - split) + 1)
        vals = []
        for order in (32, 48):
            vals.append(
                fixed_gauss_legendre(inner, inner_edges, order)
                + fixed_gauss_legendre(outer, outer_edges, order)
            )
        total = vals[1]
        err = abs(vals[1] - vals[0])
    else:
        raise ValueError(f"unknown method {method!r}")
    # The truncated tail is below TAIL_THRESHOLD * log-ish growth; count it.
    tail = float(one_minus_f(upper))
    value = (2.0 / math.pi) * (math.log(2.0) - math.log(split) + total)
    return QuadResult(value, (2.0 / math.pi) * (err + tail))


@lru_cache(maxsize=None)
def a0_constant() -> float:
    """The universal constant ``A_0`` (adaptive quadrature, tol 1e-12)."""
    return a0_estimate().value


def h_estimate(
    p: int, *, tol: float = 1e-12, rtol: float = 1e-13, p_max: int = P_MAX
) -> QuadResult:
    """``H_p = 1/(2^(p-1) pi) int_0^inf (1 - f(t)) t^(p-1) dt`` with error."""
    p = int(p)
    if not 1 <= p <= p_max:
        raise ValueError(f"p must be in 1..{p_max}")
    upper = _tail_cutoff(power=p - 1, threshold=1e-18)

    def integrand(t):
        return one_minus_f(t) * t ** (p - 1)

    r = adaptive_gk(integrand, 0.0, upper, tol=tol, rtol=rtol, initial_panels=16)
    scale = 1.0 / (2.0 ** (p - 1) * math.pi)
    return QuadResult(scale * r.value, scale * r.error, r.n_intervals, r.n_evals)


@lru_cache(maxsize=None)
def h_constant(p: int) -> float:
    """``H_p`` for ``1 <= p <= P_MAX``."""
    return h_estimate(p).value


@dataclass(frozen=True)
class UniversalConstants:
    a0: float
    h: tuple[float, ...]
    p_max: int = P_MAX


def universal_constants(p_max: int = P_MAX) -> UniversalConstants:
    return UniversalConstants(
        a0_constant(),
        tuple(h_estimate(p, p_max=p_max).value for p in range(1, p_max + 1)),
        p_max,
    )
