"""Vectorized one-dimensional quadrature.

The integrands in this package are expensive per call (a recursion of length
``n`` runs for every node) but cheap per node once vectorized, so every rule
here evaluates all of its nodes in a single call ``func(x_array)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureError",
    "QuadResult",
    "adaptive_gk",
    "fixed_gauss_legendre",
]

# 7-point Gauss / 15-point Kronrod pair on [-1, 1] (QUADPACK qk15 tables).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod abscissae.
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class QuadratureError(RuntimeError):
    """Raised when an integral fails to converge within its budget.

    The partial value and the error estimate reached are attached so callers
    can still report them.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(f"{message} (value={value!r}, error estimate={error:.3e})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_intervals: int = 0
    n_evals: int = 0


def _gk15(func, a, b):
    """Apply the G7/K15 pair to every interval ``[a[i], b[i]]`` at once."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(func(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ _KWEIGHTS)
    gauss = half * (fx @ _GWEIGHTS)
    mean = kron / np.where(half != 0, 2 * half, 1.0)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _KWEIGHTS)
    resabs = np.abs(half) * (np.abs(fx) @ _KWEIGHTS)
    err = np.abs(kron - gauss)
    # QUADPACK's error scaling: sharpen |K - G| for smooth integrands.
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    roundoff = 50.0 * np.finfo(float).eps * resabs
    err = np.where(roundoff > err, roundoff, err)
    if not np.all(np.isfinite(kron)):
        raise QuadratureError("integrand returned non-finite values")
    return kron, err


def adaptive_gk(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    tol: float = 1e-12,
    rtol: float = 0.0,
    breakpoints: Sequence[float] | None = None,
    initial_panels: int = 1,
    max_intervals: int = 20000,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod integration of a vectorized ``func``.

    Parameters
    ----------
    func : callable
        Maps a 1-D array of abscissae to the integrand values.
    a, b : float
        Finite integration limits.
    tol, rtol : float
        Stop when the summed error estimate is at most ``max(tol, rtol*|I|)``.
    breakpoints : sequence of float, optional
        Interior points that are always interval endpoints.
    initial_panels : int
        Each breakpoint-delimited piece is first cut into this many equal
        panels, which keeps narrow features from slipping between nodes.
    max_intervals : int
        Subdivision budget; exceeding it raises :class:`QuadratureError`.

    Notes
    -----
    The rule is open, so the endpoints themselves are never evaluated.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a == b:
        return QuadResult(0.0, 0.0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = [a]
    for p in sorted(breakpoints or ()):
        if a < p < b:
            edges.append(float(p))
    edges.append(b)
    lo, hi = [], []
    for e0, e1 in zip(edges[:-1], edges[1:]):
        cuts = np.linspace(e0, e1, int(initial_panels) + 1)
        lo.extend(cuts[:-1])
        hi.extend(cuts[1:])
    lo = np.array(lo)
    hi = np.array(hi)
    val, err = _gk15(func, lo, hi)
    n_evals = 15 * len(lo)

    while True:
        total = val.sum()
        total_err = err.sum()
        goal = max(tol, rtol * abs(total))
        if total_err <= goal:
            break
        if len(lo) >= max_intervals:
            raise QuadratureError(
                "adaptive quadrature hit its subdivision budget",
                sign * float(total), float(total_err),
            )
        # Split intervals carrying more than their share of the allowed error,
        # always including the worst one.
        share = goal / len(lo)
        split = err > share
        split[np.argmax(err)] = True
        width = hi - lo
        too_narrow = width <= 4 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        split &= ~too_narrow
        if not split.any():
            # Nothing left that can be refined: accept the roundoff floor.
            break
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_val, new_err = _gk15(func, new_lo, new_hi)
        n_evals += 15 * len(new_lo)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])

    return QuadResult(sign * float(val.sum()), float(err.sum()), len(lo), n_evals)


def fixed_gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    edges: Sequence[float],
    order: int = 48,
) -> float:
    """Composite Gauss-Legendre rule with ``order`` nodes per panel.

    No error estimate; this is the non-adaptive companion to
    :func:`adaptive_gk` used for cross-checks.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    fx = np.asarray(func(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return float(np.sum(half * (fx @ w)))
