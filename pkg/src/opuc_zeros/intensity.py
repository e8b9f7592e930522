"""Real-zero intensity of Gaussian random OPUC polynomials.

Two routes to the same density::

    kernel:    rho = (1/pi) sqrt(K K11 - K10^2) / K
    blaschke:  rho = (1/pi) sqrt(1 - h^2) / |1 - x^2|,
               h = (1 - x^2) b' / (1 - b^2),  b = phi_{n+1} / phi_{n+1}^*
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .opuc import OpucBasis, angle_recursion, cd_kernels

__all__ = [
    "DensityGrid",
    "reflected_alphas",
    "h_fun",
    "one_minus_h2",
    "boundary_quadratic",
    "rho_blaschke",
    "rho_kernel",
    "density_grid",
]

log = logging.getLogger(__name__)

N_KERNEL_MAX = 256
CLAMP_TOL = 1e-9
# Relative offsets (times 1/(n+1)) used to extrapolate (1 - h^2)/(1 - |x|)^2
# to |x| = 1.
BOUNDARY_OFFSETS = (1e-6, 2e-6)


def reflected_alphas(alphas):
    """Coefficients of the measure reflected through ``z -> -z``."""
    alphas = np.asarray(alphas, dtype=float)
    return alphas * (-1.0) ** (np.arange(len(alphas)) + 1)


def _fold(x):
    """Map real ``x`` to ``y`` in ``[0, 1]`` plus the distance ``1 - y``.

    Uses ``h(x) = h(1/x)`` and the reflection ``h(x; mu) = (-1)^n h(-x; sigma)``.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    ax = np.abs(x)
    outside = ax > 1
    y = np.where(outside, 1.0 / np.where(outside, ax, 1.0), ax)
    d = 1.0 - y
    return x, y, d


def _angle_from_distance(y, d):
    with np.errstate(divide="ignore"):
        return np.where(y < 0.5, np.arctanh(np.minimum(y, 0.5)), 0.5 * np.log((2.0 - d) / d))


def _split_eval(basis: OpucBasis, n: int, x):
    """Run the angle recursion on each sign class of ``x`` (``|x| < 1``)."""
    x, y, d = _fold(x)
    interior = d > 0
    X = _angle_from_distance(y, np.where(interior, d, 1.0))
    D = np.zeros_like(y)
    E = np.full_like(y, 2.0)
    H = np.ones_like(y)
    for negative, alphas in ((False, basis.alphas), (True, None)):
        mask = interior & ((x < 0) == negative)
        if not mask.any():
            continue
        if negative:
            alphas = reflected_alphas(basis.alphas[: n + 1])
        d_, e_, h_, _ = angle_recursion(alphas, n, X[mask])
        D[mask], E[mask], H[mask] = d_, e_, h_
    H = np.where(x < 0, (-1.0) ** n * H, H)
    return x, y, d, D, E, H


def h_fun(basis: OpucBasis, n: int, x):
    """``h_{n+1}(x)`` on the whole real line; ``|h(+-1)| = 1``."""
    n = int(n)
    basis._check(n + 1)
    x, _, _, _, _, H = _split_eval(basis, n, x)
    return H if H.ndim else float(H)


def boundary_quadratic(basis: OpucBasis, n: int, side: int = 1, offsets=BOUNDARY_OFFSETS) -> float:
    """Limit of ``(1 - h^2) / (1 - |x|)^2`` as ``x -> side``.

    ``h`` has a double contact with ``+-1`` at ``x = +-1``; the limit is
    Richardson-extrapolated from two offsets scaled by ``1/(n+1)``.
    """
    nominal = np.array(offsets, dtype=float) / (n + 1)
    xs = side * (1.0 - nominal)
    # the distances actually represented, not the nominal ones (off by ~eps/d)
    d1, d2 = 1.0 - np.abs(xs)
    q = one_minus_h2(basis, n, xs, _exact_boundary=False) / np.array([d1, d2]) ** 2
    ratio = d2 / d1
    return float((ratio * q[0] - q[1]) / (ratio - 1.0))


def one_minus_h2(basis: OpucBasis, n: int, x, *, _exact_boundary=True):
    """``1 - h_{n+1}(x)^2 >= 0`` computed as ``(1 - h)(1 + h)``."""
    n = int(n)
    basis._check(n + 1)
    x, _, d, D, E, _ = _split_eval(basis, n, x)
    out = D * E
    if _exact_boundary and np.any(d == 0):
        out = np.where(d == 0, 0.0, out)
    return out if out.ndim else float(out)


def rho_blaschke(basis: OpucBasis, n: int, x):
    """Real-zero intensity via the Blaschke quotient.

    At ``x = +-1`` the removable singularity is filled in with the local
    quadratic model ``1 - h^2 ~ q (1 - |x|)^2``.
    """
    n = int(n)
    basis._check(n + 1)
    x_arr = np.asarray(x, dtype=float)
    x_arr, y, d, D, E, _ = _split_eval(basis, n, x_arr)
    omh2 = D * E
    ax = np.abs(x_arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = np.where(ax > 1, (ax - 1.0) * (ax + 1.0), d * (1.0 + y))
        denom = np.where(ax > 1, denom, denom)
        out = np.sqrt(omh2) / (math.pi * denom)
    edge = d == 0
    if edge.any():
        for side in (1, -1):
            hit = edge & (np.sign(x_arr) == side)
            if hit.any():
                q0 = boundary_quadratic(basis, n, side)
                out = np.where(hit, math.sqrt(max(q0, 0.0)) / (2.0 * math.pi), out)
    return out if out.ndim else float(out)


def rho_kernel(basis: OpucBasis, n: int, x, *, n_max: int = N_KERNEL_MAX):
    """Real-zero intensity via Christoffel-Darboux kernels (moderate ``n``)."""
    rho, _ = _rho_kernel_counted(basis, n, x, n_max)
    return rho


def _rho_kernel_counted(basis, n, x, n_max=N_KERNEL_MAX):
    n = int(n)
    if n > n_max:
        raise ValueError(f"kernel route is capped at n = {n_max}")
    K, K10, K11 = (np.asarray(v) for v in cd_kernels(basis, n, x))
    gram = K * K11 - K10 * K10
    scale = K * K11
    bad = gram < -CLAMP_TOL * scale
    if np.any(bad):
        raise ArithmeticError(
            f"negative Gram determinant beyond tolerance at {np.count_nonzero(bad)} point(s)"
        )
    clamped = int(np.count_nonzero(gram < 0))
    if clamped:
        log.debug("clamped %d negative kernel determinants", clamped)
    out = np.sqrt(np.maximum(gram, 0.0)) / (math.pi * K)
    return (out if out.ndim else float(out)), clamped


@dataclass(frozen=True)
class DensityGrid:
    xs: np.ndarray
    rho: np.ndarray
    n: int
    spec_id: str
    method: str
    clamped: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "rho", "method", "n"])
        for x, r in zip(self.xs, self.rho):
            w.writerow([repr(float(x)), repr(float(r)), self.method, self.n])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, spec_id: str = ""):
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            return cls(np.empty(0), np.empty(0), 0, spec_id, "blaschke")
        return cls(
            np.array([float(r["x"]) for r in rows]),
            np.array([float(r["rho"]) for r in rows]),
            int(rows[0]["n"]),
            spec_id,
            rows[0]["method"],
        )


def density_grid(basis: OpucBasis, n: int, xs, method: str = "blaschke") -> DensityGrid:
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size > 1 and np.any(np.diff(xs) < 0):
        raise ValueError("xs must be sorted")
    clamped = 0
    if xs.size == 0:
        rho = np.empty(0)
    elif method == "blaschke":
        rho = np.asarray(rho_blaschke(basis, n, xs))
    elif method == "kernel":
        rho, clamped = _rho_kernel_counted(basis, n, xs)
        rho = np.asarray(rho)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DensityGrid(xs, rho, int(n), basis.spec_id, method, clamped)
