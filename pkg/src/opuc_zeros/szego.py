"""Szego function, scattering function and its Taylor data at ``z = 1``.

With ``ell[k]`` the Fourier coefficients of ``log w``::

    D_int(z) = exp(ell[0]/2 + sum_k ell[k] z^k),   |z| < 1
    D_ext(z) = 1 / D_int(1/z),                     |z| > 1
    S(z)     = D_int(z) D_ext(z) = exp(sum_k ell[k] (z^k - z^-k))
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .measure import MeasureError, MeasureSpec, _raw_weight, default_grid_size, weight_at

__all__ = [
    "SzegoFunction",
    "ScatteringExpansion",
    "szego_from_weight",
    "scattering_at",
    "scattering_expansion",
    "log_coeffs_from_s",
]

P_RESOLVABLE = 6


@dataclass(frozen=True)
class SzegoFunction:
    ell: np.ndarray
    K: int
    tau: float
    rho: float  # inner radius of the annulus where the truncated series is trusted

    def d_int(self, z):
        z = np.asarray(z, dtype=complex)
        series = np.polynomial.polynomial.polyval(z, np.concatenate(([0.0], self.ell[1:])))
        out = np.exp(0.5 * self.ell[0] + series)
        return out if out.ndim else complex(out)

    def d_ext(self, z):
        z = np.asarray(z, dtype=complex)
        return 1.0 / self.d_int(1.0 / z)

    def boundary_ratio(self, theta):
        """``D_int/D_ext`` on the circle; equals the weight density there."""
        xi = np.exp(1j * np.asarray(theta, dtype=float))
        return self.d_int(xi) / self.d_ext(xi)


@dataclass(frozen=True)
class ScatteringExpansion:
    """Taylor data of ``S`` and ``log S`` in powers of ``(1 - z)``.

    ``s[p-1]`` and ``c[p-1]`` hold the order-``p`` coefficients.
    """

    s: np.ndarray
    c: np.ndarray
    fd_check: float = float("nan")

    @property
    def P(self) -> int:
        return len(self.s)


def szego_from_weight(spec: MeasureSpec, K: int = 128, grid_size: int | None = None) -> SzegoFunction:
    """Fourier coefficients of ``log w`` through order ``K``."""
    if not spec.is_weight:
        raise MeasureError(f"{spec.spec_id} has no pointwise weight")
    K = int(K)
    if K < 1:
        raise ValueError("K must be positive")
    grid = default_grid_size(K) if grid_size is None else int(grid_size)
    theta = 2 * math.pi * np.arange(grid) / grid
    w = weight_at(spec, theta)
    if np.any(w <= 0):
        raise MeasureError("weight is not strictly positive; log undefined")
    ell = np.fft.rfft(np.log(w)).real[: K + 1] / grid
    # Constant weights should have an exactly constant log.
    if spec.family == "lebesgue":
        ell[1:] = 0.0
    if abs(ell[-1]) >= 1e-15:
        warnings.warn(
            f"log-weight series not converged at K={K} (|ell[K]| = {abs(ell[-1]):.2e})",
            RuntimeWarning,
            stacklevel=2,
        )
    significant = [
        abs(ell[k]) ** (1.0 / k) for k in range(1, K + 1) if abs(ell[k]) > 1e-13
    ]
    rho = max(significant, default=0.0)
    return SzegoFunction(ell, K, math.exp(-0.5 * ell[0]), rho)


def scattering_at(szego: SzegoFunction, z):
    """``S(z)`` for ``rho < |z| < 1/rho``."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    lo = szego.rho
    hi = math.inf if lo == 0 else 1.0 / lo
    if np.any(r <= lo) or np.any(r >= hi) or np.any(r == 0):
        raise ValueError(f"z outside the annulus {lo:.3g} < |z| < {hi:.3g}")
    ell = szego.ell[1 : _significant_terms(szego.ell) + 1]
    k = np.arange(1, len(ell) + 1)
    zk = z[..., None] ** k
    out = np.exp(np.sum(ell * (zk - 1.0 / zk), axis=-1))
    return out if out.ndim else complex(out)


def _significant_terms(ell) -> int:
    # Past the noise floor the coefficients are FFT rounding, which powers of
    # z (or binomial weights) would only amplify.  Rounding in the transform
    # is a few ulps of max |log w| <= sum |ell_k|.
    floor = 4 * np.finfo(float).eps * np.sum(np.abs(ell))
    big = np.nonzero(np.abs(ell[1:]) >= floor)[0]
    return int(big[-1]) + 1 if big.size else 0


def log_coeffs_from_s(s) -> np.ndarray:
    """``c_p`` from ``s_p`` via the composition formula for ``log(1 + x)``."""
    s = np.asarray(s, dtype=float)
    P = len(s)
    # power[k][p] = coefficient of u^p in (sum_j s_j u^j)^k
    base = np.concatenate(([0.0], s))
    c = np.zeros(P + 1)
    power = base.copy()
    for k in range(1, P + 1):
        c += (-1) ** (k - 1) / k * power
        power = np.convolve(power, base)[: P + 1]
    return c[1:]


def scattering_expansion(szego: SzegoFunction, P: int = 4, step: float = 1e-3) -> ScatteringExpansion:
    """Coefficients ``s_p`` of ``S`` and ``c_p`` of ``log S`` at ``z = 1``.

    Computed by recomposing the truncated ``ell`` series in ``u = 1 - z``;
    ``step`` is only used for a finite-difference sanity check of ``s_1``
    stored in ``fd_check``.
    """
    P = int(P)
    if not 1 <= P <= P_RESOLVABLE:
        raise ValueError(f"P must be in 1..{P_RESOLVABLE}")
    if not 0 < step <= 1e-2:
        raise ValueError("step must lie in (0, 1e-2]")
    ell = szego.ell
    c = np.zeros(P + 1)
    for k in range(1, _significant_terms(ell) + 1):
        for j in range(1, P + 1):
            # (1-u)^k - (1-u)^(-k) at order u^j
            c[j] += ell[k] * ((-1) ** j * math.comb(k, j) - math.comb(k + j - 1, j))
    # S = exp(L): s_p = (1/p) sum_{q=1}^p q c_q s_{p-q}
    s = np.zeros(P + 1)
    s[0] = 1.0
    for p in range(1, P + 1):
        s[p] = sum(q * c[q] * s[p - q] for q in range(1, p + 1)) / p
    fd = float("nan")
    if szego.rho < 1 - step:
        plus = scattering_at(szego, 1 + step).real
        minus = scattering_at(szego, 1 - step).real
        fd = abs(-(plus - minus) / (2 * step) - s[1])
    return ScatteringExpansion(s[1:], c[1:], fd)
