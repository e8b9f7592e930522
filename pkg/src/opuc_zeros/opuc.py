"""Szego recursion for orthonormal polynomials on the unit circle.

Monic polynomials obey::

    Phi_{m+1}(z)  = z Phi_m(z) - alpha_m Phi_m^*(z)
    Phi_{m+1}^*(z) = Phi_m^*(z) - alpha_m z Phi_m(z)

and ``phi_m = kappa_m Phi_m``.  Two evaluation paths are provided: the direct
one (values of ``Phi``, ``Phi^*`` and derivatives, which overflow for large
``m`` near ``|x| = 1``) and the ratio path for ``b_{n+1} = Phi_{n+1}/Phi^*_{n+1}``,
which stays bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measure import MeasureSpec, verblunsky

__all__ = [
    "N_COEFF_MAX",
    "OpucBasis",
    "BlaschkeState",
    "eval_pair",
    "blaschke",
    "cd_kernels",
    "monomial_coeffs",
    "ggt_matrix",
    "angle_recursion",
]

N_COEFF_MAX = 256
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class OpucBasis:
    """Verblunsky coefficients plus the normalization constants ``kappa``."""

    alphas: np.ndarray
    kappa: np.ndarray = field(repr=False)
    spec_id: str = ""

    @classmethod
    def from_alphas(cls, alphas, spec_id: str = ""):
        alphas = np.array(alphas, dtype=float)
        if alphas.ndim != 1:
            raise ValueError("alphas must be one-dimensional")
        if not np.all(np.abs(alphas) < 1):
            raise ValueError("Verblunsky coefficients must lie in (-1, 1)")
        # log-accumulated so long products of (1 - alpha^2) cannot underflow
        log_k = np.concatenate(([0.0], np.cumsum(-0.5 * np.log1p(-alphas**2))))
        alphas.setflags(write=False)
        with np.errstate(over="ignore"):  # inf only for pathological inputs
            kappa = np.exp(log_k)
        kappa.setflags(write=False)
        return cls(alphas, kappa, spec_id)

    @classmethod
    def from_spec(cls, spec: MeasureSpec, n_max: int):
        """Basis able to evaluate ``b_{n+1}`` for every ``n <= n_max``."""
        return cls.from_alphas(verblunsky(spec, int(n_max) + 1).alphas, spec.spec_id)

    def __len__(self):
        return len(self.alphas)

    def _check(self, count: int):
        if count > len(self.alphas):
            raise ValueError(
                f"need {count} Verblunsky coefficients, basis holds {len(self.alphas)}"
            )


@dataclass(frozen=True)
class BlaschkeState:
    b: np.ndarray | float
    db: np.ndarray | float
    x: np.ndarray | float
    n: int


def _scalar(out, like):
    return out if np.ndim(like) else out[()]


def eval_pair(basis: OpucBasis, m: int, x):
    """``(Phi_m, Phi_m^*, Phi_m', Phi_m^*')`` at ``x`` (real or complex)."""
    m = int(m)
    if m < 0:
        raise ValueError("m must be nonnegative")
    basis._check(m)
    x_arr = np.asarray(x)
    dtype = complex if np.iscomplexobj(x_arr) else float
    z = x_arr.astype(dtype)
    p = np.ones_like(z)
    ps = np.ones_like(z)
    dp = np.zeros_like(z)
    dps = np.zeros_like(z)
    with np.errstate(over="ignore", invalid="ignore"):
        for a in basis.alphas[:m]:
            p, ps, dp, dps = (
                z * p - a * ps,
                ps - a * z * p,
                p + z * dp - a * dps,
                dps - a * (p + z * dp),
            )
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(dp))):
        raise OverflowError("direct Szego recursion overflowed; use the ratio path")
    return tuple(_scalar(v, x) for v in (p, ps, dp, dps))


def blaschke(basis: OpucBasis, n: int, x) -> BlaschkeState:
    """``b_{n+1}(x)`` and its derivative by the ratio recursion.

    ``r_{m+1} = (x r_m - alpha_m) / (1 - alpha_m x r_m)``, ``r_0 = 1``.
    """
    n = int(n)
    basis._check(n + 1)
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1):
        raise ValueError("the ratio path needs |x| <= 1")
    r = np.ones_like(xa)
    dr = np.zeros_like(xa)
    for a in basis.alphas[: n + 1]:
        u = xa * r
        du = r + xa * dr
        den = 1.0 - a * u
        if np.any(den == 0):
            raise ZeroDivisionError("ratio recursion denominator vanished (boundary rounding)")
        r = (u - a) / den
        dr = (1.0 - a * a) / den**2 * du
    return BlaschkeState(_scalar(r, x), _scalar(dr, x), x, n)


def cd_kernels(basis: OpucBasis, n: int, x):
    """Christoffel-Darboux sums ``K, K10, K11`` over ``phi_0..phi_n`` at real ``x``."""
    n = int(n)
    basis._check(n)
    z = np.asarray(x, dtype=float)
    p = np.ones_like(z)
    ps = np.ones_like(z)
    dp = np.zeros_like(z)
    dps = np.zeros_like(z)
    K = np.ones_like(z)
    K10 = np.zeros_like(z)
    K11 = np.zeros_like(z)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(n):
            a = basis.alphas[m]
            p, ps, dp, dps = (
                z * p - a * ps,
                ps - a * z * p,
                p + z * dp - a * dps,
                dps - a * (p + z * dp),
            )
            k = basis.kappa[m + 1]
            phi, dphi = k * p, k * dp
            K += phi * phi
            K10 += dphi * phi
            K11 += dphi * dphi
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(K11))):
        raise OverflowError("Christoffel-Darboux sums overflowed")
    return _scalar(K, x), _scalar(K10, x), _scalar(K11, x)


def monomial_coeffs(basis: OpucBasis, n: int, n_max: int = N_COEFF_MAX) -> np.ndarray:
    """Lower-triangular array whose row ``m`` holds ``phi_m``'s coefficients.

    Coefficients are in ascending powers; row ``m`` has ``m + 1`` entries
    followed by zeros.
    """
    n = int(n)
    if n > n_max:
        raise ValueError(f"monomial coefficients are capped at degree {n_max}")
    basis._check(n)
    rows = np.zeros((n + 1, n + 1))
    p = np.ones(1)
    rows[0, 0] = 1.0
    for m in range(n):
        a = basis.alphas[m]
        p = np.concatenate(([0.0], p)) - a * np.concatenate((p[::-1], [0.0]))
        rows[m + 1, : m + 2] = basis.kappa[m + 1] * p
    return rows


def ggt_matrix(basis: OpucBasis, n: int):
    """Multiplication by ``z`` on ``span(phi_0, ..., phi_{n-1})``.

    Returns ``(G, rho)`` with ``G`` upper Hessenberg such that::

        z phi_j = sum_k G[k, j] phi_k + rho_j phi_{j+1} [j = n-1]

    i.e. column ``j`` expands ``z phi_j`` and ``rho = sqrt(1 - alpha_{n-1}^2)``
    multiplies the ``phi_n`` that falls outside the span.  Entries are bounded
    by one, unlike monomial coefficients.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    basis._check(n)
    a = np.asarray(basis.alphas[:n], dtype=float)
    rho = np.sqrt((1.0 - a) * (1.0 + a))
    prev = np.concatenate(([-1.0], a[:-1]))
    logrho = np.concatenate(([0.0], np.cumsum(np.log(rho))))
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        upper = -a[None, :] * prev[:, None] * np.exp(logrho[j] - logrho[k])
    G = np.where(k <= j, upper, 0.0)
    G[np.arange(1, n), np.arange(n - 1)] = rho[:-1]
    return G, float(rho[n - 1])


def _logcosh(y):
    ay = np.abs(y)
    return ay + np.log1p(np.exp(-2.0 * ay)) - _LOG2


def _logsinh_abs(y):
    # log|sinh y|; -inf at 0
    ay = np.abs(y)
    with np.errstate(divide="ignore"):
        return ay + np.log(-np.expm1(-2.0 * ay)) - _LOG2


def angle_recursion(alphas, n: int, big_x):
    """Hyperbolic-angle form of the ratio recursion.

    With ``X = artanh(x)`` and ``R_m = artanh(b_m)`` the Mobius step becomes
    ``R_{m+1} = (logcosh(X+R_m) - logcosh(X-R_m))/2 - artanh(alpha_m)``, and
    ``h_{n+1} = dR_{n+1}/dX``.  Besides ``h`` itself the recursion carries
    ``1 - h`` and ``1 + h`` as separate nonnegative quantities, so
    ``1 - h^2 = (1 - h)(1 + h)`` keeps full relative accuracy even when
    ``x`` is within rounding distance of 1.

    ``big_x`` must be ``>= 0`` (that is ``0 <= x < 1``); pass reflected
    coefficients for negative ``x``.

    Returns ``(one_minus_h, one_plus_h, h, R)`` for ``b_{n+1}``.
    """
    n = int(n)
    alphas = np.asarray(alphas, dtype=float)
    if len(alphas) < n + 1:
        raise ValueError(f"need {n + 1} Verblunsky coefficients")
    X = np.asarray(big_x, dtype=float)
    if np.any(X < 0):
        raise ValueError("angle recursion expects X >= 0")
    A = np.arctanh(alphas[: n + 1])
    ls2x = _logsinh_abs(2.0 * X)
    tX = np.tanh(X)
    R = X - A[0]
    D = np.zeros_like(X)
    E = np.full_like(X, 2.0)
    H = np.ones_like(X)
    for m in range(1, n + 1):
        p = X + R
        q = X - R
        lcp = _logcosh(p)
        lcq = _logcosh(q)
        lden = _LOG2 + lcp + lcq  # log(2 cosh p cosh q)
        carry = np.exp(ls2x - lden)  # (tanh p + tanh q) / 2
        D = np.exp(-p - lcp) + D * carry
        E = np.exp(-q - lcq) + E * carry
        H = np.sign(R) * np.exp(_logsinh_abs(2.0 * R) - lden) + H * carry
        # logcosh(X+R) - logcosh(X-R) = 2 artanh(tanh X tanh R); the artanh
        # form keeps relative accuracy when b is tiny, the difference form
        # when x b is close to 1.
        prod = tX * np.tanh(R)
        small = np.abs(prod) < 0.5
        R = np.where(small, np.arctanh(np.where(small, prod, 0.0)), 0.5 * (lcp - lcq)) - A[m]
    return D, E, H, R
