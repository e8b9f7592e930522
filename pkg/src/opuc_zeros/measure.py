"""Conjugate-symmetric probability measures on the unit circle.

A measure is described either by a pointwise weight (density with respect to
``d theta``) or directly by its Verblunsky coefficients.  For weight families
the coefficients are recovered from trigonometric moments by a Levinson-type
recursion on monic coefficient vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "LEBESGUE",
    "GERONIMUS",
    "BERNSTEIN_SZEGO",
    "TRIG_POLY",
    "EXPLICIT",
    "WEIGHT_FAMILIES",
    "MeasureError",
    "MeasureSpec",
    "MomentSeq",
    "VerblunskySeq",
    "parse_measure",
    "weight_at",
    "moments",
    "levinson",
    "verblunsky",
    "reflect",
    "default_grid_size",
]

LEBESGUE = "lebesgue"
GERONIMUS = "geronimus"
BERNSTEIN_SZEGO = "bernstein-szego"
TRIG_POLY = "trig-poly"
EXPLICIT = "verblunsky"
WEIGHT_FAMILIES = (LEBESGUE, BERNSTEIN_SZEGO, TRIG_POLY)
_FAMILIES = (LEBESGUE, GERONIMUS, BERNSTEIN_SZEGO, TRIG_POLY, EXPLICIT)
_ALIASES = {
    "lebesgue": LEBESGUE,
    "arclength": LEBESGUE,
    "kac": LEBESGUE,
    "geronimus": GERONIMUS,
    "bernstein-szego": BERNSTEIN_SZEGO,
    "bernstein_szego": BERNSTEIN_SZEGO,
    "bs": BERNSTEIN_SZEGO,
    "trig-poly": TRIG_POLY,
    "trig_poly": TRIG_POLY,
    "trigpoly": TRIG_POLY,
    "trig": TRIG_POLY,
    "verblunsky": EXPLICIT,
    "explicit": EXPLICIT,
}


class MeasureError(ValueError):
    """Invalid measure parameters or an inconsistent moment sequence."""


@dataclass(frozen=True)
class MeasureSpec:
    """A measure family plus its numeric parameters.

    ``trig-poly`` with coefficients ``(c1, c2, ...)`` has weight proportional
    to ``exp(c1 cos(theta) + c2 cos(2 theta) + ...)``.  ``geronimus`` has the
    constant Verblunsky sequence ``a, a, a, ...``; ``reflected`` marks its
    image under ``z -> -z`` (the other families reflect within the family).
    """

    family: str
    params: tuple[float, ...] = ()
    reflected: bool = False

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise MeasureError(f"unknown measure family {self.family!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if not all(math.isfinite(p) for p in self.params):
            raise MeasureError("measure parameters must be finite")
        if self.family == LEBESGUE and self.params:
            raise MeasureError("lebesgue takes no parameters")
        if self.family in (GERONIMUS, BERNSTEIN_SZEGO):
            if len(self.params) != 1:
                raise MeasureError(f"{self.family} takes exactly one parameter")
            if not abs(self.params[0]) < 1:
                raise MeasureError(f"{self.family} parameter must satisfy |a| < 1")
        if self.family == EXPLICIT and not all(abs(a) < 1 for a in self.params):
            raise MeasureError("Verblunsky coefficients must lie in (-1, 1)")
        if self.reflected and self.family != GERONIMUS:
            raise MeasureError("only geronimus carries a reflection flag")

    @classmethod
    def lebesgue(cls):
        return cls(LEBESGUE)

    @classmethod
    def geronimus(cls, a):
        return cls(GERONIMUS, (a,))

    @classmethod
    def bernstein_szego(cls, a):
        return cls(BERNSTEIN_SZEGO, (a,))

    @classmethod
    def trig_poly(cls, coeffs):
        return cls(TRIG_POLY, tuple(coeffs))

    @classmethod
    def explicit(cls, alphas):
        return cls(EXPLICIT, tuple(alphas))

    @property
    def is_weight(self) -> bool:
        return self.family in WEIGHT_FAMILIES

    @property
    def spec_id(self) -> str:
        body = self.family
        if self.params:
            body += ":" + ",".join(repr(p) for p in self.params)
        return f"reflect({body})" if self.reflected else body

    def __str__(self):
        return self.spec_id


def parse_measure(text: str) -> MeasureSpec:
    """Parse ``family:p1,p2,...`` (or ``reflect(...)``) into a MeasureSpec."""
    text = text.strip()
    if text.startswith("reflect(") and text.endswith(")"):
        return reflect(parse_measure(text[len("reflect("):-1]))
    name, _, rest = text.partition(":")
    family = _ALIASES.get(name.strip().lower())
    if family is None:
        raise MeasureError(f"unknown measure family {name!r}")
    try:
        params = tuple(float(p) for p in rest.split(",") if p.strip())
    except ValueError as exc:
        raise MeasureError(f"bad measure parameters in {text!r}") from exc
    return MeasureSpec(family, params)


def _raw_weight(spec: MeasureSpec, theta):
    if spec.family == LEBESGUE:
        return np.ones_like(theta)
    if spec.family == BERNSTEIN_SZEGO:
        a = spec.params[0]
        return (1 - a * a) / np.abs(1 - a * np.exp(1j * theta)) ** 2
    if spec.family == TRIG_POLY:
        k = np.arange(1, len(spec.params) + 1)
        return np.exp(np.cos(np.multiply.outer(theta, k)) @ np.array(spec.params))
    raise MeasureError(f"{spec.spec_id} has no pointwise weight")


@lru_cache(maxsize=64)
def _mass(spec: MeasureSpec) -> float:
    if spec.family == LEBESGUE:
        return 2 * math.pi
    if spec.family == BERNSTEIN_SZEGO:
        return 2 * math.pi
    grid = 4096
    theta = 2 * math.pi * np.arange(grid) / grid
    return float(2 * math.pi * np.mean(_raw_weight(spec, theta)))


def weight_at(spec: MeasureSpec, theta):
    """Density of ``spec`` with respect to ``d theta`` (unit total mass)."""
    if not spec.is_weight:
        raise MeasureError(f"{spec.spec_id} has no pointwise weight")
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    out = _raw_weight(spec, theta) / _mass(spec)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MomentSeq:
    """``c[k] = int xi^(-k) d mu(xi)`` for ``k = 0..K``."""

    c: np.ndarray
    grid_size: int

    @property
    def K(self) -> int:
        return len(self.c) - 1


@dataclass(frozen=True)
class VerblunskySeq:
    alphas: np.ndarray
    source: str

    def __len__(self):
        return len(self.alphas)


def default_grid_size(K: int) -> int:
    return max(1024, 1 << math.ceil(math.log2(max(8 * K, 1))))


def moments(spec: MeasureSpec, K: int, grid_size: int | None = None) -> MomentSeq:
    """Trigonometric moments by the periodic trapezoid rule.

    Raises :class:`MeasureError` if the Toeplitz matrix of the result fails
    to be positive definite at some leading minor.
    """
    if not spec.is_weight:
        raise MeasureError(f"{spec.spec_id} has no pointwise weight")
    K = int(K)
    if K < 0:
        raise ValueError("K must be nonnegative")
    grid = default_grid_size(K) if grid_size is None else int(grid_size)
    if grid < 2 * K + 1:
        raise ValueError("grid_size too small for the requested moments")
    if spec.family == LEBESGUE:
        c = np.zeros(K + 1)
        c[0] = 1.0
        return MomentSeq(c, grid)
    theta = 2 * math.pi * np.arange(grid) / grid
    w = _raw_weight(spec, theta)
    c = np.fft.rfft(w).real[: K + 1]
    c = c / c[0]
    _levinson_core(c, K)  # positivity check
    return MomentSeq(c, grid)


def _levinson_core(c: np.ndarray, M: int):
    alphas = np.zeros(M)
    p = np.ones(1)  # monic Phi_0, ascending powers
    energy = c[0]
    for m in range(M):
        # <z Phi_m, 1> = sum_j p_j c_{j+1};  <Phi_m^*, 1> = ||Phi_m||^2
        num = float(np.dot(p, c[1 : m + 2]))
        a = num / energy
        if not abs(a) < 1:
            raise MeasureError(
                f"moment sequence is not positive definite (|alpha_{m}| = {abs(a):.6g} >= 1)"
            )
        alphas[m] = a
        rev = p[::-1]
        p = np.concatenate(([0.0], p)) - a * np.concatenate((rev, [0.0]))
        energy *= 1 - a * a
    return alphas, p


def levinson(c, M: int | None = None):
    """Verblunsky coefficients and monic ``Phi_M`` from moments ``c[0..M]``.

    Implements ``Phi_{m+1} = z Phi_m - alpha_m Phi_m^*`` on coefficient
    vectors, where ``Phi_m^*`` is the reversed vector.
    """
    c = np.asarray(c, dtype=float)
    M = len(c) - 1 if M is None else int(M)
    if len(c) < M + 1:
        raise ValueError("need moments c[0..M]")
    return _levinson_core(c, M)


@lru_cache(maxsize=128)
def _verblunsky_cached(spec: MeasureSpec, M: int) -> np.ndarray:
    if spec.family == LEBESGUE:
        return np.zeros(M)
    if spec.family == GERONIMUS:
        a = spec.params[0]
        if spec.reflected:
            return a * (-1.0) ** (np.arange(M) + 1)
        return np.full(M, a)
    if spec.family == EXPLICIT:
        out = np.zeros(M)
        k = min(M, len(spec.params))
        out[:k] = spec.params[:k]
        return out
    mom = moments(spec, 2 * M + 2)
    alphas, _ = _levinson_core(mom.c, M)
    return alphas


def verblunsky(spec: MeasureSpec, M: int) -> VerblunskySeq:
    """The first ``M`` Verblunsky coefficients of ``spec``."""
    M = int(M)
    if M < 1:
        raise ValueError("M must be at least 1")
    alphas = _verblunsky_cached(spec, M)
    alphas.setflags(write=False)
    source = "levinson" if spec.family in (BERNSTEIN_SZEGO, TRIG_POLY) else "explicit"
    return VerblunskySeq(alphas, source)


def reflect(spec: MeasureSpec) -> MeasureSpec:
    """The measure ``sigma`` with ``sigma'(xi) = mu'(-xi)``."""
    fam = spec.family
    if fam == LEBESGUE:
        return spec
    if fam == BERNSTEIN_SZEGO:
        return MeasureSpec(fam, (-spec.params[0],))
    if fam == TRIG_POLY:
        return MeasureSpec(fam, tuple((-1) ** k * c for k, c in enumerate(spec.params, 1)))
    if fam == EXPLICIT:
        return MeasureSpec(fam, tuple((-1) ** (m + 1) * a for m, a in enumerate(spec.params)))
    return MeasureSpec(fam, spec.params, not spec.reflected)
