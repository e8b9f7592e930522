"""Monte Carlo root counting for Gaussian random OPUC polynomials.

Each sample ``i`` draws from its own Philox stream keyed by the run seed with
the counter offset by ``i``, so results do not depend on how samples are
scheduled across threads.

Two root counters are available.  ``"companion"`` expands the sample in
monomials and takes companion-matrix eigenvalues.  ``"comrade"`` (the default)
never leaves the orthonormal basis: the roots of ``sum eta_i phi_i`` are the
eigenvalues of the GGT matrix with a rank-one correction in its last column.
The two agree for Lebesgue measure, where ``phi_m = z^m``; for measures whose
monomial coefficients grow much larger than the leading one (Geronimus with
``n`` in the hundreds) only the comrade form keeps roots near ``z = 1``
accurate.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import matrix_balance

from ._lapack import hessenberg_eigvals
from .measure import MeasureSpec
from .opuc import N_COEFF_MAX, OpucBasis, ggt_matrix, monomial_coeffs

__all__ = [
    "McConfig",
    "McStats",
    "sample_stream",
    "sample_poly",
    "companion",
    "comrade_matrix",
    "count_real_zeros",
    "count_real_zeros_opuc",
    "count_real_zeros_sturm",
    "run_mc",
]

TRIM_REL = 1e-13
MAX_FAILURE_RATE = 1e-3
_CHUNK = 256
METHODS = ("comrade", "companion")


@dataclass(frozen=True)
class McConfig:
    n: int
    samples: int
    seed: int = 0
    im_tol: float = 1e-8
    method: str = "comrade"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.n > N_COEFF_MAX:
            raise ValueError(f"Monte Carlo degree is capped at {N_COEFF_MAX}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.im_tol > 0:
            raise ValueError("im_tol must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")


@dataclass(frozen=True)
class McStats:
    mean: float
    stderr: float
    histogram: dict[int, int]
    samples_used: int
    seed: int = 0
    failures: int = 0
    spec_id: str = ""
    n: int = 0
    parity_mismatch: int = field(default=0, compare=False)

    def to_json(self) -> str:
        return json.dumps({
            "spec_id": self.spec_id,
            "n": self.n,
            "mean": self.mean,
            "stderr": self.stderr,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "seed": self.seed,
            "samples": self.samples_used,
            "failures": self.failures,
        })

    @classmethod
    def from_json(cls, text: str):
        d = json.loads(text)
        return cls(d["mean"], d["stderr"], {int(k): v for k, v in d["histogram"].items()},
                   d["samples"], d["seed"], d["failures"], d["spec_id"], d["n"])


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of a run seeded by ``seed``."""
    return np.random.Generator(np.random.Philox(counter=[0, 0, 0, int(index)], key=int(seed)))


def sample_poly(rows: np.ndarray, rng: np.random.Generator | None = None, eta=None) -> np.ndarray:
    """Monomial coefficients of ``sum_i eta_i phi_i`` (ascending powers).

    ``rows`` is the output of :func:`monomial_coeffs`.  Pass ``eta`` to fix
    the Gaussian weights instead of drawing them from ``rng``.
    """
    if eta is None:
        if rng is None:
            raise ValueError("need either rng or eta")
        eta = rng.standard_normal(rows.shape[0])
    return np.asarray(eta, dtype=float) @ rows


def _trim(coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0:
        raise ValueError("the zero polynomial has no well-defined root count")
    nz = np.nonzero(np.abs(coeffs) > TRIM_REL * scale)[0]
    return coeffs[: nz[-1] + 1]


def companion(coeffs) -> np.ndarray:
    """Balanced companion matrix of a polynomial given in ascending powers."""
    c = _trim(coeffs)
    deg = len(c) - 1
    mat = np.zeros((deg, deg))
    if deg > 1:
        mat[1:, :-1] = np.eye(deg - 1)
    mat[:, -1] = -c[:-1] / c[-1]
    balanced, _ = matrix_balance(mat, permute=False)
    return balanced


def comrade_matrix(basis: OpucBasis, eta) -> np.ndarray:
    """Matrix whose eigenvalues are the roots of ``sum_i eta_i phi_i``.

    Trailing near-zero weights are dropped first, as for monomial input.
    """
    eta = _trim(eta)
    deg = len(eta) - 1
    if deg == 0:
        return np.zeros((0, 0))
    G, rho = ggt_matrix(basis, deg)
    G[:, -1] -= rho * eta[:-1] / eta[-1]
    return G


def _count(eigs, im_tol):
    return int(np.count_nonzero(np.abs(eigs.imag) <= im_tol * (1.0 + np.abs(eigs))))


def count_real_zeros(coeffs, im_tol: float = 1e-8) -> int:
    """Number of real roots, from companion-matrix eigenvalues."""
    c = _trim(coeffs)
    if len(c) == 1:
        return 0
    return _count(np.linalg.eigvals(companion(c)), im_tol)


def count_real_zeros_opuc(basis: OpucBasis, eta, im_tol: float = 1e-8) -> int:
    """Number of real roots of ``sum_i eta_i phi_i``, from comrade eigenvalues."""
    mat = comrade_matrix(basis, eta)
    if mat.size == 0:
        return 0
    return _count(hessenberg_eigvals(mat), im_tol)


def count_real_zeros_sturm(coeffs, bound: float = 1e6) -> int:
    """Exact distinct real-root count on ``[-bound, bound]`` (Sturm sequences).

    Debug oracle: coefficients are converted to exact rationals, so it is slow
    and meant for degrees up to about 30.
    """
    import sympy

    c = _trim(coeffs)
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(float(v)) for v in c[::-1]], x, domain="QQ")
    b = sympy.Rational(bound)
    return int(poly.count_roots(-b, b))


def _companion_batch(coeffs):
    # numpy.linalg.eigvals runs LAPACK geev, which permutes and scales the
    # matrix itself, so the explicit balancing step is skipped here.
    count, deg = coeffs.shape[0], coeffs.shape[1] - 1
    mats = np.zeros((count, deg, deg))
    if deg > 1:
        idx = np.arange(deg - 1)
        mats[:, idx + 1, idx] = 1.0
    mats[:, :, -1] = -coeffs[:, :-1] / coeffs[:, -1:]
    return mats


class _Counter:
    """Per-run state shared by all chunks: basis data for one method."""

    def __init__(self, basis, cfg):
        self.basis = basis
        self.cfg = cfg
        if cfg.method == "companion":
            self.rows = monomial_coeffs(basis, cfg.n)
        else:
            self.ggt = ggt_matrix(basis, cfg.n)

    def single(self, vec):
        if self.cfg.method == "companion":
            return count_real_zeros(vec @ self.rows, self.cfg.im_tol)
        return count_real_zeros_opuc(self.basis, vec, self.cfg.im_tol)

    def chunk(self, start, stop):
        cfg = self.cfg
        eta = np.stack([sample_stream(cfg.seed, i).standard_normal(cfg.n + 1)
                        for i in range(start, stop)])
        vecs = eta @ self.rows if cfg.method == "companion" else eta
        full = np.abs(vecs[:, -1]) > TRIM_REL * np.max(np.abs(vecs), axis=1)
        counts, failures = [], 0
        for vec in eta[~full]:
            try:
                counts.append(self.single(vec))
            except (np.linalg.LinAlgError, ValueError):
                failures += 1
        if not np.any(full):
            return counts, failures
        if cfg.method == "comrade":
            # comrade matrices are already Hessenberg with entries of order one
            G, rho = self.ggt
            G = G.copy()  # chunks may run on several threads
            last = G[:, -1].copy()
            for vec in eta[full]:
                G[:, -1] = last - rho * vec[:-1] / vec[-1]
                try:
                    counts.append(_count(hessenberg_eigvals(G), cfg.im_tol))
                except np.linalg.LinAlgError:
                    failures += 1
            return counts, failures
        mats = _companion_batch(vecs[full])
        try:
            counts.extend(_count(e, cfg.im_tol) for e in np.linalg.eigvals(mats))
        except np.linalg.LinAlgError:
            for m in mats:
                try:
                    counts.append(_count(np.linalg.eigvals(m), cfg.im_tol))
                except np.linalg.LinAlgError:
                    failures += 1
        return counts, failures


def run_mc(spec: MeasureSpec, cfg: McConfig, workers: int | None = None) -> McStats:
    """Sample ``cfg.samples`` polynomials and summarize their real-root counts."""
    counter = _Counter(OpucBasis.from_spec(spec, cfg.n), cfg)
    bounds = [(s, min(s + _CHUNK, cfg.samples)) for s in range(0, cfg.samples, _CHUNK)]

    def job(b):
        return counter.chunk(*b)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]
    hist = Counter()
    failures = 0
    for counts, fails in parts:
        hist.update(counts)
        failures += fails
    used = sum(hist.values())
    if failures > MAX_FAILURE_RATE * cfg.samples:
        raise ArithmeticError(f"{failures} of {cfg.samples} samples failed in the eigensolver")
    if used == 0:
        raise ArithmeticError("no usable samples")
    ks = np.array(sorted(hist))
    fs = np.array([hist[k] for k in ks], dtype=float)
    mean = float(np.dot(ks, fs) / used)
    if used > 1:
        var = float(np.dot((ks - mean) ** 2, fs) / (used - 1))
        stderr = math.sqrt(var / used)
    else:
        stderr = 0.0
    parity = int(sum(hist[k] for k in ks if (k - cfg.n) % 2))
    return McStats(mean, stderr, dict(sorted((int(k), int(v)) for k, v in hist.items())),
                   used, cfg.seed, failures, spec.spec_id, cfg.n, parity)
