"""Ladders of ``E_n`` values and least-squares fits of the large-``n`` expansion.

The model is::

    E_n = slope * log(n+1) + a[0] + a[1]/(n+1) + ... + a[P]/(n+1)**P

with ``slope = 2/pi`` when the slope is fixed.  Ladder values are cached in an
append-only JSON-lines file so repeated sweeps only pay for new rows.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .expect import default_tol, expect_total
from .measure import MeasureSpec
from .quadrature import QuadratureError

__all__ = [
    "CACHE_ENV",
    "KAC_SLOPE",
    "LadderRow",
    "ExpansionFit",
    "FitError",
    "UniversalityReport",
    "geometric_ladder",
    "default_ladder",
    "cache_path",
    "ladder",
    "fit_expansion",
    "universality_report",
]

CACHE_ENV = "OPUC_ZEROS_CACHE"
KAC_SLOPE = 2.0 / math.pi
COND_MAX = 1e12
# Quadrature error estimates below this are not trusted as fit weights.
SIGMA_FLOOR = 1e-12
DEFAULT_FIT_TOL = 1e-4


class FitError(ValueError):
    pass


class LadderRow(NamedTuple):
    n: int
    value: float
    err: float
    note: str = ""


def geometric_ladder(start: int, stop: int, ratio: int = 2) -> list[int]:
    """``start, start*ratio, ...`` up to and including ``stop``."""
    if start < 1 or stop < start or ratio < 2:
        raise ValueError("need 1 <= start <= stop and ratio >= 2")
    out = []
    n = start
    while n <= stop:
        out.append(n)
        n *= ratio
    return out


def default_ladder() -> list[int]:
    return geometric_ladder(2**4, 2**12)


def cache_path(path=None) -> Path | None:
    """Resolve the cache file: explicit argument, then ``$OPUC_ZEROS_CACHE``."""
    if path is not None:
        return Path(path)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def _load_cache(path: Path) -> dict:
    table = {}
    if not path.exists():
        return table
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                key = (rec["spec_id"], int(rec["n"]), float(rec["tol"]))
                table[key] = LadderRow(int(rec["n"]), float(rec["value"]), float(rec["err"]),
                                       rec.get("note", ""))
            except (ValueError, KeyError, TypeError):
                continue  # a torn write from an interrupted run
    return table


def _append_cache(path: Path, spec_id: str, tol: float, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a") as fh:
        for row in rows:
            rec = {"spec_id": spec_id, "n": row.n, "tol": tol, "value": row.value,
                   "err": row.err, "timestamp": time.time()}
            if row.note:
                rec["note"] = row.note
            fh.write(json.dumps(rec) + "\n")


def _compute_row(spec, n, tol) -> LadderRow:
    try:
        res = expect_total(spec, n, tol)
    except QuadratureError as exc:
        return LadderRow(n, float(exc.value), float(exc.error), "quadrature budget exhausted")
    return LadderRow(n, res.value, res.err_est)


def ladder(spec: MeasureSpec, ns=None, tol: float | None = None, cache=None,
           workers: int | None = None) -> list[LadderRow]:
    """``E_n(spec)`` for each ``n`` in ``ns``, reusing cached rows when possible.

    Parameters
    ----------
    spec : MeasureSpec
    ns : sequence of int, optional
        Strictly increasing degrees.  Defaults to ``16, 32, ..., 4096``.
    tol : float, optional
        Absolute quadrature tolerance.  ``None`` uses ``default_tol(max(ns))``.
    cache : path-like, optional
        JSON-lines results file; falls back to ``$OPUC_ZEROS_CACHE``.  With
        neither, nothing is persisted.
    workers : int, optional
        Thread count for rows that are not cached.

    Returns
    -------
    list of LadderRow
        Rows whose quadrature failed carry the partial value and a ``note``.
    """
    ns = default_ladder() if ns is None else [int(n) for n in ns]
    if not ns:
        raise ValueError("empty ladder")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ladder degrees must be strictly increasing")
    if ns[0] < 1:
        raise ValueError("degrees must be positive")
    tol = default_tol(ns[-1]) if tol is None else float(tol)
    path = cache_path(cache)
    known = _load_cache(path) if path is not None else {}
    rows = {n: known[(spec.spec_id, n, tol)] for n in ns if (spec.spec_id, n, tol) in known}
    todo = [n for n in ns if n not in rows]
    if todo:
        if workers and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                fresh = list(pool.map(lambda n: _compute_row(spec, n, tol), todo))
        else:
            fresh = [_compute_row(spec, n, tol) for n in todo]
        if path is not None:
            _append_cache(path, spec.spec_id, tol, fresh)
        rows.update({r.n: r for r in fresh})
    return [rows[n] for n in ns]


@dataclass(frozen=True)
class ExpansionFit:
    slope: float
    a: tuple[float, ...]
    resid_max: float
    cond: float
    ladder: tuple[tuple[int, float], ...]
    stderr: tuple[float, ...] = ()
    slope_stderr: float = 0.0
    fixed_slope: bool = True
    accepted: bool = True
    spec_id: str = ""
    residuals: tuple[float, ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return len(self.a) - 1

    def predict(self, n):
        n1 = np.asarray(n, dtype=float) + 1.0
        out = self.slope * np.log(n1)
        for p, ap in enumerate(self.a):
            out = out + ap * n1 ** (-p)
        return out

    def to_dict(self) -> dict:
        return {
            "spec_id": self.spec_id,
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "fixed_slope": self.fixed_slope,
            "a": list(self.a),
            "stderr": list(self.stderr),
            "resid_max": self.resid_max,
            "cond": self.cond,
            "accepted": self.accepted,
            "ladder": [list(r) for r in self.ladder],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str):
        d = json.loads(text)
        return cls(d["slope"], tuple(d["a"]), d["resid_max"], d["cond"],
                   tuple((int(n), float(v)) for n, v in d["ladder"]), tuple(d["stderr"]),
                   d["slope_stderr"], d["fixed_slope"], d["accepted"], d["spec_id"])


def _as_rows(data):
    rows = []
    for r in data:
        r = tuple(r)
        if len(r) == 2:
            rows.append((int(r[0]), float(r[1]), 0.0))
        else:
            rows.append((int(r[0]), float(r[1]), float(r[2])))
    return rows


def fit_expansion(data, P: int = 2, fix_slope: bool = True, *,
                  fit_tol: float = DEFAULT_FIT_TOL, spec_id: str = "") -> ExpansionFit:
    """Weighted least-squares fit of the expansion to a ladder.

    Parameters
    ----------
    data : sequence
        Rows ``(n, E_n)`` or ``(n, E_n, err)``; :class:`LadderRow` works.
    P : int
        Highest inverse power kept, ``0 <= P <= 4``.
    fix_slope : bool
        Pin the ``log(n+1)`` coefficient to ``2/pi`` instead of fitting it.
    fit_tol : float
        Fits with a larger maximum residual are returned with
        ``accepted=False``.

    Returns
    -------
    ExpansionFit
        Standard errors come from the weighted normal equations, inflated by
        the reduced chi-square when the model misfit exceeds the quadrature
        noise.

    Raises
    ------
    FitError
        Too few rows for ``P``, or the scaled design matrix has condition
        number above 1e12.
    """
    P = int(P)
    if not 0 <= P <= 4:
        raise FitError("P must be between 0 and 4 at double precision")
    rows = _as_rows(data)
    if len(rows) < P + 3:
        raise FitError(f"need at least {P + 3} ladder rows for P={P}, got {len(rows)}")
    ns = np.array([r[0] for r in rows], dtype=float)
    y = np.array([r[1] for r in rows])
    sigma = np.maximum(np.array([r[2] for r in rows]), SIGMA_FLOOR)
    n1 = ns + 1.0

    cols = [n1 ** (-p) for p in range(P + 1)]
    if fix_slope:
        rhs = y - KAC_SLOPE * np.log(n1)
    else:
        cols.insert(0, np.log(n1))
        rhs = y
    design = np.column_stack(cols) / sigma[:, None]
    rhs_w = rhs / sigma
    norms = np.linalg.norm(design, axis=0)
    scaled = design / norms
    cond = float(np.linalg.cond(scaled))
    if not cond <= COND_MAX:
        raise FitError(f"design matrix condition number {cond:.3g} exceeds {COND_MAX:g}; "
                       "shrink P or widen the ladder")
    coef_s, *_ = np.linalg.lstsq(scaled, rhs_w, rcond=None)
    coef = coef_s / norms

    resid = rhs - (design * sigma[:, None]) @ coef
    dof = len(rows) - len(coef)
    chi2 = float(np.sum((resid / sigma) ** 2))
    inflate = max(chi2 / dof, 1.0) if dof > 0 else 1.0
    cov_s = np.linalg.inv(scaled.T @ scaled) * inflate
    err = np.sqrt(np.diag(cov_s)) / norms

    if fix_slope:
        slope, slope_err, a, a_err = KAC_SLOPE, 0.0, coef, err
    else:
        slope, slope_err, a, a_err = coef[0], err[0], coef[1:], err[1:]
    resid_max = float(np.max(np.abs(resid)))
    return ExpansionFit(
        slope=float(slope),
        a=tuple(float(v) for v in a),
        resid_max=resid_max,
        cond=cond,
        ladder=tuple((int(n), float(v)) for n, v, _ in rows),
        stderr=tuple(float(v) for v in a_err),
        slope_stderr=float(slope_err),
        fixed_slope=bool(fix_slope),
        accepted=resid_max <= fit_tol,
        spec_id=spec_id,
        residuals=tuple(float(v) for v in resid),
    )


@dataclass(frozen=True)
class UniversalityReport:
    fits: dict[str, ExpansionFit]
    free_fits: dict[str, ExpansionFit]
    deltas: dict[tuple[str, str], float]

    @property
    def max_delta(self) -> float:
        return max(abs(d) for d in self.deltas.values())

    def slope_deviation(self) -> dict[str, float]:
        return {k: f.slope - KAC_SLOPE for k, f in self.free_fits.items()}

    def rows(self) -> list[dict]:
        """One flat record per measure, for CSV or JSON-lines output."""
        out = []
        for key, fit in self.fits.items():
            free = self.free_fits[key]
            out.append({
                "spec_id": key,
                "a0": fit.a[0],
                "a0_stderr": fit.stderr[0],
                "a1": fit.a[1] if len(fit.a) > 1 else float("nan"),
                "a1_stderr": fit.stderr[1] if len(fit.a) > 1 else float("nan"),
                "resid_max": fit.resid_max,
                "free_slope": free.slope,
                "free_slope_stderr": free.slope_stderr,
            })
        return out


def universality_report(specs, ns=None, P: int = 2, tol: float | None = None, cache=None,
                        workers: int | None = None) -> UniversalityReport:
    """Fit every measure on the same ladder and compare the constant terms.

    Each measure gets a fixed-slope fit (whose ``a[0]`` values are compared
    pairwise) and a free-slope fit used only for the slope check.
    """
    specs = list(specs)
    if len(specs) < 2:
        raise ValueError("a universality comparison needs at least two measures")
    fits, free = {}, {}
    for spec in specs:
        rows = ladder(spec, ns, tol, cache=cache, workers=workers)
        fits[spec.spec_id] = fit_expansion(rows, P, True, spec_id=spec.spec_id)
        free[spec.spec_id] = fit_expansion(rows, P, False, spec_id=spec.spec_id)
    deltas = {(a, b): fits[a].a[0] - fits[b].a[0] for a, b in itertools.combinations(fits, 2)}
    return UniversalityReport(fits, free, deltas)
