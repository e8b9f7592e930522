"""Command-line front end.

Every subcommand writes plain records: CSV with a header row, or JSON with one
object per line.  Errors are reported as a single ``opuc-zeros: <kind>: <msg>``
line on stderr with exit status 2 (usage) or 3 (numerical failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import expect, fit, intensity, mc, measure, special, szego
from .opuc import OpucBasis
from .quadrature import QuadratureError

PROG = "opuc-zeros"
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
DEFAULT_CACHE = "opuc_zeros_results.jsonl"

_DEFAULT_FORMAT = {
    "density": "csv",
    "expect": "csv",
    "mc": "json",
    "fit": "json",
    "universality": "csv",
    "a0": "json",
    "szego": "json",
    "verblunsky": "json",
}
_UNIVERSALITY_DEFAULT = ("lebesgue", "geronimus:0.3", "bernstein-szego:0.5")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def parse_ns(text: str) -> list[int]:
    """``16,32,64`` or ``16:4096:geometric`` (ratio 2)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or parts[2] != "geometric":
            raise UsageError(f"bad ladder {text!r}; expected a:b:geometric")
        try:
            return fit.geometric_ladder(int(parts[0]), int(parts[1]))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad degree list {text!r}") from exc


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment.  Keys match long flags."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file supplying defaults for any flag")
    common.add_argument("--measure", action="append",
                        help="family:param1,param2 (lebesgue, geronimus:a, bernstein-szego:a, "
                             "trig-poly:c1,c2,..., verblunsky:a0,a1,...); "
                             "repeat for universality")
    common.add_argument("--n", type=int, help="polynomial degree")
    common.add_argument("--ns", help="degree ladder, comma list or a:b:geometric")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count (default 10000)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (default 0)")
    common.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    common.add_argument("--order", type=int,
                        help="expansion order P (fit, universality: default 2; szego: default 4)")
    common.add_argument("--grid", type=int,
                        help="density: number of x points (default 201); szego: FFT grid size")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = _Parser(prog=PROG, description="Expected real zeros of random OPUC polynomials.")
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("density", parents=[common], help="real-zero intensity on a grid")
    p.add_argument("--xmin", type=float, help="left end of the grid (default -2)")
    p.add_argument("--xmax", type=float, help="right end of the grid (default 2)")
    p.add_argument("--method", choices=("blaschke", "kernel"), help="evaluation path")

    sub.add_parser("expect", parents=[common], help="E_n by quadrature")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo real-zero counts")
    p.add_argument("--im-tol", type=float, help="imaginary-part threshold (default 1e-8)")
    p.add_argument("--method", choices=mc.METHODS, help="root counter (default comrade)")

    p = sub.add_parser("fit", parents=[common], help="fit the large-n expansion to a ladder")
    p.add_argument("--free-slope", action="store_true", help="fit the log(n+1) coefficient too")
    p.add_argument("--cache", help=f"results file (default ${fit.CACHE_ENV} or ./{DEFAULT_CACHE})")

    p = sub.add_parser("universality", parents=[common], help="compare A_0 across measures")
    p.add_argument("--cache", help=f"results file (default ${fit.CACHE_ENV} or ./{DEFAULT_CACHE})")

    sub.add_parser("a0", parents=[common], help="universal constant A_0")

    sub.add_parser("szego", parents=[common], help="Szego and scattering data")

    p = sub.add_parser("verblunsky", parents=[common], help="Verblunsky coefficients")
    p.add_argument("--m", type=int, help="number of coefficients (default 8)")
    return parser


def _merge_config(args):
    if not args.config:
        return args
    try:
        cfg = read_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    known = vars(args)
    for key, value in cfg.items():
        if key not in known or key in ("config", "subcommand"):
            raise UsageError(f"unknown config key {key!r}")
        if known[key] not in (None, False):
            continue  # flags win over the file
        if key == "measure":
            known[key] = [v.strip() for v in value.split(";") if v.strip()]
        elif key in ("n", "samples", "seed", "order", "grid", "m"):
            known[key] = int(value)
        elif key in ("tol", "xmin", "xmax", "im_tol"):
            known[key] = float(value)
        elif key == "free_slope":
            known[key] = value.lower() in ("1", "true", "yes")
        else:
            known[key] = value
    return args


def _single_measure(args):
    texts = args.measure or ["lebesgue"]
    if len(texts) != 1:
        raise UsageError(f"{args.subcommand} takes exactly one --measure")
    return measure.parse_measure(texts[0])


def _degrees(args, default=None):
    if args.n is not None and args.ns is not None:
        raise UsageError("--n and --ns are mutually exclusive")
    if args.ns is not None:
        ns = parse_ns(args.ns)
    elif args.n is not None:
        ns = [args.n]
    elif default is not None:
        ns = list(default)
    else:
        raise UsageError(f"{args.subcommand} needs --n or --ns")
    if not ns or min(ns) < 1:
        raise UsageError("degrees must be positive")
    return ns


def _positive(name, value):
    if value is not None and not value > 0:
        raise UsageError(f"--{name} must be positive")


def _csv_text(records) -> str:
    buf = io.StringIO()
    if records:
        w = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return buf.getvalue()


def _json_text(records) -> str:
    return "".join(json.dumps(rec) + "\n" for rec in records)


def _emit(records, fmt):
    return _csv_text(records) if fmt == "csv" else _json_text(records)


def _cache(args):
    if args.cache:
        return args.cache
    return os.environ.get(fit.CACHE_ENV) or DEFAULT_CACHE


def cmd_density(args, fmt):
    spec = _single_measure(args)
    if args.n is None or args.ns is not None:
        raise UsageError("density needs a single --n")
    xmin = -2.0 if args.xmin is None else args.xmin
    xmax = 2.0 if args.xmax is None else args.xmax
    points = 201 if args.grid is None else args.grid
    if not xmin < xmax or points < 2:
        raise UsageError("need xmin < xmax and --grid >= 2")
    basis = OpucBasis.from_spec(spec, args.n)
    grid = intensity.density_grid(basis, args.n, np.linspace(xmin, xmax, points),
                                  args.method or "blaschke")
    if fmt == "csv":
        return grid.to_csv()
    return _json_text([{"x": float(x), "rho": float(r), "method": grid.method, "n": grid.n}
                       for x, r in zip(grid.xs, grid.rho)])


def cmd_expect(args, fmt):
    spec = _single_measure(args)
    ns = _degrees(args)
    if args.tol is not None and args.tol < 1e-12:
        raise UsageError("--tol below 1e-12 is not attainable")
    rows = [r.as_row() for r in expect.expect_many(spec, ns, args.tol)]
    return _emit(rows, fmt)


def cmd_mc(args, fmt):
    spec = _single_measure(args)
    if args.n is None or args.ns is not None:
        raise UsageError("mc needs a single --n")
    try:
        cfg = mc.McConfig(
            n=args.n,
            samples=10000 if args.samples is None else args.samples,
            seed=0 if args.seed is None else args.seed,
            im_tol=1e-8 if args.im_tol is None else args.im_tol,
            method=args.method or "comrade",
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    stats = mc.run_mc(spec, cfg)
    if fmt == "csv":
        return _csv_text([{"count": k, "frequency": v} for k, v in stats.histogram.items()])
    return stats.to_json() + "\n"


def cmd_fit(args, fmt):
    spec = _single_measure(args)
    ns = _degrees(args, fit.default_ladder())
    P = 2 if args.order is None else args.order
    rows = fit.ladder(spec, ns, args.tol, cache=_cache(args))
    result = fit.fit_expansion(rows, P, not args.free_slope, spec_id=spec.spec_id)
    if fmt == "csv":
        recs = [{"p": p, "a": v, "stderr": e} for p, (v, e) in enumerate(zip(result.a, result.stderr))]
        return _csv_text(recs)
    return result.to_json() + "\n"


def cmd_universality(args, fmt):
    specs = [measure.parse_measure(t) for t in (args.measure or _UNIVERSALITY_DEFAULT)]
    if len(specs) < 2:
        raise UsageError("universality needs at least two --measure flags")
    ns = _degrees(args, fit.default_ladder())
    P = 2 if args.order is None else args.order
    report = fit.universality_report(specs, ns, P, args.tol, cache=_cache(args))
    rows = report.rows()
    if fmt == "csv":
        return _csv_text(rows)
    summary = {"max_delta_a0": report.max_delta,
               "deltas": {f"{a}|{b}": d for (a, b), d in report.deltas.items()}}
    return _json_text(rows + [summary])


def cmd_a0(args, fmt):
    res = special.a0_estimate()
    rec = {"a0": res.value, "err": res.error}
    if args.order is not None:
        if not 1 <= args.order <= special.P_MAX:
            raise UsageError(f"--order must be between 1 and {special.P_MAX}")
        rec["h"] = [special.h_constant(p) for p in range(1, args.order + 1)]
    if fmt == "csv":
        rec.pop("h", None)
    return _emit([rec], fmt)


def cmd_szego(args, fmt):
    spec = _single_measure(args)
    P = 4 if args.order is None else args.order
    if not 1 <= P <= szego.P_RESOLVABLE:
        raise UsageError(f"--order must be between 1 and {szego.P_RESOLVABLE}")
    func = szego.szego_from_weight(spec, grid_size=args.grid)
    exp = szego.scattering_expansion(func, P)
    rec = {"spec_id": spec.spec_id, "tau": func.tau, "rho": func.rho,
           "ell": [float(v) for v in func.ell[: P + 1]],
           "s": [float(v) for v in exp.s], "c": [float(v) for v in exp.c]}
    if fmt == "csv":
        return _csv_text([{"p": p + 1, "s": float(exp.s[p]), "c": float(exp.c[p])}
                          for p in range(exp.P)])
    return _json_text([rec])


def cmd_verblunsky(args, fmt):
    spec = _single_measure(args)
    M = 8 if args.m is None else args.m
    if M < 1:
        raise UsageError("--m must be at least 1")
    seq = measure.verblunsky(spec, M)
    alphas = [float(a) for a in seq.alphas]
    if fmt == "csv":
        return _csv_text([{"m": m, "alpha": a} for m, a in enumerate(alphas)])
    return _json_text([{"spec_id": spec.spec_id, "source": seq.source, "alphas": alphas}])


_COMMANDS = {
    "density": cmd_density,
    "expect": cmd_expect,
    "mc": cmd_mc,
    "fit": cmd_fit,
    "universality": cmd_universality,
    "a0": cmd_a0,
    "szego": cmd_szego,
    "verblunsky": cmd_verblunsky,
}


def _fail(kind, message, code):
    text = " ".join(str(message).split())
    print(f"{PROG}: {kind}: {text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    """Parse ``argv``, run one subcommand and return the exit status."""
    parser = build_parser()
    try:
        args = _merge_config(parser.parse_args(argv))
        _positive("samples", args.samples)
        _positive("tol", args.tol)
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        fmt = args.format or _DEFAULT_FORMAT[args.subcommand]
        text = _COMMANDS[args.subcommand](args, fmt)
    except UsageError as exc:
        return _fail("usage-error", exc, EXIT_USAGE)
    except measure.MeasureError as exc:
        return _fail("usage-error", exc, EXIT_USAGE)
    except (QuadratureError, ArithmeticError, fit.FitError, np.linalg.LinAlgError) as exc:
        return _fail("numerical-error", exc, EXIT_NUMERIC)
    except ValueError as exc:
        return _fail("usage-error", exc, EXIT_USAGE)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
