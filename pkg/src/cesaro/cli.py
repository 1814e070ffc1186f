"""Command-line front end: verification suites and parameter sweeps.

Every subcommand writes a JSON document whose ``timestamp`` field holds the
only run-dependent data (generation time and wall times), so two runs with
the same configuration produce identical JSON outside that field.  Sweeps also
write a CSV (header row, one row per grid point or trial); ``spectrum``
additionally writes an SVG heat map.

Exit codes: 0 success, 1 failed check, 2 malformed configuration.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import kt as _kt
from . import model as _md
from . import ops as _ops
from . import subspace as _sb
from .cache import CACHE_ENV, ArrayCache
from .report import dumps, jsonable
from .suites import SUITES, SuiteConfig, run_suite

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """Malformed command-line configuration."""


# argument helpers -------------------------------------------------------------------------------

def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _range(text: str):
    """'lo:hi:count' -> (lo, hi, count)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected lo:hi:count")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
    return lo, hi, n


def _atom(text: str):
    """'xi:weight' with xi a unimodular complex number."""
    if ":" not in text:
        raise argparse.ArgumentTypeError("expected xi:weight")
    xi, w = text.rsplit(":", 1)
    try:
        return _complex(xi), float(w)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad atom {text!r}") from exc


def _radial(text: str):
    """'radius:count' for a count x count Cartesian grid clipped to |w| <= radius."""
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected radius:count")
    try:
        return float(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="coefficient order override")
    common.add_argument("--grid", type=int, default=None, help="boundary grid size (power of two)")
    common.add_argument("--seed", type=int, default=0, help="base seed for all random streams")
    common.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiplier applied to upper-bound tolerances")
    common.add_argument("--out", default=None,
                        help="output path (verify: JSON file; sweeps: file prefix)")
    common.add_argument("--cache-dir", default=None,
                        help=f"array cache directory (default: ${CACHE_ENV}, else no cache)")
    common.add_argument("--suite", choices=SUITES, default="all", help="suite selector (verify)")

    p = argparse.ArgumentParser(prog="cesaro", description=__doc__.split("\n")[0],
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--alpha", type=float, default=1.0, help="atom weight of u_alpha")
    v.add_argument("--neg-control", type=_complex, default=-1.0,
                   help="atom location of the non-invariant control")

    s = sub.add_parser("spectrum", parents=[common], help="smallest singular values of C_N - lambda")
    s.add_argument("--re", type=_range, default=(-0.5, 2.5, 31), help="lo:hi:count")
    s.add_argument("--im", type=_range, default=(-1.5, 1.5, 31), help="lo:hi:count")

    c = sub.add_parser("cyclic", parents=[common], help="Krylov principal angles for g_alpha")
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--krylov", type=int, default=64, help="largest Krylov dimension")
    c.add_argument("--points", type=int, default=30, help="number of kernel sample points")
    c.add_argument("--radius", type=float, default=0.9, help="radius of the sample disk")

    i = sub.add_parser("invariance", parents=[common], help="model-space invariance residuals")
    i.add_argument("--atom", type=_atom, action="append", default=[], help="xi:weight (repeatable)")
    i.add_argument("--zero", type=_complex, action="append", default=[],
                   help="Blaschke zero (repeatable)")
    i.add_argument("--trials", type=int, default=20)
    i.add_argument("--sampler", choices=("smooth", "white"), default="smooth")

    k = sub.add_parser("kt", parents=[common], help="U_alpha sweep over a disk grid")
    k.add_argument("--ualpha", type=float, default=1.0, help="alpha of U_alpha")
    k.add_argument("--wgrid", type=_radial, default=(0.8, 33), help="radius:count")

    b = sub.add_parser("subspace", parents=[common], help="power-log span and b_r classifier")
    b.add_argument("--mu", type=_complex, default=0.5)
    b.add_argument("--k", type=int, default=1, help="largest log power")
    b.add_argument("--lambda-k", type=int, default=1, help="use Lambda_k = {k + 3n : n >= 1}")
    b.add_argument("--a", type=float, default=0.45, help="a in b_r")
    return p


# output helpers -----------------------------------------------------------------------------------

def _timestamp(wall: dict) -> dict:
    now = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {"generated_at": now, "wall_time": wall}


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _emit_json(doc: dict, out: str | None, suffix: str = "") -> None:
    text = dumps(doc) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        _write_text(Path(out + suffix) if suffix else Path(out), text)


def _prefix(args, default: str) -> str:
    return args.out if args.out else default


# subcommands --------------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    try:
        cfg = SuiteConfig(suite=args.suite, n=args.n, grid=args.grid, seed=args.seed,
                          tol_scale=args.tol_scale, out=args.out,
                          cache_dir=args.cache_dir or os.environ.get(CACHE_ENV),
                          alpha=args.alpha, neg_control=args.neg_control)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t0 = time.perf_counter()
    reports = run_suite(cfg)
    total = time.perf_counter() - t0
    for r in reports:
        print(r.line(), file=sys.stderr)
    failed = [r.name for r in reports if not r.passed]
    doc = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "config": {"n": cfg.n, "grid": cfg.grid, "tol_scale": cfg.tol_scale, "alpha": cfg.alpha,
                   "neg_control": cfg.neg_control},
        "checks": [r.to_dict() for r in reports],
        "summary": {"total": len(reports), "passed": len(reports) - len(failed),
                    "failed": len(failed), "failed_checks": failed},
        "timestamp": _timestamp({"total": total, "checks": {r.name: r.wall_time for r in reports}}),
    }
    _emit_json(doc, cfg.out)
    return EXIT_FAIL if failed else EXIT_OK


def _axis(spec, what):
    lo, hi, n = spec
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or (n > 1 and hi <= lo):
        raise ConfigError(f"bad {what} range {spec}")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def cmd_spectrum(args) -> int:
    N = args.n or 256
    if N < 1:
        raise ConfigError("--n must be positive")
    xs, ys = _axis(args.re, "--re"), _axis(args.im, "--im")
    t0 = time.perf_counter()
    rows = []
    for y in ys:
        for x in xs:
            try:
                s = _ops.smin_resolvent(complex(x, y), N)
            except _ops.SingularSystemError:
                s = 0.0
            rows.append((x, y, s))
    prefix = _prefix(args, "spectrum")
    _write_csv(Path(prefix + ".csv"), ["re", "im", "smin"], rows)
    _write_text(Path(prefix + ".svg"), spectrum_svg(xs, ys, np.array([r[2] for r in rows])))
    sm = np.array([r[2] for r in rows])
    doc = {"command": "spectrum", "seed": _ops.POWER_SEED,
           "params": {"N": N, "re": list(args.re), "im": list(args.im)},
           "summary": {"min_smin": float(sm.min()), "max_smin": float(sm.max()),
                       "points": len(rows)},
           "timestamp": _timestamp({"total": time.perf_counter() - t0})}
    _emit_json(doc, prefix, ".json")
    return EXIT_OK


def _colour(t: float) -> str:
    # dark blue -> teal -> yellow, t in [0, 1]
    stops = [(0.0, (38, 20, 90)), (0.5, (32, 146, 140)), (1.0, (250, 230, 35))]
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(stops[:-1], stops[1:]):
        if t <= t1:
            f = (t - t0) / (t1 - t0)
            return "#%02x%02x%02x" % tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
    return "#%02x%02x%02x" % stops[-1][1]


def spectrum_svg(xs, ys, smin, size: int = 480) -> str:
    """Self-contained SVG heat map of log10 smin with the circle |z - 1| = 1 overlaid."""
    nx, ny = len(xs), len(ys)
    dx = (xs[-1] - xs[0]) / (nx - 1) if nx > 1 else 1.0
    dy = (ys[-1] - ys[0]) / (ny - 1) if ny > 1 else 1.0
    x0, x1 = xs[0] - dx / 2, xs[-1] + dx / 2
    y0, y1 = ys[0] - dy / 2, ys[-1] + dy / 2
    sx, sy = size / (x1 - x0), size / (y1 - y0)
    logs = np.log10(np.maximum(np.asarray(smin, dtype=float), 1e-16))
    lo, hi = float(logs.min()), float(logs.max())
    span = hi - lo if hi > lo else 1.0
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 40}" '
             f'viewBox="0 0 {size} {size + 40}">',
             "<title>log10 smallest singular value of C_N - lambda</title>"]
    k = 0
    for y in ys:
        for x in xs:
            px, py = (x - dx / 2 - x0) * sx, (y1 - (y + dy / 2)) * sy
            c = _colour((logs[k] - lo) / span)
            parts.append(f'<rect x="{px:.2f}" y="{py:.2f}" width="{dx * sx + 0.5:.2f}" '
                         f'height="{dy * sy + 0.5:.2f}" fill="{c}"/>')
            k += 1
    cx, cy = (1.0 - x0) * sx, (y1 - 0.0) * sy
    parts.append(f'<ellipse cx="{cx:.2f}" cy="{cy:.2f}" rx="{sx:.2f}" ry="{sy:.2f}" fill="none" '
                 'stroke="white" stroke-width="2"/>')
    parts.append(f'<text x="4" y="{size + 16}" font-size="12" font-family="sans-serif">'
                 f'log10 smin from {lo:.2f} (dark) to {hi:.2f} (light); '
                 f're [{x0:.2f}, {x1:.2f}], im [{y0:.2f}, {y1:.2f}]</text>')
    parts.append(f'<text x="4" y="{size + 32}" font-size="12" font-family="sans-serif">'
                 "white curve: |z - 1| = 1</text>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_cyclic(args) -> int:
    if args.krylov < 1 or args.points < 1 or not 0 < args.radius < 1 or not args.alpha > 0:
        raise ConfigError("need --krylov >= 1, --points >= 1, 0 < --radius < 1, --alpha > 0")
    N = args.n or 4096
    spec = _md.InnerFunctionSpec.u_alpha(args.alpha)
    g = _md.g_alpha(args.alpha, N)
    pts = _md.sobol_disk_points(args.points, args.radius)
    cache = ArrayCache.from_env(args.cache_dir)
    ms = sorted({1, *[2**j for j in range(int(math.log2(args.krylov)) + 1)], args.krylov})
    t0 = time.perf_counter()
    rows = []
    for m in ms:
        ang = _md.krylov_angles(g, m, spec, pts, cache=cache)
        rows.append((m, float(ang[-1]), float(ang[0]), ang.size))
    prefix = _prefix(args, "cyclic")
    _write_csv(Path(prefix + ".csv"), ["m", "largest_angle", "smallest_angle", "kernel_rank"], rows)
    doc = {"command": "cyclic", "seed": args.seed,
           "params": {"alpha": args.alpha, "N": N, "krylov": args.krylov, "points": args.points,
                      "radius": args.radius},
           "summary": {"largest_angle": {str(r[0]): r[1] for r in rows}, "kernel_rank": rows[0][3]},
           "timestamp": _timestamp({"total": time.perf_counter() - t0})}
    _emit_json(doc, prefix, ".json")
    return EXIT_OK


def cmd_invariance(args) -> int:
    try:
        spec = _md.InnerFunctionSpec(blaschke_zeros=tuple((z, 1) for z in args.zero),
                                     atoms=tuple(args.atom))
        grid = _md.BoundaryGrid(args.grid or 2**14)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    N = args.n or 512
    if args.trials < 1 or N > grid.M // 4:
        raise ConfigError("need --trials >= 1 and --n <= grid/4")
    t0 = time.perf_counter()
    st = _md.invariance_residual(spec, args.trials, N, grid, args.seed, args.sampler)
    prefix = _prefix(args, "invariance")
    _write_csv(Path(prefix + ".csv"), ["trial", "residual"], enumerate(st["residuals"].tolist()))
    doc = {"command": "invariance", "seed": args.seed,
           "params": {"spec": repr(spec), "N": N, "M": grid.M, "trials": args.trials,
                      "sampler": args.sampler},
           "summary": {"median": st["median"], "max": st["max"]},
           "timestamp": _timestamp({"total": time.perf_counter() - t0})}
    _emit_json(doc, prefix, ".json")
    return EXIT_OK


def cmd_kt(args) -> int:
    R, n = args.wgrid
    if not 0 < R < 1 or n < 1 or not args.ualpha > 0:
        raise ConfigError("need 0 < radius < 1, count >= 1 and --ualpha > 0")
    axis = np.linspace(-R, R, n)
    t0 = time.perf_counter()
    rows = []
    for y in axis:
        for x in axis:
            w = complex(x, y)
            if abs(w) <= R:
                u = _kt.U_alpha(args.ualpha, w)
                rows.append((x, y, u.real, u.imag, abs(u)))
    prefix = _prefix(args, "kt")
    _write_csv(Path(prefix + ".csv"), ["re", "im", "U_re", "U_im", "U_abs"], rows)
    absu = np.array([r[4] for r in rows])
    j = int(np.argmin(absu))
    doc = {"command": "kt", "seed": args.seed,
           "params": {"alpha": args.ualpha, "radius": R, "count": n},
           "summary": {"points": len(rows), "min_abs": float(absu[j]),
                       "argmin": [rows[j][0], rows[j][1]]},
           "timestamp": _timestamp({"total": time.perf_counter() - t0})}
    _emit_json(doc, prefix, ".json")
    return EXIT_OK if absu[j] > 0 else EXIT_FAIL


def cmd_subspace(args) -> int:
    if args.k < 0 or not args.a > 0 or not complex(args.mu).real > -0.5:
        raise ConfigError("need --k >= 0, --a > 0 and Re --mu > -1/2")
    N = args.n or 10**5
    t0 = time.perf_counter()
    basis = _sb.SubspaceBasis.powerlog(args.mu, args.k, N)
    span = _sb.invariance_residual_span(basis, decay_exponent=1.0 + complex(args.mu).real)
    verdict = _sb.classify_density(_sb.LambdaSequence.chain(args.lambda_k), args.a)
    prefix = _prefix(args, "subspace")
    _write_csv(Path(prefix + ".csv"), ["r", "b_r"], zip(verdict.r_values, verdict.b_r))
    doc = {"command": "subspace", "seed": args.seed,
           "params": {"mu": args.mu, "k": args.k, "N": N, "lambda_k": args.lambda_k, "a": args.a},
           "summary": {"span_residual": span["residual"], "tolerance": span["tolerance"],
                       "representation": jsonable(span["representation"]),
                       "closed_form": jsonable(_sb.cstar_jordan_matrix(args.mu, args.k)),
                       "b_r_slope": verdict.slope, "behaviour": verdict.behaviour,
                       "verdict": verdict.verdict},
           "timestamp": _timestamp({"total": time.perf_counter() - t0})}
    _emit_json(doc, prefix, ".json")
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "spectrum": cmd_spectrum, "cyclic": cmd_cyclic,
            "invariance": cmd_invariance, "kt": cmd_kt, "subspace": cmd_subspace}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"cesaro {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
