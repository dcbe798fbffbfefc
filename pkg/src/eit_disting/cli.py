"""Command-line front end: ``eit-disting {map,spectrum,matrix,eigenfunction,sweep,verify}``.

Output is CSV (default) or JSON.  Floats are written with 17 significant
digits; CSV files open with a ``#`` line naming the schema version.  Exit codes:
0 success, 1 failed verification, 2 invalid parameters, 3 non-convergence
under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, bounds, oracle
from .eigensolve import DEFAULT_N_MAX, DEFAULT_TOL, compute_spectrum, eigenfunction_trace, solve_matrix
from .errors import EITDistingError, InvalidParameterError
from .geometry import Inclusion, to_concentric
from .operator_matrix import MatrixKind, build, export_text, rotate_to_real

SCHEMA = "v1"

EXIT_OK, EXIT_VERIFY, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2, 3

_KINDS = {"dn": MatrixKind.DN_DIFF, "nd": MatrixKind.ND_DIFF, "nd_full": MatrixKind.ND_FULL}


def parse_center(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise argparse.ArgumentTypeError(f"center must be 're' or 're,im', got {text!r}")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _json_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g") if math.isfinite(value) else "null"
    if value is None:
        return "null"
    return json.dumps(str(value))


def render(rows: list[dict], columns: list[str], fmt: str, title: str) -> str:
    if fmt == "json":
        body = ",\n".join(
            "  {" + ", ".join(f"{json.dumps(c)}: {_json_value(r.get(c))}" for c in columns) + "}"
            for r in rows
        )
        return "[\n" + body + "\n]\n" if rows else "[]\n"
    lines = [f"# eit-disting {title} schema {SCHEMA}", ",".join(columns)]
    lines += [",".join(_fmt(r.get(c, "")) for c in columns) for r in rows]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get("EIT_DISTING_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _inclusion(args, contrast_required: bool = True) -> Inclusion:
    A = args.contrast if getattr(args, "contrast", None) is not None else 0.0
    if contrast_required and A == 0.0:
        raise InvalidParameterError("a nonzero --contrast is required")
    return Inclusion(args.center, args.radius, A)


# -- subcommands ---------------------------------------------------------------------------

def cmd_map(args) -> int:
    p = to_concentric(Inclusion(args.center, args.radius, 0.0))
    row = {"a_re": p.a.real, "a_im": p.a.imag, "rho": p.rho, "zeta": p.zeta, "r": p.r}
    _emit(render([row], list(row), args.format, "map"), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    inc = _inclusion(args)
    kind = _KINDS[args.kind]
    if args.truncation:
        rotated, _ = rotate_to_real(inc)
        vals, _vecs = solve_matrix(build(rotated, args.truncation, kind), args.top)
        N_used, converged = args.truncation, True
    else:
        res = compute_spectrum(inc, kind, args.top, args.tol, args.n_max)
        vals, N_used, converged = res.eigenvalues, res.N_used, res.converged
    columns = ["rank", "eigenvalue", "magnitude", "N_used", "converged"]
    extra = {}
    if args.verify:
        pw = oracle.power_norm(inc, kind)
        extra = {"oracle_norm": pw.estimate, "oracle_converged": pw.converged}
        columns += list(extra)
    rows = [dict(rank=i + 1, eigenvalue=v, magnitude=abs(v), N_used=N_used, converged=converged, **extra)
            for i, v in enumerate(vals)]
    _emit(render(rows, columns, args.format, "spectrum"), args.out)
    if args.strict and not converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_matrix(args) -> int:
    inc = _inclusion(args)
    kind = _KINDS[args.kind]
    N = args.truncation or 16
    matrix = build(inc, N, kind)
    text = export_text(matrix)
    status = EXIT_OK
    if args.verify:
        if kind.is_dn:
            reference = oracle.quadrature_dn_entries(inc, N)
        else:
            reference = oracle.quadrature_nd_entries(inc, N, kind)
        deviation = float(np.max(np.abs(reference - matrix.entries)))
        text = text.replace("# m n re im\n", f"# verify max_abs_diff={_fmt(deviation)}\n# m n re im\n", 1)
        if deviation > 1e-10:
            status = EXIT_VERIFY
    _emit(text, args.out)
    return status


def cmd_eigenfunction(args) -> int:
    inc = _inclusion(args)
    kind = _KINDS[args.kind]
    res = compute_spectrum(inc, kind, args.top, args.tol, args.n_max)
    trace = eigenfunction_trace(res, args.top - 1, args.grid)
    rows = [dict(theta=t, re=v.real, im=v.imag, abs=abs(v)) for t, v in zip(trace.theta_grid, trace.values)]
    _emit(render(rows, ["theta", "re", "im", "abs"], args.format, "eigenfunction"), args.out)
    if args.strict and not res.converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


@dataclass
class SweepConfig:
    study: str
    kind: MatrixKind
    radius: float
    contrast: float
    grid: list[float]
    top: int
    tol: float
    n_max: int
    threads: int
    output: str | None
    format: str

    @classmethod
    def from_args(cls, args) -> "SweepConfig":
        if args.step <= 0:
            raise InvalidParameterError("--step must be positive")
        count = int(math.floor((args.stop - args.start) / args.step + 1e-9)) + 1
        if count < 1:
            raise InvalidParameterError("empty sweep grid")
        grid = [round(args.start + i * args.step, 12) for i in range(count)]
        return cls(args.study, _KINDS[args.kind], args.radius, args.contrast, grid, args.top,
                   args.tol, args.n_max, _threads(args), args.out, args.format)


def run_sweep(cfg: SweepConfig) -> tuple[list[dict], list[str], bool]:
    if cfg.study == "bounds":
        reps = bounds.verify_bounds(cfg.radius, cfg.contrast, cfg.grid, cfg.kind, tol=cfg.tol,
                                    N_max=cfg.n_max, threads=cfg.threads)
        columns = ["rho", "center", "radius", "norm_concentric", "norm_inclusion", "ratio",
                   "lower", "upper", "in_bounds", "converged", "N_used"]
        rows = [dict(rho=r.rho, center=r.center.real, radius=r.radius, norm_concentric=r.norms[0],
                     norm_inclusion=r.norms[1], ratio=r.ratio, lower=r.lower, upper=r.upper,
                     in_bounds=r.in_bounds, converged=r.converged, N_used=r.N_used) for r in reps]
        return rows, columns, all(r.converged for r in reps)
    if cfg.study == "depth":
        reps = bounds.depth_profile(cfg.radius, cfg.contrast, cfg.grid, cfg.top, cfg.kind,
                                    cfg.tol, cfg.n_max, cfg.threads)
        columns = ["c", "rank", "eigenvalue", "magnitude", "converged", "N_used"]
        rows = [dict(c=r.c, rank=i + 1, eigenvalue=v, magnitude=abs(v), converged=r.converged, N_used=r.N_used)
                for r in reps for i, v in enumerate(r.eigenvalues)]
        return rows, columns, all(r.converged for r in reps)
    if cfg.study == "fixed-size":
        reps = bounds.verify_fixed_size(cfg.radius, cfg.contrast, cfg.grid, cfg.tol, cfg.n_max, cfg.threads)
        columns = ["c", "rho", "small_radius", "norm_concentric", "norm_small", "norm_fixed",
                   "bound", "in_bounds", "monotone", "converged"]
        rows = [dict(c=r.c, rho=r.rho, small_radius=r.small_radius, norm_concentric=r.norms[0],
                     norm_small=r.norms[1], norm_fixed=r.norms[2], bound=r.bound,
                     in_bounds=r.in_bounds, monotone=r.monotone, converged=r.converged) for r in reps]
        return rows, columns, all(r.converged for r in reps)
    raise InvalidParameterError(f"unknown study {cfg.study!r}")


def cmd_sweep(args) -> int:
    cfg = SweepConfig.from_args(args)
    rows, columns, converged = run_sweep(cfg)
    _emit(render(rows, columns, cfg.format, f"sweep-{cfg.study}"), cfg.output)
    if args.strict and not converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_verify(args) -> int:
    inc = _inclusion(args)
    checks = []
    dn = np.max(np.abs(oracle.quadrature_dn_entries(inc, 16) - build(inc, 16, MatrixKind.DN_DIFF).entries))
    checks.append(("dn_entries_vs_quadrature", dn, dn <= 1e-10))
    nd = np.max(np.abs(oracle.quadrature_nd_entries(inc, 12) - build(inc, 12, MatrixKind.ND_DIFF).entries))
    checks.append(("nd_entries_vs_quadrature", nd, nd <= 1e-10))
    for kind in (MatrixKind.DN_DIFF, MatrixKind.ND_DIFF):
        res = compute_spectrum(inc, kind, 1, args.tol, args.n_max)
        matrix_norm = abs(res.eigenvalues[0])
        pw = oracle.power_norm(inc, kind)
        rel = abs(pw.estimate - matrix_norm) / matrix_norm
        checks.append((f"{kind.value}_norm_vs_power_iteration", rel, rel <= 1e-6 and pw.converged))
    rows = [dict(check=name, value=float(v), passed=bool(ok)) for name, v, ok in checks]
    _emit(render(rows, ["check", "value", "passed"], args.format, "verify"), args.out)
    return EXIT_OK if all(ok for _, _, ok in checks) else EXIT_VERIFY


# -- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eit-disting", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, contrast=True, kinds=("dn", "nd")):
        p.add_argument("--center", type=parse_center, required=True, help="'re' or 're,im'")
        p.add_argument("--radius", type=float, required=True)
        if contrast:
            p.add_argument("--contrast", type=float, default=2.0)
            p.add_argument("--kind", choices=kinds, default="dn")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    def solver(p):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
        p.add_argument("--strict", action="store_true", help="exit 3 on non-convergence")

    p = sub.add_parser("map", help="Moebius parameter and concentric radius of an inclusion")
    common(p, contrast=False)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("spectrum", help="leading eigenvalues of the boundary-map difference")
    common(p)
    solver(p)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--truncation", type=int, default=None, help="fixed N instead of adaptive")
    p.add_argument("--verify", action="store_true", help="append the power-iteration norm")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("matrix", help="export the truncated matrix")
    common(p, kinds=("dn", "nd", "nd_full"))
    p.add_argument("--truncation", type=int, default=16)
    p.add_argument("--verify", action="store_true", help="compare against quadrature")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("eigenfunction", help="boundary trace of an eigenfunction")
    common(p)
    solver(p)
    p.add_argument("--top", type=int, default=1, help="1-based eigenfunction index")
    p.add_argument("--grid", type=int, default=1024)
    p.set_defaults(func=cmd_eigenfunction)

    p = sub.add_parser("sweep", help="parameter sweeps behind the bound and depth studies")
    p.add_argument("--study", choices=("bounds", "depth", "fixed-size"), default="bounds")
    p.add_argument("--kind", choices=("dn", "nd"), default="dn")
    p.add_argument("--radius", type=float, required=True,
                   help="concentric r (bounds, fixed-size) or ball radius R (depth)")
    p.add_argument("--contrast", type=float, default=2.0)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=0.95)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    solver(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="cross-check matrices and norms against the quadrature oracle")
    common(p, kinds=("dn", "nd"))
    solver(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EITDistingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
