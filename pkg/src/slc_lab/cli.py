"""Command-line front end: ``slc-lab {curv,bounds,solve,foliate,kp,verify}``.

Exit status: 0 on success, 1 when ``verify`` reports failures, 2 on domain
or configuration errors, 3 when a solver does not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, barriers, symcurv
from .config import RunConfig, load_config, validate
from .errors import ConvergenceError, DomainError
from .symcurv import TOLERANCES, AngleParams

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3


def fmt_num(x) -> str:
    """Twelve significant digits, keeping trailing zeros."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:#.12g}"


def _round(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not math.isfinite(x) else float(f"{x:.12g}")
    return obj


def header(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "tolerances": dict(TOLERANCES),
        "version": __version__,
    }


def render(cfg: RunConfig, columns: list[str], rows: list[dict], extra: dict | None = None) -> str:
    head = header(cfg)
    if cfg.format == "json":
        doc = {"header": head, "columns": columns, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_round(doc), indent=2, sort_keys=True, allow_nan=True) + "\n"
    buf = io.StringIO()
    for key in ("command", "config_sha256", "seed", "version"):
        buf.write(f"# {key}: {head[key]}\n")
    tols = ", ".join(f"{k}={fmt_num(v)}" for k, v in head["tolerances"].items())
    buf.write(f"# tolerances: {tols}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_num(row[c]) if not isinstance(row[c], str) else row[c] for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def parse_matrix(spec) -> np.ndarray:
    """'diag:2,0.5', 'rows:2,0;0,0.5' or a nested list."""
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    kind, _, body = str(spec).partition(":")
    try:
        if kind == "diag":
            return np.diag([float(v) for v in body.split(",")])
        if kind == "rows":
            return np.array([[float(v) for v in row.split(",")] for row in body.split(";")])
    except ValueError:
        raise DomainError(f"cannot parse matrix entries in {spec!r}") from None
    raise DomainError(f"matrix must look like diag:a,b,... or rows:a,b;c,d, got {spec!r}")


def cmd_curv(cfg: RunConfig):
    P = cfg.params
    A = parse_matrix(P["matrix"])
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"matrix must be square, got shape {A.shape}")
    p = AngleParams(float(P["theta"]), A.shape[0])
    mode = P["mode"]
    if mode == "r":
        value = symcurv.r_theta(A, p)
    elif mode == "arctan":
        value = symcurv.arctan_matrix(A)
    else:
        if P["r"] is None:
            raise DomainError(f"curv mode {mode} needs r")
        value = symcurv.sl_r(A, P["r"]) if mode == "sl" else symcurv.zeroth_coeff(A, P["r"])
    return ["value"], [{"value": value}], None, EXIT_OK


def cmd_bounds(cfg: RunConfig):
    P = cfg.params
    p = AngleParams(float(P["theta"]), P["n"])
    row = barriers.bound_report(p, float(P["r"])).as_row()
    return list(row), [row], None, EXIT_OK


def _make_grid(P: dict):
    from .graphsolve.grids import FuchsianGrid, PolarGrid, RadialGrid

    if P["mode"] == "FuchsianConstant":
        return FuchsianGrid(P["n"])
    if P["mode"] == "RotSymProfile":
        return RadialGrid(P["n"], float(P["h"]), P["rings"])
    if P["n"] != 2:
        raise DomainError("Disk2D mode is two-dimensional; use n = 2")
    return PolarGrid(float(P["h"]), P["rings"], P["angles"])


def cmd_solve(cfg: RunConfig):
    from .foliation import initial_guess
    from .graphsolve import GraphField, SolverConfig, curvature_field, newton_solve, perron_solve
    from .graphsolve.perron import perron_start
    from .graphsolve.grids import FuchsianGrid, PolarGrid

    P = cfg.params
    p = AngleParams(float(P["theta"]), P["n"])
    r = float(P["r"])
    scfg = SolverConfig(
        p.theta,
        r,
        n=p.n,
        newton_tol=float(P["newton_tol"]),
        max_iter=P["max_iter"],
        damping=float(P["damping"]),
        jacobian=P["jacobian"],
        h=float(P["h"]),
        rings=P["rings"],
        angles=P["angles"],
    )
    grid = _make_grid(P)
    level = P["boundary"] if P["boundary"] is not None else 0.9 * barriers.dist_upper(p, r)
    if isinstance(grid, FuchsianGrid):
        u0 = np.full(1, float(level))
    else:
        b = np.full(grid.size, float(level))
        if isinstance(grid, PolarGrid):
            b = b * (1.0 + float(P["ripple"]) * np.cos(2.0 * grid.phi))
        u0 = np.where(grid.interior, initial_guess(grid, b, p, r), b)
    if P["method"] == "perron":
        if P["mode"] != "RotSymProfile":
            raise DomainError("Perron iteration is available in RotSymProfile mode only")
        G, rep = perron_solve(perron_start(grid, scfg, float(level)), scfg)
    else:
        G, rep = newton_solve(GraphField(grid, u0), scfg)
    R = curvature_field(G, p)
    names = list(grid.coord_names())
    coords = np.asarray(grid.coords(), dtype=float).reshape(grid.size, -1)
    rows = []
    for k in range(grid.size):
        row = {name: coords[k, j] for j, name in enumerate(names)}
        row.update({"u": G.u[k], "r": R[k]})
        rows.append(row)
    extra = {
        "mode": grid.mode,
        "theta": p.theta,
        "r": r,
        "grid": grid.spec(),
        "heights": G.u.tolist(),
        "report": rep.to_json(),
    }
    return names + ["u", "r"], rows, extra, EXIT_OK


def cmd_foliate(cfg: RunConfig):
    from .foliation import sweep
    from .graphsolve import SolverConfig

    P = cfg.params
    p = AngleParams(float(P["theta"]), P["n"])
    scfg = SolverConfig(
        p.theta,
        p.threshold * 10.0,
        n=p.n,
        newton_tol=float(P["newton_tol"]),
        h=float(P["h"]),
        rings=P["rings"],
        angles=P["angles"],
    )
    S = sweep(scfg, P["r_values"], grid=_make_grid(P))
    cols = ["r", "theta", "max_height", "min_height", "dist_upper", "coverage_depth", "converged"]
    extra = {"truncated": S.truncated, "message": S.message}
    return cols, S.rows(), extra, EXIT_CONVERGENCE if S.truncated else EXIT_OK


def cmd_kp(cfg: RunConfig):
    from .kpmetric import KPSampler, domain_from_json, kp_metric

    P = cfg.params
    D = domain_from_json(P["domain"])
    sampler = KPSampler(P["random"], P["directions"], P["steps"], cfg.seed)
    n = D.n
    cols = [f"q{i}" for i in range(n)]
    cols += [f"g{i}{j}" for i in range(n) for j in range(n)]
    cols += ["factor", "lower", "upper"] + [f"c{i}" for i in range(n + 1)] + ["radius"]
    rows = []
    for q in P["points"]:
        q = np.asarray(q, dtype=float).reshape(-1)
        if q.size != n:
            raise DomainError(f"point {q.tolist()} has {q.size} coordinates, domain needs {n}")
        res = kp_metric(D, q, sampler)
        row = {f"q{i}": q[i] for i in range(n)}
        row.update({f"g{i}{j}": res.tensor[i, j] for i in range(n) for j in range(n)})
        row.update({"factor": res.factor, "lower": res.bracket[0], "upper": res.bracket[1]})
        row.update({f"c{i}": res.ball.center[i] for i in range(n + 1)})
        row["radius"] = res.ball.radius
        rows.append(row)
    return cols, rows, None, EXIT_OK


def cmd_verify(cfg: RunConfig):
    from .verify import run_all

    checks = run_all(cfg.seed)
    rows = [{"check": c.name, "passed": bool(c.passed), "detail": c.detail} for c in checks]
    failed = sum(not c.passed for c in checks)
    return ["check", "passed", "detail"], rows, {"failures": failed}, EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "curv": cmd_curv,
    "bounds": cmd_bounds,
    "solve": cmd_solve,
    "foliate": cmd_foliate,
    "kp": cmd_kp,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- argv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slc-lab",
        description="Special Lagrangian curvature toolkit for convex hypersurfaces in hyperbolic space.",
    )
    parser.add_argument("--version", action="version", version=f"slc-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with the command's parameters")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--seed", type=int, help="random seed (default 0)")

    p = sub.add_parser("curv", help="R_theta, SL_r, arctan or zeroth coefficient of a matrix")
    common(p)
    p.add_argument("--matrix", help="diag:a,b,... or rows:a,b;c,d")
    p.add_argument("--theta", type=float)
    p.add_argument("--mode", choices=("r", "sl", "arctan", "zeroth"), help="quantity (default r)")
    p.add_argument("--r", type=float, help="curvature parameter for sl and zeroth")

    p = sub.add_parser("bounds", help="dist_upper, delta_lower and coverage_depth")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--r", type=float)

    p = sub.add_parser(
        "solve",
        help="solve R_theta = r for a graph",
        description="Defaults: n=2, mode=Disk2D, method=newton, h=1/64, rings=64, angles=64, "
        "boundary=0.9*dist_upper, ripple=0.05, newton_tol=1e-9, max_iter=50, damping=1, jacobian=exact.",
    )
    common(p)
    p.add_argument("--theta", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=("FuchsianConstant", "RotSymProfile", "Disk2D"))
    p.add_argument("--method", choices=("newton", "perron"))
    p.add_argument("--h", type=float)
    p.add_argument("--rings", type=int)
    p.add_argument("--angles", type=int)
    p.add_argument("--boundary", type=float)
    p.add_argument("--ripple", type=float)
    p.add_argument("--newton-tol", dest="newton_tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--damping", type=float)
    p.add_argument("--jacobian", choices=("exact", "fd", "operator"))

    p = sub.add_parser(
        "foliate",
        help="continuation sweep over r",
        description="Defaults: n=2, mode=Disk2D, r from 10*tan(theta/n) descending, h=1/64, rings=64, angles=64.",
    )
    common(p)
    p.add_argument("--theta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=("FuchsianConstant", "RotSymProfile", "Disk2D"))
    p.add_argument("--r-values", dest="r_values", type=lambda s: [float(v) for v in s.split(",")])
    p.add_argument("--h", type=float)
    p.add_argument("--rings", type=int)
    p.add_argument("--angles", type=int)
    p.add_argument("--newton-tol", dest="newton_tol", type=float)

    p = sub.add_parser("kp", help="Kulkarni-Pinkall metric samples on a spherical domain")
    common(p)
    p.add_argument("--domain", type=json.loads, help="domain description as JSON")
    p.add_argument("--points", type=json.loads, help="JSON list of chart points")
    p.add_argument("--random", type=int)
    p.add_argument("--directions", type=int)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("verify", help="run the built-in inequality and closed-form checks")
    common(p)
    return parser


RUN_KEYS = ("command", "config", "out", "format", "seed")


def resolve(ns: argparse.Namespace) -> RunConfig:
    flags = {k: v for k, v in vars(ns).items() if k not in RUN_KEYS and v is not None}
    if ns.config:
        return load_config(ns.config, ns.command, flags, out=ns.out, format=ns.format, seed=ns.seed)
    return validate(ns.command, flags, ns.out, ns.format or "csv", 0 if ns.seed is None else ns.seed)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve(ns)
        cols, rows, extra, status = COMMANDS[cfg.command](cfg)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DomainError, ValueError) as exc:
        print(f"error: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(cfg, cols, rows, extra)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
