"""Command-line front end.

    bcl compute --space lp4_2.json --constant kottman --points 4
    bcl verify --suite lp-values
    bcl sweep --param theta --grid 0,0.25,0.5 --x0 l1.json --x1 linf.json --constant kottman-disjoint --plot
    bcl report --input run.json --format csv

Exit codes: 0 success, 1 failed assertion, 2 usage or spec error, 3 solver
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import constants as C
from . import verify as V
from .report import CSV_COLUMNS, ReportError, emit_report, estimate_rows, report_rows
from .solvers.config import NonConvergenceError, SolverConfig
from .spaces import SpecError, build_space, calderon, describe, load_spec, lp, pullback_pair, subspace

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3

CONSTANTS = ("kottman", "kottman-symmetric", "kottman-disjoint", "thickness", "entropy", "james", "gap")
SWEEP_CONSTANTS = CONSTANTS[:-2]


class UsageError(Exception):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


# -- argument helpers ---------------------------------------------------------


def _floats(text: str, name: str) -> list[float]:
    try:
        vals = [math.inf if t.strip().lower() in ("inf", "infinity") else float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(name, f"expected a comma-separated list of numbers, got {text!r}") from None
    return vals


def _ints(text: str, name: str) -> list[int]:
    vals = _floats(text, name)
    if any(v != int(v) for v in vals):
        raise UsageError(name, "expected integers")
    return [int(v) for v in vals]


def _spec(path, name: str):
    if path is None:
        raise UsageError(name, "a space file is required")
    if not Path(path).is_file():
        raise UsageError(name, f"no such file {path!r}")
    try:
        return load_spec(path)
    except SpecError as exc:
        raise SpecError(f"{name}.{exc.field}", str(exc).split(": ", 1)[-1]) from None


def _solver(args) -> SolverConfig:
    kw = {"seed": args.seed}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    if args.iters is not None:
        kw["max_iters"] = args.iters
    if args.tol is not None:
        kw["tol"] = args.tol
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        raise UsageError("solver", str(exc)) from None


def _need_points(args, default=None) -> int:
    N = args.points if args.points is not None else default
    if N is None:
        raise UsageError("points", "--points is required for this constant")
    if N < 1:
        raise UsageError("points", "must be positive")
    return N


def _estimate(kind: str, X, N, cfg, L=None):
    if kind.startswith("kottman"):
        mode = {"kottman": "plain", "kottman-symmetric": "symmetric", "kottman-disjoint": "disjoint"}[kind]
        return [C.kottman(X, N, mode, config=cfg)]
    if kind == "thickness":
        return [C.thickness(X, N, cfg)]
    if kind == "entropy":
        return [C.entropy_covering(X, N, cfg)]
    if kind == "james":
        return list(C.james_constants(X, cfg))
    if kind == "gap":
        return [C.gap(X, L, cfg)]
    raise UsageError("constant", f"unknown constant {kind!r}")


# -- commands -----------------------------------------------------------------


def run_compute(args) -> int:
    cfg = _solver(args)
    kind = args.constant
    if kind == "gap":
        M = build_space(_spec(args.space_m, "space-m"))
        L = build_space(_spec(args.space_l, "space-l"))
        if not (hasattr(M, "ambient") and hasattr(L, "ambient")) or M.ambient.spec != L.ambient.spec:
            raise UsageError("space-l", "gap needs two subspaces of the same ambient space")
        ests = _estimate(kind, M, None, cfg, L)
        label = [describe(M.spec), describe(L.spec)]
    else:
        spec = _spec(args.space, "space")
        X = build_space(spec)
        N = None if kind == "james" else _need_points(args)
        ests = _estimate(kind, X, N, cfg)
        label = [describe(spec)]
    payload = {"spaces": label, "estimates": [e.to_dict() for e in ests]}
    emit_report(args.out, "estimate", payload, estimate_rows(ests), args.format, meta={"command": "compute"})
    for e in ests:
        print(f"{e.kind}: {e.value:.10g} ({e.bound_side} bound)")
    return EXIT_OK


def _rotated_planes(ambient, alphas):
    """The plane span(e1, e2) and its rotations toward e3 by each angle."""
    subs = [subspace(ambient, [[1, 0, 0, 0], [0, 1, 0, 0]])]
    for a in alphas:
        subs.append(subspace(ambient, [[1, 0, 0, 0], [0, math.cos(a), math.sin(a), 0]]))
    return subs


def _suite(args, cfg) -> V.CheckReport:
    s = args.suite
    if s == "lp-values":
        p_grid = _floats(args.p, "p") if args.p else (1, 1.5, 2, 3, math.inf)
        n_grid = _ints(args.n, "n") if args.n else (4, 5, 6, 7, 8)
        return V.check_lp_values(p_grid, n_grid, cfg)
    if s == "duality":
        specs = [_spec(p, "spaces") for p in args.spaces] if args.spaces else [lp(4, 3)]
        return V.check_duality([build_space(sp) for sp in specs], cfg, [describe(sp) for sp in specs])
    if s == "interpolation":
        x0 = _spec(args.x0, "x0") if args.x0 else lp(6, 1)
        x1 = _spec(args.x1, "x1") if args.x1 else lp(6, math.inf)
        thetas = _floats(args.theta, "theta") if args.theta else (0, 0.25, 0.5, 0.75, 1)
        disjoint = args.disjoint or not (args.x0 or args.x1)
        try:
            return V.check_interpolation(x0, x1, thetas, args.points, disjoint, cfg)
        except ValueError as exc:
            raise UsageError("x0", str(exc)) from None
    if s == "lipschitz":
        which = tuple(args.constants.split(",")) if args.constants else ("kottman", "thickness", "james")
        if args.subspaces:
            specs = [_spec(p, "subspaces") for p in args.subspaces]
        else:
            alphas = _floats(args.alpha, "alpha") if args.alpha else (0.05, 0.1, 0.2)
            specs = _rotated_planes(lp(4, 2), alphas)
        ambients = {getattr(sp, "ambient", None) for sp in specs}
        if len(ambients) != 1 or None in ambients:
            raise UsageError("subspaces", "all members must be subspaces of one ambient space")
        return V.check_lipschitz([build_space(sp) for sp in specs], args.points or 3, which, cfg,
                                 names=[f"S{i}" for i in range(len(specs))])
    if s == "twisted":
        eps = _floats(args.eps, "eps") if args.eps else (0.5, 0.1, 0.01)
        if any(e <= 0 for e in eps):
            raise UsageError("eps", "must be positive")
        p = _floats(args.p, "p")[0] if args.p else 1.0
        n = _ints(args.n, "n")[0] if args.n else 3
        return V.check_twisted(n, eps, args.points or 4, p, cfg)
    if s == "sum-formulas":
        lam = _spec(args.lam, "lambda") if args.lam else lp(3, 1)
        inner = _spec(args.inner, "inner") if args.inner else lp(3, math.inf)
        return V.check_sum_formulas(lam, inner, args.points or 3, cfg)
    if s == "identities":
        if args.spaces:
            specs = [_spec(p, "spaces") for p in args.spaces]
        else:
            specs = [lp(2, p) for p in (1, 1.2, 2, 4, math.inf)]
        return V.check_identities([build_space(sp) for sp in specs], cfg, [describe(sp) for sp in specs])
    raise UsageError("suite", f"unknown suite {s!r}; choose from {', '.join(V.SUITES)}")


def run_verify(args) -> int:
    cfg = _solver(args)
    rep = _suite(args, cfg)
    emit_report(args.out, "check", rep.to_dict(), report_rows([rep]), args.format,
                meta={"command": "verify", "wall_time": rep.wall_time})
    for r in rep.rows:
        print(f"{r.status:8s} {r.param}: {r.lhs:.8g} <= {r.rhs:.8g} + {r.slack:g}")
    print(f"suite {rep.suite}: {rep.status} ({rep.wall_time:.1f}s)")
    return EXIT_OK if rep.passed else EXIT_ASSERT


def _sweep_value(sweep: V.SweepSpec, v, args, cfg):
    """One sweep point: (value, reference or None)."""
    kind = args.constant or ("gap" if sweep.name in ("eps", "alpha") else "kottman")
    if sweep.name == "eps":
        n = _ints(args.n, "n")[0] if args.n else 3
        p = _floats(args.p, "p")[0] if args.p else 1.0
        if v <= 0:
            raise UsageError("grid", "eps values must be positive")
        _, pb, yz = pullback_pair(build_space(lp(2 * n, p)), v)
        return C.gap(pb, yz, cfg).value, v
    if sweep.name == "alpha":
        specs = _rotated_planes(lp(4, 2), [v])
        M, L = (build_space(sp) for sp in specs)
        return C.gap(M, L, cfg).value, math.sin(v)
    if kind not in SWEEP_CONSTANTS:
        raise UsageError("constant", f"sweeps over {sweep.name} support {', '.join(SWEEP_CONSTANTS)}")
    if sweep.name == "theta":
        x0 = _spec(args.x0, "x0") if args.x0 else lp(5, 1)
        x1 = _spec(args.x1, "x1") if args.x1 else lp(5, math.inf)
        spec = calderon([x0, x1], [1.0 - v, v])
        X = build_space(spec)
        N = _need_points(args, X.dim)
        mode = "disjoint" if kind == "kottman-disjoint" else "plain"
        ref = V.exact_packing_value(spec, N, mode) if kind.startswith("kottman") else None
        return _primary(_estimate(kind, X, N, cfg)), ref
    if sweep.name == "p":
        n = _ints(args.n, "n")[0] if args.n else 4
        spec = lp(n, v)
        N = _need_points(args, n)
        mode = "disjoint" if kind == "kottman-disjoint" else "plain"
        ref = V.exact_packing_value(spec, N, mode) if kind.startswith("kottman") else None
        return _primary(_estimate(kind, build_space(spec), N, cfg)), ref
    # N
    if v != int(v) or v < 1:
        raise UsageError("grid", "N values must be positive integers")
    spec = _spec(args.space, "space") if args.space else lp(2, 2)
    X = build_space(spec)
    ref = None
    if kind == "thickness" and spec == lp(2, 2):
        ref = 2 * math.sin(math.pi / (2 * v))
    elif kind.startswith("kottman"):
        ref = V.exact_packing_value(spec, int(v), "disjoint" if kind == "kottman-disjoint" else "plain")
    return _primary(_estimate(kind, X, int(v), cfg)), ref


def _primary(ests):
    return ests[0].value


def run_sweep(args) -> int:
    cfg = _solver(args)
    if not args.grid:
        raise UsageError("grid", "sweep grid is empty")
    try:
        sweep = V.SweepSpec(args.param, _floats(args.grid, "grid"))
    except ValueError as exc:
        raise UsageError("grid", str(exc)) from None
    rows, xs, ys = [], [], []
    for v in sweep.grid:
        val, ref = _sweep_value(sweep, v, args, cfg)
        xs.append(v)
        ys.append(val)
        rows.append({"suite": f"sweep-{sweep.name}", "param": f"{sweep.name}={v:g}", "lhs": val,
                     "rhs": "" if ref is None else ref, "slack": "", "status": "reported"})
        print(f"{sweep.name}={v:g}: {val:.10g}" + ("" if ref is None else f" (reference {ref:.10g})"))
    kind = args.constant or ("gap" if sweep.name in ("eps", "alpha") else "kottman")
    payload = {"parameter": sweep.name, "constant": kind, "grid": list(sweep.grid), "values": ys,
               "references": [r["rhs"] if r["rhs"] != "" else None for r in rows], "seed": cfg.seed,
               "config_fingerprint": cfg.fingerprint()}
    svg = (xs, ys, sweep.name, kind) if args.plot else None
    emit_report(args.out, "sweep", payload, rows, args.format, svg=svg, meta={"command": "sweep"})
    return EXIT_OK


def run_report(args) -> int:
    path = Path(args.input)
    if not path.is_file():
        raise UsageError("input", f"no such file {args.input!r}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError("input", f"not JSON: {exc}") from None
    if doc.get("schema") != "bcl/1":
        raise UsageError("schema", f"unsupported schema {doc.get('schema')!r}")
    kind, payload = doc.get("kind"), doc.get("payload", {})
    svg = None
    if kind == "check":
        rows = [{"suite": payload["suite"], **{k: r[k] for k in CSV_COLUMNS[1:]}} for r in payload["rows"]]
    elif kind == "sweep":
        rows = [{"suite": f"sweep-{payload['parameter']}", "param": f"{payload['parameter']}={x:g}", "lhs": y,
                 "rhs": "" if r is None else r, "slack": "", "status": "reported"}
                for x, y, r in zip(payload["grid"], payload["values"], payload["references"])]
        if args.plot:
            svg = (payload["grid"], payload["values"], payload["parameter"], payload["constant"])
    elif kind == "estimate":
        rows = [{"suite": "compute", "param": e["kind"] if e["N"] is None else f"{e['kind']} N={e['N']}",
                 "lhs": e["value"], "rhs": "", "slack": "", "status": e["bound_side"]} for e in payload["estimates"]]
    else:
        raise UsageError("kind", f"unknown report kind {kind!r}")
    out = args.out or str(path.with_suffix(""))
    emit_report(out, kind, payload, rows, args.format, svg=svg, meta={"command": "report", "source": str(path)})
    return EXIT_OK


# -- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: usage: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bcl", description="Finite-dimensional Banach-space constants: estimates and checks.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=42, help="root seed (default 42)")
        p.add_argument("--restarts", type=int, help="multi-start count")
        p.add_argument("--iters", type=int, help="iterations per restart")
        p.add_argument("--tol", type=float, help="solver tolerance")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path stem")
        p.add_argument("--points", type=int, help="number of points N")

    c = sub.add_parser("compute", help="estimate one constant")
    common(c)
    c.add_argument("--space")
    c.add_argument("--space-m")
    c.add_argument("--space-l")
    c.add_argument("--constant", choices=CONSTANTS, required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("--suite", required=True)
    v.add_argument("--spaces", nargs="+")
    v.add_argument("--subspaces", nargs="+")
    v.add_argument("--x0")
    v.add_argument("--x1")
    v.add_argument("--lambda", dest="lam")
    v.add_argument("--inner")
    v.add_argument("--theta")
    v.add_argument("--eps")
    v.add_argument("--alpha")
    v.add_argument("--p")
    v.add_argument("--n")
    v.add_argument("--constants", help="lipschitz: subset of kottman,thickness,james")
    v.add_argument("--disjoint", action="store_true")

    s = sub.add_parser("sweep", help="tabulate a constant over a parameter grid")
    common(s)
    s.add_argument("--param", choices=("theta", "eps", "alpha", "p", "N"), required=True)
    s.add_argument("--grid", required=True)
    s.add_argument("--constant", choices=CONSTANTS)
    s.add_argument("--space")
    s.add_argument("--x0")
    s.add_argument("--x1")
    s.add_argument("--p")
    s.add_argument("--n")
    s.add_argument("--plot", action="store_true")

    r = sub.add_parser("report", help="re-emit a JSON result as CSV or JSON (and optionally SVG)")
    r.add_argument("--input", required=True)
    r.add_argument("--format", choices=("json", "csv"), default="csv")
    r.add_argument("--out", default=None)
    r.add_argument("--plot", action="store_true")
    return ap


COMMANDS = {"compute": run_compute, "verify": run_verify, "sweep": run_sweep, "report": run_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "out", None) is None and args.command != "report":
        args.out = f"bcl_{args.command}"
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SpecError) as exc:
        print(f"error: field {exc.field}: {str(exc).split(': ', 1)[-1]}", file=sys.stderr)
        return EXIT_USAGE
    except ReportError as exc:
        print(f"error: field out: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"error: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONV


if __name__ == "__main__":
    sys.exit(main())
