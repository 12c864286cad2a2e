"""Command-line front end.

Subcommands:

* ``verify`` runs one of the residual suites (euclid, log, manifold,
  hyperbolic) over a parameter sweep and writes a JSON or CSV report.
* ``coefficients`` prints the constant tables at fixed (n, alpha).
* ``sharp`` runs the variational estimators and tabulates per-mode,
  per-window values with convergence data.
* ``oracle`` cross-validates closed-form weighted norms of randomized
  piecewise profiles against adaptive quadrature.

Exit codes: 2 for usage or configuration errors, 1 if any case fails,
0 otherwise.  A config file of ``key = value`` lines under a section
named after the subcommand may replace flags; explicit flags win.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .coefficients import A_const, CoefficientTable, D_const, H_const
from .hyperbolic import (TOL_HYPERBOLIC, check_hyp_equality,
                         check_identity_HR2hyper, check_newhyp1,
                         probe_hyper_inequalities, seeded_bumps)
from .identities import (SLACK_FLOOR, TOL_CLOSED, TOL_QUAD,
                         build_euclid_cases, build_log_cases, run_case)
from .manifold import (TOL_MANIFOLD, ModelSpace, check_HRV, parse_profile,
                       probe_corollary15, smooth_bump)
from .quadrature import norm_sq_piecewise
from .radial import random_piecewise, weighted_norm_sq
from .sharp import RadialGrid, estimate_E, estimate_rellich

SUBCOMMANDS = ("verify", "coefficients", "sharp", "oracle")

# default sweep for `verify --suite manifold`: (order, weight profile, space)
MANIFOLD_SWEEP = (
    (2, "r^-4", "euclid:12"),
    (3, "r^(-3/2)", "euclid:8"),
    (4, "r^-4", "euclid:12"),
    (1, "exp(-2*rho)", "hyperbolic:5"),
)


# --------------------------------------------------------------- flag parsing

def _scalar(text: str):
    """Exact Fraction when the token parses as one, float otherwise."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        return float(text)


def _scalar_list(text: str) -> tuple:
    out = tuple(_scalar(tok) for tok in text.split(",") if tok.strip())
    if not out:
        raise ValueError("empty list")
    return out


def _int_list(text: str) -> tuple:
    out = tuple(int(tok) for tok in text.split(",") if tok.strip())
    if not out:
        raise ValueError("empty list")
    return out


def _model_space(tag: str) -> ModelSpace:
    name, _, dim = tag.partition(":")
    if name in ("euclid", "euclidean"):
        return ModelSpace.euclidean(int(dim))
    if name in ("hyperbolic", "hyp"):
        return ModelSpace.hyperbolic(int(dim))
    raise ValueError(f"unknown model space {tag!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rellich",
        description="weighted Hardy-Rellich identity checks and constants")
    parser.add_argument("--config", metavar="FILE",
                        help="key = value defaults, one section per subcommand")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")

    def common_output(p):
        p.add_argument("--out", metavar="FILE",
                       help="write the report here ('-' for stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    ver = subs.add_parser("verify", help="run a residual suite")
    ver.add_argument("--suite", required=True,
                     choices=("euclid", "log", "manifold", "hyperbolic"))
    ver.add_argument("--n", type=_int_list, help="dimensions, comma-separated")
    ver.add_argument("--alpha", type=_scalar_list, help="weight exponents")
    ver.add_argument("--ell", type=_int_list, help="spherical modes")
    ver.add_argument("--m", type=_int_list, help="identity orders")
    ver.add_argument("--k", type=_int_list, help="iteration counts / orders")
    ver.add_argument("--b", type=_scalar_list, help="log-weight exponents")
    ver.add_argument("--tol", type=float, help="override the per-id tolerance")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--samples", type=int, default=8,
                     help="bump count per inequality probe")
    ver.add_argument("--space", type=str,
                     help="model space tag, e.g. euclid:8 or hyperbolic:5")
    ver.add_argument("--V", type=str, help="weight profile (manifold suite)")
    ver.add_argument("--f", type=str, help="factor profile (manifold suite)")
    ver.add_argument("--u", type=str, help="test profile (manifold suite)")
    ver.add_argument("--jobs", type=int, default=0,
                     help="worker processes; 0 = available parallelism")
    common_output(ver)

    coef = subs.add_parser("coefficients", help="constant tables")
    coef.add_argument("--n", type=int, required=True)
    coef.add_argument("--alpha", type=_scalar, required=True)
    coef.add_argument("--m", type=int, default=3, metavar="M_MAX")
    coef.add_argument("--k", type=int, default=0,
                      help="split index for the C_hat table")
    coef.add_argument("--kind", choices=("C", "C_hat", "C_tilde"), default="C")
    common_output(coef)

    shp = subs.add_parser("sharp", help="variational constant estimates")
    shp.add_argument("--target", choices=("grad", "rellich"), default="grad")
    shp.add_argument("--n", type=_int_list, default=(5,))
    shp.add_argument("--alpha", type=_scalar, default=Fraction(0))
    shp.add_argument("--ell-max", type=int, default=3, dest="ell_max")
    shp.add_argument("--half-width", type=float, default=9.0, dest="half_width")
    shp.add_argument("--count", type=int, default=4096,
                     help="interior grid points at the reference window")
    common_output(shp)

    orc = subs.add_parser("oracle", help="closed form vs quadrature")
    orc.add_argument("--count", type=int, default=200)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--tol", type=float, default=1e-10)
    common_output(orc)
    return parser


# ---------------------------------------------------------------- config file

def _config_path(argv: list[str]) -> str | None:
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    return path


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> str | None:
    """Merge config-file values as subparser defaults; flags still win.

    Returns an error message instead of raising so the caller can turn
    it into exit code 2.
    """
    path = _config_path(argv)
    if path is None:
        return None
    if not os.path.exists(path):
        return f"config file not found: {path}"
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        return f"bad config file {path}: {exc}"
    command = next((tok for tok in argv if tok in SUBCOMMANDS), None)
    if command is None or not cp.has_section(command):
        return None
    sub = None
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        sub = action.choices[command]
    known = {a.dest: a for a in sub._actions}  # noqa: SLF001
    for key, value in cp.items(command):
        dest = key.replace("-", "_")
        if dest not in known:
            return f"config: unknown key {key!r} in section [{command}]"
        # string defaults run through the option's type converter at parse
        sub.set_defaults(**{dest: value})
    return None


# ------------------------------------------------------------------ reporting

def build_report(case_dicts: list[dict], seed: int, tolerances: dict) -> dict:
    return {
        "meta": {
            "seed": seed,
            "tolerances": tolerances,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
        "cases": case_dicts,
    }


def canonical_json(report: dict) -> str:
    """Deterministic rendering: the timestamp is dropped, keys sorted."""
    clone = json.loads(json.dumps(report))
    if isinstance(clone.get("meta"), dict):
        clone["meta"].pop("timestamp", None)
    return json.dumps(clone, sort_keys=True, indent=2) + "\n"


def _rows_to_csv(rows: list[dict], fields: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


_CASE_FIELDS = ("id", "identity", "kind", "status", "lhs", "rhs",
                "abs_residual", "rel_residual", "slack", "tolerance",
                "note", "params", "terms")


def _cases_to_csv(case_dicts: list[dict]) -> str:
    rows = []
    for d in case_dicts:
        row = {key: d.get(key, "") for key in _CASE_FIELDS}
        row["params"] = json.dumps(d.get("params", {}), sort_keys=True)
        row["terms"] = json.dumps(d.get("terms", {}), sort_keys=True)
        rows.append(row)
    return _rows_to_csv(rows, _CASE_FIELDS)


def _write_out(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_cases(case_dicts: list[dict], args, tolerances: dict) -> None:
    if args.format == "csv":
        text = _cases_to_csv(case_dicts)
    else:
        report = build_report(case_dicts, getattr(args, "seed", 0), tolerances)
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out is not None:
        _write_out(text, args.out)


def _summarize(case_dicts: list[dict]) -> int:
    total = len(case_dicts)
    failed = [d for d in case_dicts if d["status"] == "fail"]
    skipped = sum(d["status"] == "skipped" for d in case_dicts)
    passed = total - len(failed) - skipped
    for d in failed:
        print(f"FAIL {d['id']}: rel={d['rel_residual']:.3e} "
              f"slack={d['slack']} {d['note']}".rstrip(), file=sys.stderr)
    print(f"{total} cases: {passed} passed, {skipped} skipped, "
          f"{len(failed)} failed")
    return 1 if failed else 0


# --------------------------------------------------------------- verify suite

def _run_job(desc) -> list:
    """One picklable unit of suite work; returns ResidualReports."""
    kind = desc[0]
    if kind == "case":
        _, case, tol = desc
        return [run_case(case, tolerance=tol)]
    if kind == "manifold":
        _, ident, k, space_tag, V, f, u_text, tol = desc
        tol = TOL_MANIFOLD if tol is None else tol
        space = _model_space(space_tag)
        u = (parse_profile(u_text) if u_text
             else smooth_bump(1, 2, var=space.var.name))
        if ident == "HRV":
            return [check_HRV(k, V, f, u, space, tolerance=tol)]
        return [probe_corollary15(k, f, u, space, tolerance=tol)]
    if kind == "hyper":
        _, name, n, ell, tol = desc
        tol = TOL_HYPERBOLIC if tol is None else tol
        f = smooth_bump(1, 2, var="rho")
        if name == "HR2hyper":
            return [check_identity_HR2hyper(n, ell, f, tolerance=tol)]
        if name == "hyp":
            return [check_hyp_equality(n, f, tolerance=tol)]
        return [check_newhyp1(n, f, tolerance=tol)]
    if kind == "hyper_probe":
        _, n, ell, samples, seed, tol = desc
        tol = TOL_HYPERBOLIC if tol is None else tol
        bumps = seeded_bumps(samples, seed)
        return probe_hyper_inequalities(n, ell, bumps, tolerance=tol)
    raise ValueError(f"unknown job kind {kind!r}")


def _verify_jobs(args) -> tuple[list, dict]:
    tol = args.tol
    if args.suite == "euclid":
        cases = build_euclid_cases(
            args.n or (2, 3, 5, 8),
            args.alpha or (Fraction(-3), Fraction(0), Fraction(5, 2)),
            args.ell or (0, 1, 2),
            ms=args.m or (1, 2, 3),
            ks=args.k or (0, 1, 2, 3))
        meta = {"identity": tol or TOL_CLOSED, "slack": SLACK_FLOOR}
        return [("case", c, tol) for c in cases], meta
    if args.suite == "log":
        cases = build_log_cases(
            args.n or (2, 3, 5),
            args.alpha or (Fraction(-1), Fraction(0), Fraction(1)),
            bs=args.b or (Fraction(1, 4),),
            ks=args.k or (1, 2),
            ells=args.ell or (0,))
        meta = {"identity": tol or TOL_QUAD, "slack": SLACK_FLOOR}
        return [("case", c, tol) for c in cases], meta
    if args.suite == "manifold":
        custom = any(getattr(args, name) for name in ("space", "V", "f"))
        if custom:
            space = args.space or "euclid:12"
            sweep = [(k, args.f or "r^-4", space) for k in (args.k or (1, 2))]
        else:
            sweep = list(MANIFOLD_SWEEP)
        jobs = []
        for k, f, space in sweep:
            V = args.V if (custom and args.V) else 1
            jobs.append(("manifold", "HRV", k, space, V, f, args.u, tol))
        for k, f, space in sweep:
            jobs.append(("manifold", "cor15", k, space, 1, f, args.u, tol))
        return jobs, {"residual": tol or TOL_MANIFOLD, "slack": tol or TOL_MANIFOLD}
    # hyperbolic: identity checks, radial equalities, slack probes
    ells = args.ell or (0, 1, 2)
    jobs = []
    for n in args.n or (2, 3, 4, 5):
        for ell in ells:
            jobs.append(("hyper", "HR2hyper", n, ell, tol))
    for n in args.n or (3, 5, 6):
        jobs.append(("hyper", "hyp", n, 0, tol))
        jobs.append(("hyper", "newhyp1", n, 0, tol))
    for n in args.n or (3, 4, 5):
        for ell in ells:
            jobs.append(("hyper_probe", n, ell, args.samples, args.seed, tol))
    return jobs, {"residual": tol or TOL_HYPERBOLIC, "slack": tol or TOL_HYPERBOLIC}


def _run_verify(args) -> int:
    jobs, tolerances = _verify_jobs(args)
    workers = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_job, jobs,
                                   chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        chunks = [_run_job(job) for job in jobs]
    reports = [rep for chunk in chunks for rep in chunk]
    reports.sort(key=lambda rep: rep.case.sort_key())
    case_dicts = [rep.to_dict() for rep in reports]
    _emit_cases(case_dicts, args, tolerances)
    return _summarize(case_dicts)


# --------------------------------------------------------------- coefficients

_COEF_FIELDS = ("family", "j", "m", "beta", "exact", "value")


def _coefficient_rows(n: int, alpha, m_max: int, kind: str, k: int) -> list[dict]:
    def entry(family, j, m, beta, value):
        exact = str(value) if isinstance(value, Fraction) else ""
        return {"family": family, "j": j, "m": m, "beta": beta,
                "exact": exact, "value": float(value)}

    table = CoefficientTable.build(n, alpha, kind, m_max, k)
    rows = [entry(kind, j, m, "", table.entries[(j, m)])
            for m in range(0, m_max + 1) for j in range(0, 2 * m + 1)]
    rows += [entry("H", kk, "", "", H_const(kk, alpha, n))
             for kk in range(0, m_max + 1)]
    shifts = [alpha + 2 * l for l in range(0, max(1, 2 * m_max - 1))]
    rows += [entry("A", "", "", float(b), A_const(n, b)) for b in shifts]
    rows += [entry("D", "", "", float(b), D_const(n, b)) for b in shifts]
    return rows


def _run_coefficients(args) -> int:
    rows = _coefficient_rows(args.n, args.alpha, args.m, args.kind, args.k)
    if args.format == "csv":
        text = _rows_to_csv(rows, _COEF_FIELDS)
    else:
        payload = {"meta": {"n": args.n, "alpha": float(args.alpha),
                            "kind": args.kind, "m_max": args.m, "k": args.k,
                            "version": __version__},
                   "rows": rows}
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    _write_out(text, args.out if args.out is not None else "-")
    return 0


# ---------------------------------------------------------------------- sharp

_SHARP_FIELDS = ("target", "n", "alpha", "ell", "window", "value",
                 "residual", "iterations", "converged", "grid", "note")


def _sharp_rows(args) -> list[dict]:
    rows = []
    grid = RadialGrid(-args.half_width, args.half_width, args.count)
    for n in args.n:
        if args.target == "grad":
            scan = estimate_E(n, float(args.alpha), args.ell_max, grid)
        else:
            scan = estimate_rellich(n, float(args.alpha), grid, args.ell_max)
        for study in scan.study:
            for half, est in study.values:
                rows.append({"target": args.target, "n": n,
                             "alpha": float(args.alpha), "ell": study.ell,
                             "window": f"{half:g}", "value": est.value,
                             "residual": est.residual,
                             "iterations": est.iterations,
                             "converged": est.converged,
                             "grid": est.grid.label(), "note": ""})
            summary = dict(scan.per_mode)[study.ell]
            rows.append({"target": args.target, "n": n,
                         "alpha": float(args.alpha), "ell": study.ell,
                         "window": "extrapolated",
                         "value": study.extrapolated,
                         "residual": summary.residual,
                         "iterations": summary.iterations,
                         "converged": summary.converged,
                         "grid": grid.label(), "note": ""})
        rows.append({"target": args.target, "n": n, "alpha": float(args.alpha),
                     "ell": scan.best_mode, "window": "best",
                     "value": scan.best.value, "residual": scan.best.residual,
                     "iterations": scan.best.iterations,
                     "converged": scan.best.converged,
                     "grid": grid.label(), "note": scan.note})
    return rows


def _run_sharp(args) -> int:
    rows = _sharp_rows(args)
    if args.format == "csv":
        text = _rows_to_csv(rows, _SHARP_FIELDS)
    else:
        payload = {"meta": {"target": args.target,
                            "alpha": float(args.alpha),
                            "half_width": args.half_width,
                            "count": args.count, "version": __version__},
                   "rows": rows}
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    _write_out(text, args.out if args.out is not None else "-")
    bad = [r for r in rows if not r["converged"]]
    return 1 if bad else 0


# --------------------------------------------------------------------- oracle

def _run_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    case_dicts = []
    for i in range(args.count):
        f = random_piecewise(rng)
        beta = Fraction(int(rng.integers(-6, 7)), 2)
        n = int(rng.integers(2, 9))
        closed = weighted_norm_sq(f, beta, n)
        quad = norm_sq_piecewise(f, beta, n)
        lhs, rhs = float(closed), quad.value
        scale = abs(lhs) + abs(rhs) + 1e-300
        rel = abs(lhs - rhs) / scale
        case_dicts.append({
            "id": f"oracle[{i:04d},n={n},beta={beta}]",
            "identity": "norm_vs_quadrature",
            "kind": "oracle",
            "params": {"index": i, "n": n, "beta": str(beta),
                       "seed": args.seed},
            "lhs": lhs, "rhs": rhs, "terms": {},
            "abs_residual": abs(lhs - rhs), "rel_residual": rel,
            "slack": None, "tolerance": args.tol,
            "status": "pass" if rel <= args.tol else "fail",
            "note": "",
        })
    _emit_cases(case_dicts, args, {"relative": args.tol})
    return _summarize(case_dicts)


# ----------------------------------------------------------------- entrypoint

def run(argv: list[str]) -> int:
    parser = build_parser()
    error = _apply_config(parser, argv)
    if error is not None:
        print(f"rellich: {error}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.command == "verify":
        return _run_verify(args)
    if args.command == "coefficients":
        return _run_coefficients(args)
    if args.command == "sharp":
        return _run_sharp(args)
    return _run_oracle(args)


def main(argv: list[str] | None = None) -> int:
    return run(list(sys.argv[1:]) if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
