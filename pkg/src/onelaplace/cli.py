"""Command-line driver: ``onelaplace exact | solve | verify | sweep``.

Runs are described by a TOML file of dotted keys::

    # singular benchmark
    geometry.N = 3
    geometry.R = 3.0
    geometry.n = 4096
    datum.kind = "powerlaw"
    datum.lambda = 2.0
    datum.q = 2.0
    solver.eps_min = 3e-6

plus ``--set key=value`` overrides.  Outputs go to ``--out`` (CSV with a
``# config_hash=...`` line and unit-tagged column names, numbers with 17
significant digits, and a JSON report).  Wall-clock timings are kept in a
separate ``timings.json`` so that the report itself is byte-stable.

Exit codes: 0 success, 1 invalid configuration or refused overwrite,
2 nonconvergence, 3 failed verification.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import (ConfigurationError, Constant, DataError, DomainError, PowerLaw,
                   PreconditionError, build_disk_grid, build_radial_mesh, validate_datum)
from .exact import SINGULAR, TRIVIAL, build_exact, exact_residual, exact_z, sample_u
from .solver import SolverConfig, solve
from . import verify as V

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "geometry.kind": "radial",
    "geometry.N": 3,
    "geometry.R": 3.0,
    "geometry.n": 1024,
    "geometry.grading": 2.0,
    "datum.kind": "powerlaw",
    "datum.lambda": 2.0,
    "datum.q": 2.0,
    "datum.c": 0.0,
    "solver.eps_start": None,
    "solver.eps_min": None,
    "solver.shrink": 0.25,
    "solver.tau_fp": 1e-8,
    "solver.tau_res": 1e-5,
    "solver.max_iter": 200,
    "solver.linear_tol": 1e-12,
    "solver.method": "hybrid",
    "solver.clip": False,
    "verify.checks": ["ladder", "exact_residual", "regularity", "gradient_bound",
                      "comparison_oracle"],
    "verify.count": 20,
    "verify.family": "mixed",
    "verify.p": 2.0,
    "verify.j": 20,
    "verify.m": None,
    "verify.bound_draws": 10,
    "verify.identity_n": 100000,
    "sweep.N": None,
    "sweep.q": None,
    "sweep.lambda": None,
    "sweep.n": None,
    "sweep.eps_min": None,
}

CHECKS = ("ladder", "exact_residual", "regularity", "power_identity", "gradient_bound",
          "comparison", "comparison_oracle", "plateau")


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ config


def _flatten(table: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def parse_config(text: str) -> dict:
    """TOML with dotted keys, flattened to ``{"datum.lambda": 2.0, ...}``."""
    try:
        return _flatten(tomllib.loads(text))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None


def parse_value(text: str):
    """A TOML value; anything that does not parse is taken as a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text.strip()


def resolve_config(raw: dict) -> dict:
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    cfg = dict(DEFAULTS)
    cfg.update(raw)
    return cfg


def config_hash(command: str, cfg: dict) -> str:
    canon = json.dumps({"command": command, "config": cfg}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ------------------------------------------------------------------ builders


def _num(cfg, key, kind=float):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    return kind(v)


def build_mesh(cfg):
    kind = cfg["geometry.kind"]
    if kind == "radial":
        return build_radial_mesh(_num(cfg, "geometry.N", int), _num(cfg, "geometry.R"),
                                 _num(cfg, "geometry.n", int), _num(cfg, "geometry.grading"))
    if kind == "disk":
        return build_disk_grid(_num(cfg, "geometry.R"), _num(cfg, "geometry.n", int))
    raise ConfigError(f"geometry.kind must be radial or disk, got {kind!r}")


def build_datum(cfg):
    kind = cfg["datum.kind"]
    if kind == "powerlaw":
        return PowerLaw(_num(cfg, "datum.lambda"), _num(cfg, "datum.q"))
    if kind == "constant":
        return Constant(_num(cfg, "datum.c"))
    raise ConfigError(f"datum.kind must be powerlaw or constant, got {kind!r}")


def build_solver_config(cfg):
    kw = {}
    for key in ("eps_start", "eps_min", "shrink", "tau_fp", "tau_res", "linear_tol"):
        v = cfg[f"solver.{key}"]
        if v is not None:
            kw[key] = _num(cfg, f"solver.{key}")
    kw["max_iter"] = _num(cfg, "solver.max_iter", int)
    kw["method"] = str(cfg["solver.method"])
    kw["clip"] = bool(cfg["solver.clip"])
    return SolverConfig(**kw)


def _as_list(v):
    return v if isinstance(v, list) else [v]


# ------------------------------------------------------------------ output


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(format(x, ".17g"))
    return x


def csv_text(columns: list[str], rows: list[list], chash: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config_hash={chash}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


@dataclass
class Run:
    command: str
    cfg: dict
    chash: str
    out: Path
    files: dict
    verdicts: list
    timings: dict
    extra: dict

    def add_file(self, name: str, text: str):
        self.files[name] = text

    def verdict(self, check: str, passed: bool, **detail):
        self.verdicts.append({"check": check, "passed": bool(passed), "detail": detail})


def _report_text(run: Run) -> str:
    outputs = sorted(list(run.files) + ["report.json", "timings.json"])
    report = {
        "config_hash": run.chash,
        "command": run.command,
        "config": run.cfg,
        "verdicts": run.verdicts,
        "timings": {"file": "timings.json", "phases": sorted(run.timings)},
        "outputs": outputs,
        **run.extra,
    }
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def _write(run: Run):
    run.out.mkdir(parents=True, exist_ok=True)
    files = dict(run.files)
    files["report.json"] = _report_text(run)
    files["timings.json"] = json.dumps(_jsonable(run.timings), indent=2, sort_keys=True) + "\n"
    for name, text in files.items():
        with open(run.out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _planned_files(command: str) -> list[str]:
    base = ["report.json", "timings.json"]
    return base + {"exact": ["profile.csv"], "solve": ["profile.csv", "convergence.json"],
                   "verify": ["verdicts.csv"], "sweep": ["sweep.csv"]}[command]


# ------------------------------------------------------------------ commands


def _oracle_for(mesh, datum):
    if getattr(mesh, "N", None) is None or not isinstance(datum, PowerLaw) or datum.q == 1:
        return None
    return build_exact(mesh.N, mesh.R, datum.lam, datum.q)


def _regions(sol, r):
    if sol.case == TRIVIAL:
        return ["plateau"] * len(r)
    if sol.case == SINGULAR:
        return ["core" if x < sol.core_radius else "plateau" for x in r]
    return ["plateau" if x <= sol.threshold else "core" for x in r]


def _z_nodes(sol, r):
    z = np.full(r.shape, np.nan)
    pos = r > 0
    try:
        z[pos] = exact_z(sol, r[pos])
    except DomainError:
        pass
    return z


def run_exact(run: Run, mesh, datum, scfg):
    if not hasattr(mesh, "nodes") or not isinstance(datum, PowerLaw):
        raise ConfigError("exact needs a radial geometry and a power-law datum")
    t0 = time.perf_counter()
    sol = build_exact(mesh.N, mesh.R, datum.lam, datum.q)
    r = np.asarray(mesh.nodes)
    u, unbounded = sample_u(sol, r)
    z = _z_nodes(sol, r)
    region = _regions(sol, r)
    rows = [[r[i], "inf" if unbounded[i] else u[i], z[i], region[i]] for i in range(len(r))]
    run.add_file("profile.csv", csv_text(["r[length]", "u[1]", "z_radial[1]", "region"], rows, run.chash))
    res = exact_residual(sol, mesh)
    run.extra["solution"] = {"case": sol.case, "threshold": sol.threshold, "plateau": sol.plateau}
    if sol.case == TRIVIAL:
        run.verdict("trivial datum", True, threshold=sol.threshold, R=mesh.R)
    else:
        run.verdict("exact_residual", max(res.core, res.plateau) <= 1e-10,
                    core=res.core, plateau=res.plateau)
    run.timings["exact"] = time.perf_counter() - t0
    return EXIT_OK


def run_solve(run: Run, mesh, datum, scfg):
    rep = solve(mesh, datum, scfg)
    run.timings["solve"] = rep.wall_time
    conv = {"eps_levels": rep.eps_levels, "iterations": rep.iterations, "residuals": rep.residuals,
            "converged": rep.converged, "undershoot": rep.undershoot,
            "undershoot_flag": rep.undershoot_flag, "clipped": rep.clipped}
    run.add_file("convergence.json", json.dumps(_jsonable(conv), indent=2, sort_keys=True) + "\n")
    if hasattr(mesh, "nodes"):
        r = np.asarray(mesh.nodes)
        zm = np.asarray(rep.z.values)
        # node value of z: the adjacent midpoint value on the outer side (last node: inner side)
        z = np.concatenate([zm, zm[-1:]])
        sol = _oracle_for(mesh, datum)
        cols = ["r[length]", "u[1]", "z_radial[1]"]
        rows = [[r[i], rep.u.values[i], z[i]] for i in range(len(r))]
        if sol is not None:
            ue, unbounded = sample_u(sol, r)
            err = np.where(unbounded, np.nan, np.abs(rep.u.values - np.nan_to_num(ue)))
            cols += ["error[1]", "region"]
            region = _regions(sol, r)
            for i, row in enumerate(rows):
                row += [err[i], region[i]]
            inner = r >= 0.01 * mesh.R
            run.extra["max_error_outside_inner_1pct"] = float(np.nanmax(err[inner]))
        run.add_file("profile.csv", csv_text(cols, rows, run.chash))
    else:
        X, Y = mesh.centers
        m = mesh.mask
        rows = [[x, y, v] for x, y, v in zip(X[m], Y[m], rep.u.values[m])]
        run.add_file("profile.csv", csv_text(["x[length]", "y[length]", "u[1]"], rows, run.chash))
    run.extra["max_abs_u"] = rep.max_abs
    run.verdict("converged", rep.converged, residual=rep.residual)
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def _check_ladder(run, cfg, mesh, datum, scfg):
    N = getattr(mesh, "N", 2)
    p, j = _num(cfg, "verify.p"), _num(cfg, "verify.j", int)
    lad = V.exponent_ladder(N, p, j)
    closed = lad.N_conj / (1 - lad.N_conj / lad.p_conj)
    ok = abs(closed - lad.limit) <= 1e-12 * lad.limit and all(np.diff(lad.s) > 0) and lad.s[-1] < lad.limit
    rows = [[k, s, lad.limit] for k, s in enumerate(lad.s)]
    run.add_file("ladder.csv", csv_text(["j", "s_j[1]", "limit[1]"], rows, run.chash))
    return ok, dict(N=N, p=p, limit=lad.limit, s_last=lad.s[-1])


def _check_exact_residual(run, cfg, mesh, datum, scfg):
    sol = _require_oracle(mesh, datum)
    res = exact_residual(sol, mesh)
    if res is None:
        return True, dict(case=sol.case)
    return max(res.core, res.plateau) <= 1e-10, dict(core=res.core, plateau=res.plateau)


def _require_oracle(mesh, datum):
    sol = _oracle_for(mesh, datum)
    if sol is None:
        raise ConfigError("this check needs a radial geometry and a power-law datum")
    return sol


def _check_regularity(run, cfg, mesh, datum, scfg):
    sol = _require_oracle(mesh, datum)
    rep = V.regularity_probe(sol.N, sol.lam, sol.q, R=sol.R)
    lo, hi = sorted(rep.verdicts)
    ok = (abs(rep.alpha_fit - rep.alpha_predicted) <= 0.05 * rep.alpha_predicted
          and rep.verdicts[lo] == "stabilizes" and rep.verdicts[hi] == "grows")
    return ok, dict(alpha_fit=rep.alpha_fit, alpha_predicted=rep.alpha_predicted, s_star=rep.s_star,
                    verdicts={fmt(k): v for k, v in rep.verdicts.items()})


def _check_power_identity(run, cfg, mesh, datum, scfg):
    sol = _require_oracle(mesh, datum)
    fine = build_radial_mesh(sol.N, sol.R, _num(cfg, "verify.identity_n", int), 3.0)
    ms = cfg["verify.m"]
    if ms is None:
        # three powers inside the admissible range 1 < m < (N - q)/(q - 1)
        top = (sol.N - sol.q) / (sol.q - 1) if sol.q > 1 else 0.0
        if top <= 1:
            raise PreconditionError(f"no admissible power: need 1 < m < (N-q)/(q-1) = {top}")
        ms = [1 + (top - 1) * k / 4 if math.isfinite(top) else 1.0 + k for k in (1, 2, 3)]
    gaps = {}
    for m in _as_list(ms):
        _, _, gap = V.power_identity_check(sol, float(m), fine)
        gaps[fmt(m)] = gap
    return all(g <= 5e-3 for g in gaps.values()), dict(gaps=gaps)


def _check_gradient_bound(run, cfg, mesh, datum, scfg):
    sol = _require_oracle(mesh, datum)
    rng = np.random.default_rng(cfg["seed"])
    N, q = sol.N, sol.q
    draws = []
    for _ in range(_num(cfg, "verify.bound_draws", int)):
        p = float(rng.uniform(1.05, N / q - 0.05)) if N / q > 1.1 else None
        if p is None:
            raise ConfigError("gradient bound needs N/q > 1.1")
        pc = p / (p - 1)
        mmax = N / ((q - 1) * pc) if q > 1 else 4.0
        m = float(rng.uniform(0.1, 0.9) * min(mmax, 4.0))
        lhs, rhs, ok = V.gradient_power_bound_check(sol, m, p, mesh)
        draws.append(dict(m=m, p=p, lhs=lhs, rhs=rhs, passed=ok))
    return all(d["passed"] for d in draws), dict(draws=draws)


def _check_comparison(run, cfg, mesh, datum, scfg, oracle=False):
    res = V.comparison_suite(int(cfg["seed"]), _num(cfg, "verify.count", int), str(cfg["verify.family"]),
                             mesh, scfg, oracle=oracle)
    return res.passed, dict(worst=res.worst, pairs=len(res.pairs),
                            failed=[p.index for p in res.pairs if not p.passed])


def _check_plateau(run, cfg, mesh, datum, scfg):
    sol = _require_oracle(mesh, datum)
    rep = solve(mesh, datum, scfg)
    tol = 10 * scfg.tau_res
    probe = V.plateau_probe(rep.u, sol, tol, rep.eps)
    ok = probe.passed and probe.max_plateau <= tol
    return ok, dict(detected=probe.detected, target=probe.target, window=probe.window,
                    max_plateau=probe.max_plateau)


_CHECK_FUNCS = {
    "ladder": _check_ladder,
    "exact_residual": _check_exact_residual,
    "regularity": _check_regularity,
    "power_identity": _check_power_identity,
    "gradient_bound": _check_gradient_bound,
    "comparison": _check_comparison,
    "comparison_oracle": lambda *a: _check_comparison(*a, oracle=True),
    "plateau": _check_plateau,
}


def run_verify(run: Run, mesh, datum, scfg):
    checks = _as_list(run.cfg["verify.checks"])
    rows = []
    for name in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = _CHECK_FUNCS[name](run, run.cfg, mesh, datum, scfg)
        except (PreconditionError, DomainError) as exc:
            ok, detail = False, dict(error=str(exc))
        run.timings[name] = time.perf_counter() - t0
        run.verdict(name, ok, **detail)
        rows.append([name, "PASS" if ok else "FAIL"])
    run.add_file("verdicts.csv", csv_text(["check", "verdict"], rows, run.chash))
    return EXIT_OK if all(v["passed"] for v in run.verdicts) else EXIT_VERIFY


def _sweep_row(job):
    index, N, q, lam, n, eps_min, cfg = job
    row = dict(index=index, N=N, q=q, lam=lam, n=n, eps_min=eps_min)
    try:
        mesh = build_radial_mesh(int(N), float(cfg["geometry.R"]), int(n), float(cfg["geometry.grading"]))
        datum = PowerLaw(float(lam), float(q))
        validate_datum(datum, mesh)
        c = dict(cfg)
        if eps_min is not None:
            c["solver.eps_min"] = eps_min
        rep = solve(mesh, datum, build_solver_config(c))
        r = np.asarray(mesh.nodes)
        err = np.nan
        plateau_max = np.nan
        if q != 1:
            sol = build_exact(mesh.N, mesh.R, datum.lam, datum.q)
            ue, unbounded = sample_u(sol, r)
            keep = (r >= 0.01 * mesh.R) & ~unbounded
            err = float(np.max(np.abs(rep.u.values - ue)[keep]))
            if sol.case == SINGULAR and sol.has_plateau:
                plateau_max = float(np.max(np.abs(rep.u.values[r >= sol.core_radius])))
            elif sol.case == TRIVIAL:
                plateau_max = rep.max_abs
        row.update(converged=rep.converged, iterations=int(sum(rep.iterations)), residual=rep.residual,
                   error=err, plateau_max=plateau_max, eps=rep.eps, h=mesh.h,
                   verdict="PASS" if rep.converged else "FAIL")
    except (ConfigurationError, DataError, DomainError, ConfigError) as exc:
        row.update(converged=False, iterations=0, residual=np.nan, error=np.nan, plateau_max=np.nan,
                   eps=np.nan, h=np.nan, verdict=f"FAIL: {exc}".replace(",", ";"))
    return row


def run_sweep(run: Run, mesh, datum, scfg):
    cfg = run.cfg
    axes = {
        "N": _as_list(cfg["sweep.N"]) if cfg["sweep.N"] is not None else [cfg["geometry.N"]],
        "q": _as_list(cfg["sweep.q"]) if cfg["sweep.q"] is not None else [cfg["datum.q"]],
        "lambda": _as_list(cfg["sweep.lambda"]) if cfg["sweep.lambda"] is not None else [cfg["datum.lambda"]],
        "n": _as_list(cfg["sweep.n"]) if cfg["sweep.n"] is not None else [cfg["geometry.n"]],
        "eps_min": _as_list(cfg["sweep.eps_min"]) if cfg["sweep.eps_min"] is not None else [cfg["solver.eps_min"]],
    }
    combos = list(product(axes["N"], axes["q"], axes["lambda"], axes["n"], axes["eps_min"]))
    jobs = [(i, *c, cfg) for i, c in enumerate(combos)]
    t0 = time.perf_counter()
    rows = V.ordered_map(_sweep_row, jobs)
    run.timings["sweep"] = time.perf_counter() - t0
    cols = ["index", "N", "q", "lam", "n", "eps_min", "h", "eps", "converged", "iterations",
            "residual", "error", "plateau_max", "verdict"]
    header = ["index", "N[1]", "q[1]", "lambda[1]", "n[1]", "eps_min[length]", "h[length]",
              "eps[length]", "converged", "iterations", "residual[1]", "error[1]",
              "plateau_max[1]", "verdict"]
    table = [["" if row[c] is None else row[c] for c in cols] for row in rows]
    run.add_file("sweep.csv", csv_text(header, table, run.chash))
    for row in rows:
        run.verdict(f"row {row['index']}", row["verdict"] == "PASS")
    if all(row["verdict"] != "PASS" for row in rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


COMMANDS = {"exact": run_exact, "solve": run_solve, "verify": run_verify, "sweep": run_sweep}


def _validate(command, cfg):
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise ConfigError("seed must be an integer")
    mesh = build_mesh(cfg)
    datum = build_datum(cfg)
    validate_datum(datum, mesh)
    scfg = build_solver_config(cfg)
    scfg.schedule(1.0 if not hasattr(mesh, "R") else mesh.R)
    if command == "verify":
        for name in _as_list(cfg["verify.checks"]):
            if name not in CHECKS:
                raise ConfigError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    if command == "sweep":
        for key in ("sweep.N", "sweep.q", "sweep.lambda", "sweep.n", "sweep.eps_min"):
            if cfg[key] is not None and _as_list(cfg[key]) == []:
                raise ConfigError(f"{key} is empty")
        if cfg["geometry.kind"] != "radial":
            raise ConfigError("sweeps run on radial geometries")
    return mesh, datum, scfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onelaplace", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="flat dotted-key config file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, help="random seed (overrides the config)")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = parse_config(args.config.read_text(encoding="utf-8")) if args.config else {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            raw[k.strip()] = parse_value(v)
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = resolve_config(raw)
        mesh, datum, scfg = _validate(args.command, cfg)
    except (OSError, ConfigError, ConfigurationError, DataError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    planned = _planned_files(args.command)
    if args.command == "verify" and "ladder" in _as_list(cfg["verify.checks"]):
        planned.append("ladder.csv")
    existing = [name for name in planned if (args.out / name).exists()]
    if existing and not args.force:
        print(f"error: refusing to overwrite {', '.join(existing)} (use --force)", file=sys.stderr)
        return EXIT_CONFIG

    run = Run(args.command, cfg, config_hash(args.command, cfg), args.out, {}, [], {}, {})
    try:
        code = COMMANDS[args.command](run, mesh, datum, scfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write(run)
    for v in run.verdicts:
        print(f"{'PASS' if v['passed'] else 'FAIL'} {v['check']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
