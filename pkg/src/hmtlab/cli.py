"""Command-line driver: experiment orchestration and deterministic reports.

Subcommands: green, verify, sweep, search, rearrange-demo.  Configuration
comes from an optional JSON file of flat keys mirroring the flags, with
command-line flags taking precedence.  Outputs are JSON or CSV with every
file embedding the resolved config and a format version string; identical
config and seed reproduce outputs byte for byte (floats are emitted with
repr / 17 significant digits and nothing time- or host-dependent is
written).

Exit codes: 0 success, 1 configuration or validation error, 2 numerical
failure or violated certification.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import FORMAT_VERSION
from .errors import ConvergenceError, CorruptTableError, HmtError
from .extremal import (
    MoserParams,
    SearchOptions,
    boundedness_sweep,
    bump_corpus,
    divergence_probe,
    estimate_lambda1,
    improved_sweep,
    maximize_mt,
    seeded_corpus,
)
from .functionals import (
    Potential,
    RadialProfile,
    check_hardy_littlewood,
    check_polya_szego,
    hyperbolic_ln_norm_pow,
    rearrange,
)
from .green import GreenTable, check_boundary_bound, image_t_grid, make_maps, solve_green
from .quad_core import RadialGrid, make_grid
from .transplant import transplant_report

DEFAULTS: Dict[str, Any] = {
    "n": 2,
    "beta": 0.0,
    "potential": "hardy",
    "grid_points": 2048,
    "epsilon": 1e-6,
    "tol": 1e-8,
    "seed": 1234,
    "out": None,
    "format": "json",
    "mode": None,
    "scale": 1.0,
    "k_min": 1,
    "k_max": 20,
    "corpus_size": 20,
    "t_points": 4096,
    "margin_tol": 1e-6,
    "max_iter": 300,
    "lam": None,
    "lambda1": None,
    "green_table": None,
}


class _CliError(Exception):
    """Validation problem that should exit with code 1."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); remap to config error
        raise _CliError(message)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="hmtlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, help="JSON config file of flat keys")
        p.add_argument("--n", type=int)
        p.add_argument("--beta", type=float)
        p.add_argument("--potential", type=str,
                       help="zero | hardy | hardy+lambda=<x> | const=<x>")
        p.add_argument("--grid-points", dest="grid_points", type=int)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--format", choices=("json", "csv"))

    p_green = sub.add_parser("green", help="solve the Green function and extract its pole data")
    common(p_green)

    p_verify = sub.add_parser("verify", help="run the transplant certification corpus")
    common(p_verify)
    p_verify.add_argument("--corpus-size", dest="corpus_size", type=int)
    p_verify.add_argument("--t-points", dest="t_points", type=int)
    p_verify.add_argument("--margin-tol", dest="margin_tol", type=float)
    p_verify.add_argument("--green-table", dest="green_table", type=str,
                          help="validate an existing Green table JSON instead of solving")

    p_sweep = sub.add_parser("sweep", help="Moser/boundary families through the MT functionals")
    common(p_sweep)
    p_sweep.add_argument("--mode", choices=("boundedness", "divergence", "improved"))
    p_sweep.add_argument("--scale", type=float, help="exponent scale (boundedness mode)")
    p_sweep.add_argument("--k-min", dest="k_min", type=int)
    p_sweep.add_argument("--k-max", dest="k_max", type=int)
    p_sweep.add_argument("--lam", type=float, help="lambda for the improved sweep")
    p_sweep.add_argument("--lambda1", type=float, help="lambda_1 estimate the improved sweep checks against")

    p_search = sub.add_parser("search", help="constrained maximization / lambda_1 estimation")
    common(p_search)
    p_search.add_argument("--mode", choices=("mt", "lambda1"))
    p_search.add_argument("--max-iter", dest="max_iter", type=int)

    p_rear = sub.add_parser("rearrange-demo", help="rearrange a seeded bump profile and report margins")
    common(p_rear)
    return parser


def _resolve_config(args: argparse.Namespace) -> Dict[str, Any]:
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path:
        try:
            file_cfg = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise _CliError(f"cannot read config file {path}: {exc}") from exc
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise _CliError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["command"] = args.command
    return cfg


def _validate(cfg: Dict[str, Any]) -> None:
    if not isinstance(cfg["n"], int) or cfg["n"] < 2:
        raise _CliError(f"--n must be an integer >= 2, got {cfg['n']}")
    if not (0.0 <= float(cfg["beta"]) < cfg["n"]):
        raise _CliError(f"--beta must lie in [0, n), got {cfg['beta']} with n={cfg['n']}")
    if cfg["grid_points"] < 16:
        raise _CliError(f"--grid-points must be >= 16, got {cfg['grid_points']}")
    if not (0.0 < float(cfg["epsilon"]) < 0.5):
        raise _CliError(f"--epsilon must lie in (0, 0.5), got {cfg['epsilon']}")
    if float(cfg["tol"]) <= 0.0:
        raise _CliError("--tol must be positive")
    if cfg["format"] not in ("json", "csv"):
        raise _CliError(f"--format must be json or csv, got {cfg['format']}")


def _parse_potential(text: str) -> Potential:
    if text == "zero":
        return Potential.zero()
    if text == "hardy":
        return Potential.hardy_critical()
    if text.startswith("hardy+lambda="):
        return Potential.hardy_plus_lambda(float(text.split("=", 1)[1]))
    if text.startswith("const="):
        return Potential.constant(float(text.split("=", 1)[1]))
    raise _CliError(f"unknown potential {text!r}")


def _config_for_output(cfg: Dict[str, Any]) -> Dict[str, Any]:
    # the output path is I/O plumbing, not experiment configuration; embedding
    # it would break byte-identical reproduction across destinations
    return {k: cfg[k] for k in sorted(cfg) if k != "out"}


def _emit_json(payload: Dict[str, Any], cfg: Dict[str, Any]) -> str:
    doc = {"format_version": FORMAT_VERSION, "config": _config_for_output(cfg)}
    doc.update(payload)
    return json.dumps(doc, indent=2) + "\n"


def _emit_csv(header: List[str], rows: List[List[Any]], cfg: Dict[str, Any]) -> str:
    lines = [
        f"# format_version={FORMAT_VERSION}",
        "# config=" + json.dumps(_config_for_output(cfg)),
        ",".join(header),
    ]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, float):
                cells.append(f"{cell:.17g}")
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _write(text: str, cfg: Dict[str, Any]) -> None:
    if cfg["out"]:
        Path(cfg["out"]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_green(cfg: Dict[str, Any]) -> int:
    potential = _parse_potential(cfg["potential"])
    grid = make_grid(cfg["grid_points"], float(cfg["epsilon"]))
    try:
        table = solve_green(cfg["n"], potential, grid, tol=float(cfg["tol"]))
    except ConvergenceError as exc:
        print(f"green: {exc}", file=sys.stderr)
        return 2
    payload = dict(table.to_json_dict())
    payload["boundary_bound_constant"] = check_boundary_bound(table)
    _write(_emit_json(payload, cfg), cfg)
    return 0


def _load_green_table(path: str) -> GreenTable:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    from .quad_core import GridGrading, make_constants

    r = np.asarray(doc["r"], dtype=float)
    grid = RadialGrid(nodes=r, s=1.0 - r, xi=np.log(r), epsilon=float(doc["epsilon"]),
                      grading=GridGrading())
    g_vals = np.asarray(doc["G"], dtype=float)
    g_deriv = np.asarray(doc["Gprime"], dtype=float)
    remainder = np.asarray(doc["remainder"], dtype=float)
    potential = _parse_potential(doc.get("potential", "hardy"))
    c = make_constants(int(doc["n"]))
    flux = -(c.omega ** (1.0 / (int(doc["n"]) - 1))) * g_deriv * r
    m_vals = np.maximum(flux, 1.0) ** (int(doc["n"]) - 1) - 1.0
    return GreenTable(
        grid=grid, n=int(doc["n"]), potential=potential, g_values=g_vals,
        g_deriv=g_deriv, m_values=m_vals, flux=flux, c_g=float(doc["c_g"]),
        remainder=remainder, residual=float(doc["residual"]),
        epsilon_used=float(doc["epsilon"]), iterations=int(doc.get("iterations", 0)),
        tol=float(doc.get("tol", 1e-8)),
    )


def _cmd_verify(cfg: Dict[str, Any]) -> int:
    if cfg["green_table"]:
        try:
            table = _load_green_table(cfg["green_table"])
            table.validate()
        except (OSError, KeyError, ValueError, CorruptTableError) as exc:
            print(f"verify: green table rejected: {exc}", file=sys.stderr)
            return 2
        _write(_emit_json({"green_table": "valid"}, cfg), cfg)
        return 0

    potential = _parse_potential(cfg["potential"])
    grid = make_grid(cfg["grid_points"], float(cfg["epsilon"]))
    table = solve_green(cfg["n"], potential, grid, tol=float(cfg["tol"]))
    if potential.is_zero():
        # identity transplantation: the image grid makes defects exact to rounding
        maps = make_maps(table, beta=float(cfg["beta"]), t_grid=image_t_grid(table))
    else:
        maps = make_maps(table, beta=float(cfg["beta"]), n_t=cfg["t_points"])
    corpus = seeded_corpus(grid, cfg["n"], cfg["corpus_size"], cfg["seed"], normalized=True)
    reports = [transplant_report(u, maps, beta=float(cfg["beta"])) for u in corpus]

    margin_tol = float(cfg["margin_tol"])
    worst: Optional[str] = None
    for i, rep in enumerate(reports):
        for name, margin in (("key", rep.key_margin), ("hardy_lemma", rep.hardy_lemma_margin),
                             ("mt_comparison", rep.mt_comparison_margin)):
            if margin < -margin_tol and worst is None:
                worst = f"profile {i}: {name} margin {margin:.3e} < -{margin_tol:g}"
    summary = {
        "profiles": len(reports),
        "min_key_margin": min(r.key_margin for r in reports),
        "min_hardy_lemma_margin": min(r.hardy_lemma_margin for r in reports),
        "min_mt_comparison_margin": min(r.mt_comparison_margin for r in reports),
        "max_grad_defect": max(r.identity_grad_defect for r in reports),
        "max_hardy_defect": max(r.identity_hardy_defect for r in reports),
        "violation": worst,
    }
    payload = {"summary": summary, "reports": [r.to_dict() for r in reports]}
    _write(_emit_json(payload, cfg), cfg)
    if worst is not None:
        print(f"verify: {worst}", file=sys.stderr)
        return 2
    return 0


def _cmd_sweep(cfg: Dict[str, Any]) -> int:
    mode = cfg["mode"]
    if mode not in ("boundedness", "divergence", "improved"):
        raise _CliError("sweep requires --mode boundedness|divergence|improved")
    n = cfg["n"]
    beta = float(cfg["beta"])
    grid = make_grid(cfg["grid_points"], float(cfg["epsilon"]))
    ks = range(int(cfg["k_min"]), int(cfg["k_max"]) + 1)

    if mode == "boundedness":
        family = [MoserParams(rho=2.0 ** (-k), n=n) for k in ks]
        points = boundedness_sweep(n, beta, family, float(cfg["scale"]), grid)
        header = ["param", "value", "overflow", "divergence_flag"]
        rows = [[p.param, p.value, p.overflow, p.divergence_flag] for p in points]
        json_rows = [p._asdict() for p in points]
    elif mode == "divergence":
        probe = divergence_probe(n, beta, list(ks), grid)
        header = ["param", "value", "overflow", "divergence_flag", "truncation_m"]
        rows = []
        for row in probe:
            rows.append([row.param, row.value_low, False, row.flag_low, n - 1])
            rows.append([row.param, row.value_high, False, row.flag_high, n])
        json_rows = [r._asdict() for r in probe]
    else:
        if cfg["lam"] is None or cfg["lambda1"] is None:
            raise _CliError("improved sweep requires --lam and --lambda1")
        family = [MoserParams(rho=2.0 ** (-k), n=n) for k in ks]
        points = improved_sweep(n, beta, float(cfg["lam"]), family, grid, float(cfg["lambda1"]))
        header = ["param", "value", "overflow", "divergence_flag"]
        rows = [[p.param, p.value, p.overflow, p.divergence_flag] for p in points]
        json_rows = [p._asdict() for p in points]

    if cfg["format"] == "csv":
        _write(_emit_csv(header, rows, cfg), cfg)
    else:
        _write(_emit_json({"rows": json_rows}, cfg), cfg)
    return 0


def _cmd_search(cfg: Dict[str, Any]) -> int:
    mode = cfg["mode"]
    if mode not in ("mt", "lambda1"):
        raise _CliError("search requires --mode mt|lambda1")
    n = cfg["n"]
    grid = make_grid(cfg["grid_points"], float(cfg["epsilon"]))
    options = SearchOptions(max_iter=int(cfg["max_iter"]), seed=int(cfg["seed"]))
    if mode == "mt":
        start = RadialProfile(grid, 0.5 * grid.one_minus_r2)
        report = maximize_mt(n, float(cfg["beta"]), grid, start, options)
    else:
        report = estimate_lambda1(n, grid, options)
    if cfg["format"] == "csv":
        header = ["param", "value", "overflow", "divergence_flag"]
        rows = [[float(i), v, False, False] for i, v in report.trajectory]
        _write(_emit_csv(header, rows, cfg), cfg)
    else:
        _write(_emit_json({"search": report.to_dict()}, cfg), cfg)
    return 0


def _cmd_rearrange_demo(cfg: Dict[str, Any]) -> int:
    n = cfg["n"]
    grid = make_grid(cfg["grid_points"], float(cfg["epsilon"]))
    profile = bump_corpus(grid, n, 1, cfg["seed"])[0]
    star = rearrange(profile, n)
    ps = check_polya_szego(profile, n)
    payload = {
        "polya_szego_margin": ps.margin,
        "polya_szego_h_margin": ps.h_margin,
        "hardy_littlewood_margin": check_hardy_littlewood(profile, n, float(cfg["beta"])),
        "ln_hyperbolic_before": hyperbolic_ln_norm_pow(profile, n),
        "ln_hyperbolic_after": hyperbolic_ln_norm_pow(star, n),
        "r": grid.nodes.tolist(),
        "u": profile.values.tolist(),
        "u_star": star.values.tolist(),
    }
    if cfg["format"] == "csv":
        header = ["r", "u", "u_star"]
        rows = [[r, u, s] for r, u, s in zip(grid.nodes, profile.values, star.values)]
        _write(_emit_csv(header, rows, cfg), cfg)
    else:
        _write(_emit_json(payload, cfg), cfg)
    return 0


_COMMANDS = {
    "green": _cmd_green,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "search": _cmd_search,
    "rearrange-demo": _cmd_rearrange_demo,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args)
        _validate(cfg)
        return _COMMANDS[args.command](cfg)
    except _CliError as exc:
        print(f"hmtlab: {exc}", file=sys.stderr)
        return 1
    except HmtError as exc:
        # domain/convergence failures from the library layer
        from .errors import (
            ConvergenceError,
            CorruptTableError,
            DiscretizationFailureError,
            PotentialInstabilityError,
        )

        numerical = (ConvergenceError, CorruptTableError, DiscretizationFailureError,
                     PotentialInstabilityError)
        code = 2 if isinstance(exc, numerical) else 1
        print(f"hmtlab: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
