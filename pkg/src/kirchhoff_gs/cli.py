"""Command line front end.

    kirchhoff-gs validate      [--config FILE] [--out DIR]
    kirchhoff-gs groundstate   [--config FILE] [--out DIR]
    kirchhoff-gs lift          [--config FILE] [--out DIR]
    kirchhoff-gs moser         [--config FILE] [--out DIR]
    kirchhoff-gs semiclassical [--config FILE] [--out DIR] [--eps 0.5,0.2]

Exit codes: 0 success, 1 domain or solver failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import functionals, moser2d, semiclassical
from .coefficient import Constant, validate_M
from .config import ConfigError, RunConfig, load_config, moser_beta0, parse_config
from .exceptions import KirchhoffError
from .groundstate import find_ground_state
from .nonlinearity import validate_growth
from .radial import radial_grid, write_profile_csv
from .rescaling import lift

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


def _write_json(obj, out, name):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True)
    if out:
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text + "\n")
    return text


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def _grid(cfg: RunConfig):
    g = cfg.grid
    return radial_grid(float(g["h"]), float(g["r_uniform"]), float(g["r_max"]), float(g["growth"]))


def validation_report(cfg: RunConfig) -> dict:
    growth = validate_growth(cfg.problem.spec, cfg.problem.m)
    coeff = validate_M(cfg.coeff, cfg.N)
    failed = [k for k, ok in (("F1", growth.passes_F1), ("F2", growth.passes_F2), ("F3", growth.passes_F3)) if not ok]
    failed += coeff.failed()
    report = {"growth": growth.to_dict(), "coefficient": coeff.to_dict(), "failed": failed}
    if cfg.pot is not None:
        chk = cfg.pot.check()
        report["potential"] = chk
        failed += [k for k in ("V1", "V2") if not chk[k]]
    report["ok"] = not failed
    return report


def cmd_validate(cfg: RunConfig, args) -> int:
    report = validation_report(cfg)
    summary = {"config": cfg.resolved(), "ok": report["ok"], "failed": report["failed"]}
    _write_json({**summary, "report": report}, args.out, "validate.json")
    print(json.dumps(_jsonable(summary), sort_keys=True))
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _ground_state(cfg: RunConfig):
    return find_ground_state(cfg.problem, cfg.shooting, grid=_grid(cfg))


def _moser_warnings(cfg: RunConfig, summary: dict) -> None:
    """Linked criticality check for N = 2; problems become warnings, never failures."""
    try:
        n = moser2d.criticality_scan(cfg.problem.spec, cfg.problem.m, int(cfg.moser["n_max"]),
                                     cfg.moser.get("r"), moser_beta0(cfg))
    except KirchhoffError as exc:
        n = None
        summary["warnings"].append(f"moser check failed: {exc}")
    summary["moser_n"] = n
    if n is None:
        summary["warnings"].append(f"moser scan found no n <= {int(cfg.moser['n_max'])} with max level below 1/2")


def cmd_groundstate(cfg: RunConfig, args) -> int:
    report = validation_report(cfg)
    if not report["ok"]:
        print(f"hypotheses failed: {report['failed']}", file=sys.stderr)
        return EXIT_FAIL
    summary = {"config": cfg.resolved(), "warnings": []}
    if cfg.N == 2:
        _moser_warnings(cfg, summary)
    try:
        gs = _ground_state(cfg)
    except KirchhoffError as exc:
        summary["error"] = f"{type(exc).__name__}: {exc}"
        _write_json(summary, args.out, "summary.json")
        print(f"groundstate failed: {summary['error']}", file=sys.stderr)
        for w in summary["warnings"]:
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_FAIL
    local = {**gs.summary(), "energy_report": functionals.energy_report(gs).to_dict()}
    if isinstance(cfg.coeff, Constant) and cfg.coeff.a == 1.0:
        # M = 1 is the local problem itself
        v, kirchhoff = gs.profile, dict(local)
    else:
        lr = lift(gs, cfg.coeff)
        energies = functionals.energy_report(gs, cfg.coeff, lr.v)
        v, kirchhoff = lr.v, {**lr.summary(), "energy_report": energies.to_dict()}
    summary.update(local=local, kirchhoff=kirchhoff)
    if args.out:
        write_profile_csv(gs.profile, os.path.join(args.out, "profile.csv"))
        write_profile_csv(v, os.path.join(args.out, "kirchhoff_profile.csv"))
    print(_write_json(summary, args.out, "summary.json"))
    return EXIT_OK


def cmd_lift(cfg: RunConfig, args) -> int:
    gs = _ground_state(cfg)
    lr = lift(gs, cfg.coeff)
    if args.out:
        write_profile_csv(lr.v, os.path.join(args.out, "kirchhoff_profile.csv"))
    print(_write_json({"config": cfg.resolved(), "lift": lr.summary(), "local": gs.summary()}, args.out, "lift.json"))
    return EXIT_OK


def cmd_moser(cfg: RunConfig, args) -> int:
    if cfg.N != 2:
        print("the Moser scan needs N = 2", file=sys.stderr)
        return EXIT_FAIL
    rows = moser2d.criticality_table(cfg.problem.spec, cfg.problem.m, int(cfg.moser["n_max"]),
                                     cfg.moser.get("r"), moser_beta0(cfg))
    found = rows[-1].n if rows and rows[-1].max_value < 0.5 else None
    if args.out:
        _write_csv(os.path.join(args.out, "moser_scan.csv"), ["n", "t_star", "max_value", "mass_log"],
                   [r.as_tuple() for r in rows])
    summary = {"config": cfg.resolved(), "n_found": found,
               "note": "found" if found is not None else "not found: no n <= n_max with max level below 1/2",
               "rows": [r.as_tuple() for r in rows]}
    print(_write_json(summary, args.out, "moser.json"))
    return EXIT_OK


def cmd_semiclassical(cfg: RunConfig, args) -> int:
    if cfg.pot is None:
        print("semiclassical needs problem.pot", file=sys.stderr)
        return EXIT_USAGE
    gs = _ground_state(cfg)
    lim = semiclassical.limit_state(gs, cfg.coeff)
    eps = [float(e) for e in cfg.semiclassical["eps"]]
    sweep = semiclassical.continuation_sweep(cfg.pot, lim.spec, cfg.coeff, eps, lim,
                                             damping=float(cfg.semiclassical["damping"]),
                                             max_outer=int(cfg.semiclassical["max_outer"]))
    header = ["eps", "x_eps_dist", "sup_dist", "h1_dist", "spike", "coeff", "decay_C", "decay_c"]
    if args.out:
        _write_csv(os.path.join(args.out, "sweep.csv"), header, [[r.row()[k] for k in header] for r in sweep])
        pdir = os.path.join(args.out, "profiles")
        os.makedirs(pdir, exist_ok=True)
        for r in sweep:
            write_profile_csv(r.profile, os.path.join(pdir, f"eps_{r.eps!r}.csv"))
    summary = {"config": cfg.resolved(), "kappa": lim.kappa, "k": lim.k, "theta_limit": lim.theta,
               "failed_eps": sweep.failed_eps, "error": sweep.error}
    if len(sweep):
        summary["diagnostics"] = semiclassical.concentration_diagnostics(sweep, gs, lim.kappa)
        summary["coefficient_bounds"] = semiclassical.coefficient_bounds(sweep, cfg.coeff, lim)
    print(_write_json(summary, args.out, "summary.json"))
    return EXIT_FAIL if sweep.failed_eps is not None else EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "groundstate": cmd_groundstate,
    "lift": cmd_lift,
    "moser": cmd_moser,
    "semiclassical": cmd_semiclassical,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kirchhoff-gs", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON configuration file (defaults to the built-in N=3 problem)")
    p.add_argument("--out", help="directory for CSV/JSON artifacts")
    p.add_argument("--eps", help="comma separated eps list overriding semiclassical.eps")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.eps is not None:
            eps = [float(x) for x in args.eps.split(",") if x.strip()]
            raw = cfg.resolved()
            raw["semiclassical"]["eps"] = eps
            cfg = parse_config(raw)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, args)
    except (KirchhoffError, FloatingPointError) as exc:
        print(f"{args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
