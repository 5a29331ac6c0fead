"""Command-line entry point ``rydpolaron``."""

import argparse
import json
import logging
import math
import os
import sys

from . import config as cfgmod
from . import output
from .basis import build_k_sector
from .exceptions import ConfigError, InvalidParameterError, PolaronError
from .hamiltonian import assemble_sector
from .model import VertexParams, bare_dispersion, effective_lambda_quadrature
from .params import (
    coupling_constants,
    bare_params,
    dimensionless_couplings,
    lambda_ss_physical,
    sweet_spot_detuning,
    sweet_spot_zeta,
)
from .scan import (
    convergence_study,
    find_critical,
    lambda_model,
    rabi_model,
    solve_point,
    sweep_lambda,
    sweep_rabi,
    transitions,
)

SUBCOMMANDS = ("map-params", "spectrum", "scan-lambda", "scan-omega", "find-critical", "converge", "dump-basis")
RABI_CURVE_NOTE = "omega_ph for the transitioning Rabi curve is an assumption; see README"


def _resolved(args):
    cfg = cfgmod.load(args.config, args.set)
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", 0)
    return cfg


def _tol(cfg):
    return cfg.get("tol", 1e-10)


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_map_params(args, cfg):
    p = cfgmod.physical_params(cfg)
    eps_e, t_e = bare_params(p)
    g_p, g_b = dimensionless_couplings(p)
    xi_b, xi_p = coupling_constants(p)
    doc = {
        "zeta": p.zeta,
        "zeta_ss": sweet_spot_zeta(),
        "detuning_rad_s": p.detuning,
        "detuning_ss_rad_s": sweet_spot_detuning(p.c3, p.spacing),
        "alpha": p.alpha,
        "rabi_rad_s": p.rabi,
        "eps_e": eps_e,
        "t_e": t_e,
        "xi_b_N": xi_b,
        "xi_p_N": xi_p,
        "g_p": g_p,
        "g_b": g_b,
        "lambda": effective_lambda_quadrature(VertexParams(g_p, g_b), t_e),
        "adiabaticity": 1.0 / abs(t_e) if t_e else math.inf,
    }
    if cfg.get("sweet_spot"):
        doc["lambda_closed_form"] = lambda_ss_physical(p)
    doc = output.report("map-params", cfgmod.render(cfg), **doc)
    output.write_json(os.path.join(args.out, "map_params.json"), doc)
    _emit(doc)


def cmd_spectrum(args, cfg):
    mp = cfgmod.model_params(cfg)
    pt = solve_point(mp, seed=cfg["seed"], tol=_tol(cfg), threads=args.threads)
    rows = []
    for lab in sorted(pt.sector_energies):
        k = 2 * math.pi * lab / mp.n_sites
        rows.append(
            {
                "K_over_pi": 2 * lab / mp.n_sites,
                "E": pt.sector_energies[lab],
                "bare_band": float(bare_dispersion(k, 0.0, mp.t_e)),
                "residual": pt.residuals[lab],
            }
        )
    path = os.path.join(args.out, "spectrum.csv")
    with open(path, "w") as fh:
        fh.write("K_over_pi,E,bare_band,residual\n")
        for r in rows:
            fh.write(f"{r['K_over_pi']!r},{r['E']!r},{r['bare_band']!r},{r['residual']!r}\n")
    if "sector" in cfg:
        h = assemble_sector(mp, cfg["sector"] % mp.n_sites)
        h.write_matrix_market(os.path.join(args.out, f"block_j{cfg['sector'] % mp.n_sites}.mtx"))
    doc = output.report("spectrum", cfgmod.render(cfg), sectors=rows, ground=pt.as_dict())
    output.write_json(os.path.join(args.out, "spectrum.json"), doc)
    for r in rows:
        print(f"{r['K_over_pi']:+.4f}  {r['E']:.12f}")


def _write_scan(args, cfg, name, points, meta=None):
    lines = cfgmod.render(cfg)
    output.write_csv(os.path.join(args.out, f"{name}.csv"), points, lines, meta)
    idx = transitions(points)
    doc = output.report(
        name,
        lines,
        meta=meta or {},
        points=[p.as_dict() for p in points],
        transitions=[
            {
                "bracket": [points[i - 1].knob, points[i].knob],
                "K_before_over_pi": points[i - 1].k_gs_over_pi,
                "K_after_over_pi": points[i].k_gs_over_pi,
            }
            for i in idx
        ],
    )
    output.write_json(os.path.join(args.out, f"{name}.json"), doc)
    print(os.path.join(args.out, f"{name}.csv"))


def cmd_scan_lambda(args, cfg):
    mp = cfgmod.model_params(cfg)
    grid = cfgmod.grid(cfg, "lambda")
    pts = sweep_lambda(grid, mp, seed=cfg["seed"], tol=_tol(cfg), threads=args.threads)
    _write_scan(args, cfg, "scan_lambda", pts, {"knob": "lambda", "t_e": mp.t_e, "eps_e": mp.eps_e})


def _swept_physical(cfg, rabi):
    # a Rabi sweep sets the dressing itself, so alpha is optional here
    if "alpha" not in cfg and "rabi_rad_s" not in cfg:
        cfg = {**cfg, "rabi_rad_s": rabi}
    return cfgmod.physical_params(cfg)


def cmd_scan_omega(args, cfg):
    grid = cfgmod.grid(cfg, "rabi")
    if not grid:
        raise ConfigError("empty Rabi grid", key="rabi_grid_rad_s")
    p = _swept_physical(cfg, grid[0])
    n, m = cfg.get("n_sites"), cfg.get("max_phonons")
    if n is None or m is None:
        raise ConfigError("missing required key n_sites/max_phonons", key="n_sites" if n is None else "max_phonons")
    pts = sweep_rabi(grid, p, n, m, seed=cfg["seed"], tol=_tol(cfg), threads=args.threads)
    meta = {"knob": "rabi_rad_s", "omega_ph_rad_s": p.omega_ph, "note": RABI_CURVE_NOTE}
    _write_scan(args, cfg, "scan_omega", pts, meta)


def _knob_model(cfg):
    knob = cfg.get("knob", "lambda")
    if knob == "lambda":
        mp = cfgmod.model_params(cfg)
        return knob, lambda x: lambda_model(x, mp)
    if knob == "rabi":
        p = _swept_physical(cfg, cfg["knob_hi"])
        for key in ("n_sites", "max_phonons"):
            if key not in cfg:
                raise ConfigError(f"missing required key {key}", key=key)
        n, m = cfg["n_sites"], cfg["max_phonons"]
        return knob, lambda x: rabi_model(x, p, n, m)
    raise ConfigError(f"knob must be 'lambda' or 'rabi', got {knob!r}", key="knob")


def cmd_find_critical(args, cfg):
    for key in ("knob_lo", "knob_hi"):
        if key not in cfg:
            raise ConfigError(f"missing required key {key}", key=key)
    knob, model = _knob_model(cfg)
    rep = find_critical(
        cfg["knob_lo"],
        cfg["knob_hi"],
        cfg.get("resolution", 1e-3),
        model,
        seed=cfg["seed"],
        tol=_tol(cfg),
        threads=args.threads,
    )
    doc = output.report("find-critical", cfgmod.render(cfg), knob=knob, transition=rep.as_dict())
    output.write_json(os.path.join(args.out, "critical.json"), doc)
    _emit(doc)


def cmd_converge(args, cfg):
    mp = cfgmod.model_params(cfg)
    rows = convergence_study(
        cfg.get("n_list", [mp.n_sites]),
        cfg.get("m_list", [mp.max_phonons]),
        mp,
        seed=cfg["seed"],
        tol=_tol(cfg),
        threshold=cfg.get("threshold", 1e-3),
        threads=args.threads,
    )
    path = os.path.join(args.out, "converge.csv")
    with open(path, "w") as fh:
        fh.write("# schema_version: 1\n")
        for line in cfgmod.render(cfg):
            fh.write(f"# config {line}\n")
        fh.write("n_sites,max_phonons,E_gs,K_over_pi,rel_change_M,rel_change_N,variational_ok,flagged\n")
        for r in rows:
            fh.write(
                f"{r.n_sites},{r.max_phonons},{r.e_gs!r},{r.k_gs_over_pi!r},"
                f"{r.rel_change_m!r},{r.rel_change_n!r},{r.variational_ok},{r.flagged}\n"
            )
    print(path)


def cmd_dump_basis(args, cfg):
    for key in ("n_sites", "max_phonons"):
        if key not in cfg:
            raise ConfigError(f"missing required key {key}", key=key)
    n, m = cfg["n_sites"], cfg["max_phonons"]
    j = cfg.get("sector", 0) % n
    sector = build_k_sector(n, m, j)
    path = os.path.join(args.out, f"basis_N{n}_M{m}_j{j}.txt")
    with open(path, "w") as fh:
        sector.dump(fh)
    print(path)


COMMANDS = {
    "map-params": cmd_map_params,
    "spectrum": cmd_spectrum,
    "scan-lambda": cmd_scan_lambda,
    "scan-omega": cmd_scan_omega,
    "find-critical": cmd_find_critical,
    "converge": cmd_converge,
    "dump-basis": cmd_dump_basis,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    common.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")
    parser = argparse.ArgumentParser(prog="rydpolaron", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads is None:
        args.threads = os.cpu_count() or 1
    try:
        if args.threads < 1:
            raise InvalidParameterError("--threads must be positive")
        os.makedirs(args.out, exist_ok=True)
        if not os.access(args.out, os.W_OK):
            raise ConfigError(f"output directory {args.out} is not writable")
        cfg = _resolved(args)
        COMMANDS[args.subcommand](args, cfg)
    except (PolaronError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "key", None):
            err["key"] = exc.key
        sys.stderr.write(json.dumps(err) + "\n")
        usage = isinstance(exc, (ConfigError, InvalidParameterError))
        return 2 if usage else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
