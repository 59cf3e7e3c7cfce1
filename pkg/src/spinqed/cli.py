"""Command-line driver: expand | closedform | oracle | compare | fieldmap.

Every command writes only under ``<output_dir>/<command>/``.  Exit codes:
0 ok, 1 unexpected, 2 configuration, 3 precondition, 4 numeric, 5 resource.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import acceptance
from . import closed_form as cf
from . import io
from .config import dump_config, load_config, validate_run
from .errors import ConfigurationError, SpinQEDError
from .hamiltonian import build_model
from .oracle import convergence_study
from .perturbation import expand, second_order

COMMANDS = ("expand", "closedform", "oracle", "compare", "fieldmap")


def _model(cfg):
    chi, spins = validate_run(cfg, "expand")
    g = cfg.grid
    ops = build_model(chi, spins, cfg.truncation.n_max, g.radial_order, g.angular_order, g.r_max,
                      compress=g.compress, budget=cfg.truncation.dimension_budget)
    return chi, spins, ops


def _outdir(cfg, name):
    d = Path(cfg.output_dir) / name
    d.mkdir(parents=True, exist_ok=True)
    return d


def _model_summary(ops):
    return {"modes": ops.modes.count, "n_max": ops.basis.n_max, "occupation_dim": ops.basis.dim,
            "dimension": ops.dim, "spins": ops.cfg.N, "beta": list(ops.cfg.beta),
            "positions": [list(x) for x in ops.cfg.positions]}


def cmd_expand(cfg):
    chi, spins, ops = _model(cfg)
    res = expand(ops, cfg.expansion.p)
    out = _outdir(cfg, "expand")
    files = []
    for j, u in enumerate(res.vectors):
        files.append(io.write_vector(out / f"u_{j}.csv", u).name)
    io.write_csv(out / "lambdas.csv", ["j", "lambda"], ((j + 1, lam) for j, lam in enumerate(res.lambdas)))
    io.write_csv(out / "grid.csv", *ops.modes.grid.csv_rows())
    payload = {"model": _model_summary(ops), "expansion": res.summary(), "vector_files": files,
               "seed": cfg.seed}
    io.write_json(out / "expansion.json", payload)
    print(f"lambda = {res.lambdas}")
    print(f"max hierarchy residual = {max(res.residuals):.3e}; artifacts in {out}")
    return res


def cmd_closedform(cfg):
    chi, spins = validate_run(cfg, "closedform")
    q = cfg.tolerances.quadrature()
    n = spins.n_beta
    pairs = []
    for a in range(spins.N):
        for b in range(spins.N):
            d = spins.xs[a] - spins.xs[b]
            pairs.append((a + 1, b + 1, *d, cf.F_interaction(d, chi, n, q)))
    C = cf.C_constant(chi, spins.beta_norm, q)
    lam2 = cf.lambda2_closed(spins, chi, q)
    out = _outdir(cfg, "closedform")
    io.write_csv(out / "F_pairs.csv", ["l", "m", "dx", "dy", "dz", "F"], pairs)
    payload = {"C": C, "lambda2": lam2, "F0": cf.F_interaction(np.zeros(3), chi, n, q),
               "N": spins.N, "beta_norm": spins.beta_norm, "quadrature": cfg.tolerances.model_dump()}
    io.write_json(out / "closedform.json", payload)
    print(f"C = {C!r}, lambda2 = {lam2!r}; artifacts in {out}")
    return payload


def cmd_oracle(cfg):
    validate_run(cfg, "oracle")
    chi, spins, ops = _model(cfg)
    res = expand(ops, cfg.expansion.p)
    obs = [(o.kind, np.array(o.x), o.m) for o in cfg.oracle.observables]
    rep = convergence_study(ops, res, cfg.oracle.h_list, obs, seed=cfg.seed, tol=cfg.oracle.tol)
    out = _outdir(cfg, "oracle")
    keys = list(rep.table[0].keys())
    io.write_csv(out / "oracle.csv", keys, ([row[k] for k in keys] for row in rep.table))
    payload = {"model": _model_summary(ops), "lambdas": res.lambdas, "report": rep.to_dict(), "seed": cfg.seed}
    io.write_json(out / "oracle.json", payload)
    for p, s in rep.energy_slopes.items():
        print(f"energy slope p={p}: {'flagged' if s is None else f'{s:.3f}'}")
    for f in rep.flagged:
        print(f"note: {f}")
    print(f"artifacts in {out}")
    return rep


def _config_model_checks(cfg):
    """Engine versus closed-form lambda_2 for the configured model."""
    chi, spins = validate_run(cfg, "closedform")
    g = cfg.grid
    ops = build_model(chi, spins, 1, g.radial_order, g.angular_order, g.r_max, compress=g.compress,
                      budget=cfg.truncation.dimension_budget)
    a, b, _ = second_order(ops)
    closed = cf.lambda2_closed(spins, chi, cfg.tolerances.quadrature())
    return {"lambda1": ops.lambda1, "lambda2_forcing": a.real, "lambda2_overlap": b.real,
            "lambda2_closed": closed, "lambda2_relative_gap": abs(a.real - closed) / abs(closed)}


def cmd_compare(cfg):
    results = acceptance.run_all(seed=cfg.seed, only=cfg.compare.criteria)
    rows = acceptance.verdict_rows(results)
    out = _outdir(cfg, "compare")
    header = ["number", "title", "passed", "measured", "threshold", "runtime_limit", "detail"]
    io.write_csv(out / "verdict.csv", header, ([r[k] for k in header] for r in rows))
    payload = {"verdict": rows, "all_passed": all(r.passed for r in results),
               "configured_model": _config_model_checks(cfg), "seed": cfg.seed}
    io.write_json(out / "verdict.json", payload)
    io.write_json(out / "timings.json", {str(r.number): r.runtime for r in results})
    for r in results:
        print(r.line())
    print(f"artifacts in {out}")
    return results


def cmd_fieldmap(cfg):
    chi, spins = validate_run(cfg, "fieldmap")
    pts = cfg.fieldmap.points()
    samples = cf.field_map(pts, spins, chi, cfg.fieldmap.h, cfg.tolerances.quadrature())
    out = _outdir(cfg, "fieldmap")
    io.write_csv(out / "fieldmap.csv", ["x", "y", "z", "Bx", "By", "Bz"], (s.x + s.value for s in samples))
    B = np.array([s.value for s in samples])
    payload = {"points": len(samples), "h": cfg.fieldmap.h, "provenance": "classical",
               "max_abs_B": float(np.abs(B).max()) if len(B) else 0.0}
    io.write_json(out / "fieldmap.json", payload)
    print(f"{len(samples)} field samples; artifacts in {out}")
    return samples


HANDLERS = {"expand": cmd_expand, "closedform": cmd_closedform, "oracle": cmd_oracle,
            "compare": cmd_compare, "fieldmap": cmd_fieldmap}


def build_parser():
    ap = argparse.ArgumentParser(prog="spinqed", description="Semiclassical ground states of a spin-boson QED model")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, default=None, help="TOML run configuration")
    ap.add_argument("--out", type=Path, default=None, help="output directory (overrides config)")
    ap.add_argument("--seed", type=int, default=None, help="random seed (overrides config)")
    ap.add_argument("--threads", type=int, default=None, help="BLAS/OpenMP thread limit")
    ap.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        update = {}
        if args.out is not None:
            update["output_dir"] = str(args.out)
        if args.seed is not None:
            update["seed"] = args.seed
        cfg = cfg.model_copy(update=update)
        if args.dump_config:
            print(dump_config(cfg), end="")
            return 0
        if args.threads is not None and args.threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        limits = threadpool_limits(limits=args.threads) if args.threads else contextlib.nullcontext()
        with limits:
            (_outdir(cfg, args.command) / "config.resolved.toml").write_text(dump_config(cfg))
            result = HANDLERS[args.command](cfg)
        if args.command == "compare" and not all(r.passed for r in result):
            return 1
        return 0
    except SpinQEDError as exc:
        print(f"spinqed: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
