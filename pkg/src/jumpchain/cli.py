"""Command-line surface.

Exit codes: 0 success, 2 usage error, 3 input validation, 4 runtime/IO.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import binomial as binomial_mod
from . import diagnostics, exact, runio, scenarios, spaces

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4

OUT_ROOT_ENV = "JUMPCHAIN_OUT_ROOT"


def _out_root() -> Path:
    return Path(os.environ.get(OUT_ROOT_ENV, "runs"))


# ---------------------------------------------------------------------------
# binomial


def _cmd_binomial_table(args):
    print("k,j,type,p_crit")
    for c in binomial_mod.classification_table(args.kmax):
        p = "" if c.p_crit is None else repr(c.p_crit)
        print(f"{c.k},{c.j},{c.type},{p}")


def _cmd_binomial_classify(args):
    c = binomial_mod.classify(args.j, args.k)
    if c.p_crit is None:
        print(f"type={c.type}")
    else:
        print(f"type={c.type} p_crit={c.p_crit:.5f}")


def _cmd_binomial_map(args):
    print(repr(binomial_mod.binomial_map(args.p, args.j, args.k)))


def _cmd_binomial_nonexistence(args):
    print("true" if binomial_mod.density_nonexistence_check(args.j, args.k) else "false")


# ---------------------------------------------------------------------------
# finite


def _load_rank_matrix(args) -> exact.RankMatrix:
    given = [x for x in (args.scenario, args.rank_csv, args.dist_csv) if x]
    if len(given) != 1:
        raise ValueError("give exactly one of --scenario, --rank-csv, --dist-csv")
    if args.rank_csv:
        return exact.RankMatrix.from_csv(args.rank_csv)
    if args.dist_csv:
        return spaces.rank_matrix_from_distances(spaces.load_distance_matrix(args.dist_csv))
    cfg = scenarios.get_scenario(args.scenario)
    space = cfg.build_space()
    if isinstance(space, spaces.RankSpace):
        return space.rank_matrix
    if isinstance(space, spaces.PointCloud):
        return spaces.rank_matrix_from_distances(space.distance_table())
    raise ValueError(f"scenario {args.scenario!r} is not a finite space")


def _load_theta(args, n: int) -> exact.Distribution:
    if args.theta:
        return exact.Distribution(np.array([float(t) for t in args.theta.split(",")]))
    if args.scenario:
        cfg = scenarios.get_scenario(args.scenario)
        try:
            return cfg.initial_distribution()
        except ValueError:
            pass
    return exact.Distribution.uniform(n)


def _emit_matrix(matrix: np.ndarray, out: str | None):
    text = "\n".join(",".join(repr(float(v)) for v in row) for row in matrix)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _cmd_finite_kernel(args):
    R = _load_rank_matrix(args)
    theta = _load_theta(args, R.n)
    K = exact.build_kernel(R, theta, args.j, args.k)
    _emit_matrix(K.k, args.out)


def _cmd_finite_stationary(args):
    R = _load_rank_matrix(args)
    theta = _load_theta(args, R.n)
    pi = exact.apply_pi(R, theta, args.j, args.k)
    _emit_matrix(pi.weights[None, :], args.out)


def _cmd_finite_iterate(args):
    R = _load_rank_matrix(args)
    theta = _load_theta(args, R.n)
    traj = exact.iterate_exact(R, theta, args.j, args.k, args.steps)
    _emit_matrix(np.stack([t.weights for t in traj]), args.out)


def _fp_payload(R, reports, args) -> dict:
    return {
        "input": {
            "rank_matrix": R.r.tolist(),
            "j": args.j,
            "k": args.k,
            "n_restarts": args.restarts,
            "tol": args.tol,
            "seed": args.seed,
        },
        "fixed_points": [r.to_jsonable() for r in reports],
    }


def _cmd_finite_fixed_points(args):
    R = _load_rank_matrix(args)
    reports = exact.find_fixed_points(
        R, args.j, args.k, n_restarts=args.restarts, tol=args.tol, seed=args.seed
    )
    payload = _fp_payload(R, reports, args)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _cmd_finite_feasibility(args):
    R = _load_rank_matrix(args)
    d = exact.feasibility_search(R, margin=args.margin)
    if d is None:
        print("not found")
        return
    _emit_matrix(d, args.out)


def _cmd_finite_btl_scan(args):
    findings = []
    for trial in range(args.trials):
        dist = spaces.random_btl_space(args.leaves, seed=args.seed + trial)
        R = spaces.rank_matrix_from_distances(dist)
        for j in range(1, args.k + 1) if args.j is None else [args.j]:
            reports = exact.find_fixed_points(
                R, j, args.k, n_restarts=args.restarts, seed=args.seed + trial
            )
            for rep in reports:
                if rep.support_size == R.n and not rep.is_omnipresent:
                    findings.append({"trial": trial, "j": j, "report": rep.to_jsonable()})
    print(
        json.dumps(
            {
                "leaves": args.leaves,
                "trials": args.trials,
                "k": args.k,
                "non_omnipresent_full_support": findings,
                "count": len(findings),
            },
            indent=2,
            sort_keys=True,
        )
    )


# ---------------------------------------------------------------------------
# mc


def _cmd_mc_run(args):
    if bool(args.config) == bool(args.scenario):
        raise ValueError("give exactly one of --config or --scenario")
    if args.config:
        cfg = runio.load_scenario(args.config)
    else:
        cfg = scenarios.get_scenario(args.scenario)
    overrides = {}
    for name in ("j", "k", "seed", "n_particles", "n_iterations"):
        v = getattr(args, name)
        if v is not None:
            overrides[name] = v
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    out = Path(args.out) if args.out else _out_root() / cfg.name
    artifact = runio.run_iterative(cfg, out)
    print(f"run complete: {out}")
    print(f"classification: {json.dumps(artifact.classification.to_jsonable())}")


def _cmd_mc_resume(args):
    artifact = runio.resume_run(args.run_dir)
    print(f"run complete: {args.run_dir}")
    print(f"classification: {json.dumps(artifact.classification.to_jsonable())}")


def _cmd_mc_classify(args):
    c = runio.classify_run(args.run_dir)
    print(json.dumps(c.to_jsonable()))


def _cmd_scenarios_list(_args):
    for cfg in scenarios.bundled_scenarios():
        print(f"{cfg.name}\tengine={cfg.engine}\tj={cfg.j}\tk={cfg.k}")


# ---------------------------------------------------------------------------
# wiring


def _add_finite_input_flags(p):
    p.add_argument("--scenario", help="bundled scenario name")
    p.add_argument("--rank-csv", help="rank matrix CSV")
    p.add_argument("--dist-csv", help="distance matrix CSV")
    p.add_argument("--theta", help="comma-separated weights (default: scenario or uniform)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jumpchain")
    sub = ap.add_subparsers(dest="group", required=True)

    b = sub.add_parser("binomial", help="two-point space analysis")
    bs = b.add_subparsers(dest="cmd", required=True)
    p = bs.add_parser("table")
    p.add_argument("--kmax", type=int, required=True)
    p.set_defaults(fn=_cmd_binomial_table)
    p = bs.add_parser("classify")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=_cmd_binomial_classify)
    p = bs.add_parser("map")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=_cmd_binomial_map)
    p = bs.add_parser("nonexistence")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=_cmd_binomial_nonexistence)

    f = sub.add_parser("finite", help="exact finite-space engine")
    fs = f.add_subparsers(dest="cmd", required=True)
    p = fs.add_parser("kernel")
    _add_finite_input_flags(p)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_finite_kernel)
    p = fs.add_parser("stationary")
    _add_finite_input_flags(p)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_finite_stationary)
    p = fs.add_parser("iterate")
    _add_finite_input_flags(p)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_finite_iterate)
    p = fs.add_parser("fixed-points")
    _add_finite_input_flags(p)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_finite_fixed_points)
    p = fs.add_parser("feasibility")
    _add_finite_input_flags(p)
    p.add_argument("--margin", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_finite_feasibility)
    p = fs.add_parser("btl-scan")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--j", type=int, default=None, help="default: every j up to k")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_finite_btl_scan)

    m = sub.add_parser("mc", help="particle Monte Carlo runs")
    ms = m.add_subparsers(dest="cmd", required=True)
    p = ms.add_parser("run")
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--scenario", help="bundled scenario name")
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-particles", type=int, dest="n_particles")
    p.add_argument("--iterations", type=int, dest="n_iterations")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_mc_run)
    p = ms.add_parser("resume")
    p.add_argument("run_dir")
    p.set_defaults(fn=_cmd_mc_resume)
    p = ms.add_parser("classify")
    p.add_argument("run_dir")
    p.set_defaults(fn=_cmd_mc_classify)

    s = sub.add_parser("scenarios", help="list bundled scenarios")
    s.set_defaults(fn=_cmd_scenarios_list)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.fn(args)
    except (ValueError, KeyError, jsonschema.ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
