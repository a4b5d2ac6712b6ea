"""Command-line harness: simulate, calibrate, bound, and oracle subcommands.

Exit codes: 0 success, 2 validation error, 3 runtime failure. The
NETPRICE_THREADS environment variable caps replication parallelism.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .errors import NetpriceError, ParameterError
from .harness import RegretTrace, bound_report, calibrate, load_config, run_batch
from .oracles import (direct_prior_mean_scale_z, ellipsoid_boundary_points,
                      joint_grid_ofu, polar_grid_price)


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.out:
        cfg = dataclasses.replace(cfg, output_path=args.out)
    summary = run_batch(cfg)
    print(f"wrote {len(summary.traces)} traces to {cfg.output_path}")
    for i, cp in enumerate(summary.checkpoints):
        print(f"  T={cp:>6d}  median regret {summary.median_regret[i]:12.4f}  "
              f"coverage {summary.coverage[i]:.3f}  "
              f"bound {summary.theorem_bounds[i]:.4g}")
    return 0


def _cmd_calibrate(args) -> int:
    cfg = load_config(args.config)
    constants = calibrate(cfg, args.coverage, args.pilot)
    payload = dataclasses.asdict(constants)
    print(json.dumps(payload, indent=2))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    return 0


def _cmd_bound(args) -> int:
    cfg = load_config(args.config)
    traces = []
    for name in sorted(os.listdir(args.traces)):
        if name.startswith("trace_") and name.endswith(".csv"):
            rep = int(name[len("trace_"):-len(".csv")])
            traces.append(RegretTrace.from_csv(os.path.join(args.traces, name), rep))
    if not traces:
        raise ParameterError(f"no trace_*.csv files under {args.traces}")
    report = bound_report(cfg, traces)
    print(json.dumps(report, indent=2))
    ok = len(report["exceedances"]) <= report["exceedance_allowance"]
    print(f"exceedances {len(report['exceedances'])} "
          f"(allowance {report['exceedance_allowance']:.2f}) -> "
          f"{'ok' if ok else 'VIOLATED'}")
    return 0


def _cmd_oracle(args) -> int:
    from . import harness
    from .confidence import ConfidenceEllipsoid, GramState
    from .pacbayes import SamplerConfig, posterior_mean, scale_Z
    from .policy import clairvoyant_price, ofu_select, theta_step

    cfg = load_config(args.config)
    env, truth = harness.build_environment(cfg)
    rng = np.random.default_rng(cfg.base_seed)
    failures = 0
    if args.check == "clairvoyant":
        for trial in range(20):
            theta = rng.normal(scale=1.0, size=(2, 2))
            d0 = rng.uniform(0.5, 2.0, size=2)
            price, value = clairvoyant_price(theta, d0, env.price_radius)
            _, grid_value = polar_grid_price(theta, d0, env.price_radius)
            ok = value >= grid_value - 1e-3 * env.price_radius ** 2
            failures += not ok
            print(f"clairvoyant[{trial}]: solver {value:.6f} grid {grid_value:.6f} "
                  f"{'ok' if ok else 'FAIL'}")
    elif args.check == "theta-step":
        for trial in range(20):
            n = 3
            gram = GramState(v=np.eye(n) * rng.uniform(0.5, 4.0), t=5)
            ell = ConfidenceEllipsoid(center=rng.normal(size=(n, n)) * 0.1,
                                      shape=gram, radius_sq=rng.uniform(0.5, 2.0),
                                      k_cap=1e6, epsilon=0.05)
            p = rng.normal(size=n)
            best = theta_step(ell, p)
            objective = float(p @ best @ p)
            boundary = ellipsoid_boundary_points(ell, 10_000, rng)
            rivals = np.einsum("i,kij,j->k", p, boundary, p)
            ok = objective >= float(np.max(rivals)) - 1e-9
            failures += not ok
            print(f"theta-step[{trial}]: closed form {objective:.6f} "
                  f"best rival {float(np.max(rivals)):.6f} {'ok' if ok else 'FAIL'}")
    elif args.check == "posterior":
        from .pacbayes import History
        from .priors import L0Prior, OffDiagPrior
        prior = harness.build_prior(cfg, env.norm_bound)
        if not isinstance(prior, (L0Prior, OffDiagPrior)):
            raise ParameterError(
                "the posterior oracle covers the discrete-support priors")
        hist = History(env.n_products, env.price_radius)
        reps = np.array([
            posterior_mean(prior, hist, 0.0, cfg.sampler,
                           np.random.default_rng([cfg.base_seed, 41, s])).theta_hat
            for s in range(6)])
        chain_se = reps.std(axis=0, ddof=1) / np.sqrt(len(reps))
        mean, se, _ = direct_prior_mean_scale_z(prior, 200_000, rng)
        gap = np.abs(reps.mean(axis=0) - mean)
        tol = 3.0 * np.sqrt(se ** 2 + chain_se ** 2)
        ok = bool(np.all(gap <= tol))
        failures += not ok
        print(f"posterior: max gap {gap.max():.4f} vs tolerance {tol.max():.4f} "
              f"{'ok' if ok else 'FAIL'}")
    else:
        raise ParameterError(f"unknown oracle check {args.check!r}")
    print("oracle suite:", "PASS" if failures == 0 else f"{failures} FAILURES")
    return 0 if failures == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netprice",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run seeded replications, write traces")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=_cmd_simulate)

    cal = sub.add_parser("calibrate", help="scale radii to a target coverage")
    cal.add_argument("--config", required=True)
    cal.add_argument("--coverage", type=float, default=0.95)
    cal.add_argument("--pilot", type=int, default=20)
    cal.add_argument("--out", default=None)
    cal.set_defaults(func=_cmd_calibrate)

    bnd = sub.add_parser("bound", help="compare traces against the bounds")
    bnd.add_argument("--config", required=True)
    bnd.add_argument("--traces", required=True)
    bnd.set_defaults(func=_cmd_bound)

    orc = sub.add_parser("oracle", help="run a brute-force oracle suite")
    orc.add_argument("--check", required=True,
                     choices=["clairvoyant", "theta-step", "posterior"])
    orc.add_argument("--config", required=True)
    orc.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (NetpriceError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
