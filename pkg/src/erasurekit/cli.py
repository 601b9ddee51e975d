"""Command-line front end: analyze, optimize, verify, and scenario sweeps.

Every output embeds the fully resolved run configuration (defaults and seeds
included), so re-running the same invocation reproduces files byte for byte.
Exit codes: 0 success, 1 input or usage error, 2 verification failure (some
inequality slack below -1e-9).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import numerics
from .channels import KrausChannel, preset, validate
from .erasure import SLACK_FLOOR, verify_converse, verify_direct
from .errors import ErasureKitError, ParamOutOfRange
from .optimizer import detect_random_unitary, optimize_erasure, sample_oracle
from .probes import (
    canonical_measurement,
    hadamard_measurement,
    random_ensemble,
    random_measurement,
)
from .scenarios import ERASER_GRID, TELEPORT_GRID, scenario_curve
from .serialize import (
    channel_from_dict,
    csv_line,
    density_from_dict,
    dumps_compact,
    dumps_stable,
    ensemble_from_dict,
    fmt17,
    load_json,
    measurement_from_dict,
    report_to_dict,
    result_to_dict,
    verdict_to_dict,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2

PRESET_PARAM = {
    "dephasing": "p",
    "depolarizing": "p",
    "amplitude_damping": "gamma",
    "partial_teleportation": "lam0",
}

VERIFY_COLUMNS = (
    "trial,d,kraus,members,ic_members,f_e,f_ea,mutual_info,beta,gamma,"
    "slack_fidelity_trace,slack_measurement_l1,slack_pinsker,slack_total,"
    "slack_converse,entropy_lower_slack,entropy_upper_slack,worst_slack"
)


def _threads() -> int:
    raw = os.environ.get("ERASUREKIT_THREADS", "")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _add_channel_source(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--channel", metavar="FILE", help="channel JSON file")
    group.add_argument(
        "--preset",
        choices=sorted(
            {
                "identity",
                "dephasing",
                "depolarizing",
                "amplitude_damping",
                "eraser_cnot",
                "partial_teleportation",
                "random",
            }
        ),
        help="named channel construction",
    )
    sub.add_argument("--param", type=float, default=None, help="preset parameter")
    sub.add_argument("--dim", type=int, default=2, help="dimension for identity/random presets")
    sub.add_argument("--kraus", type=int, default=2, help="Kraus count for the random preset")


def _resolve_channel(args) -> tuple[KrausChannel, dict]:
    if args.channel:
        channel = channel_from_dict(load_json(args.channel))
        spec = {"file": args.channel}
    else:
        name = args.preset
        params: dict = {}
        if name in PRESET_PARAM:
            params[PRESET_PARAM[name]] = args.param if args.param is not None else 0.5
        elif args.param is not None:
            raise ParamOutOfRange(f"preset {name!r} takes no --param")
        if name == "identity":
            params["dim"] = args.dim
        if name == "random":
            params = {"dim": args.dim, "kraus": args.kraus, "seed": args.seed}
        channel = preset(name, **params)
        spec = {"preset": name, "params": params}
    validate(channel)
    return channel, spec


def _resolve_state(args, dim: int) -> np.ndarray:
    if args.state == "mixed":
        return np.eye(dim, dtype=complex) / dim
    return numerics.ensure_density(density_from_dict(load_json(args.state)))


def _resolve_mixing(args, kraus_count: int):
    if args.mixing == "identity":
        return canonical_measurement(kraus_count)
    if args.mixing == "hadamard":
        return hadamard_measurement()
    return measurement_from_dict(load_json(args.mixing))


def cmd_analyze(args) -> int:
    channel, channel_spec = _resolve_channel(args)
    rho = _resolve_state(args, channel.dim)
    meas = _resolve_mixing(args, channel.kraus_count)
    if args.ensemble:
        ens = ensemble_from_dict(load_json(args.ensemble))
        ensemble_spec: dict | str = {"file": args.ensemble}
    else:
        ens = random_ensemble(rho, args.members, np.random.default_rng([args.seed, 1]))
        ensemble_spec = {"random_members": args.members}
    ic_size = args.ic_size if args.ic_size > 0 else channel.dim**2

    direct = verify_direct(channel, rho, ens, meas)
    converse = verify_converse(
        channel, rho, meas, members=ic_size, seed=np.random.default_rng([args.seed, 2])
    )
    config = {
        "command": "analyze",
        "format": "json",
        "channel": channel_spec,
        "state": args.state,
        "mixing": args.mixing,
        "ensemble": ensemble_spec,
        "ic_size": ic_size,
        "seed": args.seed,
        "out": args.out,
    }
    payload = {
        "config": config,
        "direct": report_to_dict(direct),
        "converse": report_to_dict(converse),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_stable(payload))
    worst = min(direct.worst_slack(), converse.worst_slack())
    print(f"wrote {args.out} (worst slack {worst:.3e})")
    return EXIT_OK if worst >= SLACK_FLOOR else EXIT_VERIFICATION


def cmd_scenario(args) -> int:
    if args.grid is not None and args.grid < 2:
        print("error: grid must have at least 2 points", file=sys.stderr)
        return EXIT_USAGE
    grid = args.grid or (ERASER_GRID if args.name == "eraser" else TELEPORT_GRID)
    columns, rows = scenario_curve(args.name, grid, args.seed, args.restarts)
    config = {
        "command": "scenario",
        "format": "csv",
        "name": args.name,
        "grid": grid,
        "restarts": args.restarts,
        "seed": args.seed,
        "out": args.out,
    }
    lines = ["# " + dumps_compact(config), ",".join(columns)]
    lines += [csv_line(row) for row in rows]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


def _verify_trial(master_seed: int, trial: int, dims: list[int]) -> dict:
    d = dims[trial % len(dims)]
    kraus_count = 2 + trial % (d * d - 1)
    channel = preset("random", dim=d, kraus=kraus_count, seed=[master_seed, trial, 0])
    rho = numerics.random_density(d, [master_seed, trial, 1])
    members = 2 + trial % 5
    ens = random_ensemble(rho, members, [master_seed, trial, 2])
    meas = random_measurement(kraus_count, kraus_count, [master_seed, trial, 3])
    direct = verify_direct(channel, rho, ens, meas)
    ic_members = d * d + trial % 5
    converse = verify_converse(
        channel,
        rho,
        meas,
        members=ic_members,
        seed=np.random.default_rng([master_seed, trial, 4]),
    )
    rng = np.random.default_rng([master_seed, trial, 5])
    length = 2 + trial % 15
    s = rng.random(length) + 1e-3
    s = (1 - length * 1e-4) * (s / s.sum()) + 1e-4
    r = rng.random(length)
    bounds = numerics.verify_entropy_bounds(r / r.sum(), s)

    row = {
        "trial": trial,
        "d": d,
        "kraus": kraus_count,
        "members": members,
        "ic_members": ic_members,
        "f_e": direct.f_e,
        "f_ea": direct.f_ea,
        "mutual_info": direct.mutual_info,
        "beta": direct.beta,
        "gamma": converse.gamma,
        "slack_fidelity_trace": min(
            direct.slack_fidelity_trace, converse.slack_fidelity_trace
        ),
        "slack_measurement_l1": min(
            direct.slack_measurement_l1, converse.slack_measurement_l1
        ),
        "slack_pinsker": min(direct.slack_pinsker, converse.slack_pinsker),
        "slack_total": min(direct.slack_total, converse.slack_total),
        "slack_converse": converse.slack_converse,
        "entropy_lower_slack": bounds.lower_slack,
        "entropy_upper_slack": bounds.upper_slack,
    }
    row["worst_slack"] = min(
        row[k]
        for k in (
            "slack_fidelity_trace",
            "slack_measurement_l1",
            "slack_pinsker",
            "slack_total",
            "slack_converse",
            "entropy_lower_slack",
            "entropy_upper_slack",
        )
    )
    return row


def cmd_verify(args) -> int:
    if args.trials < 1:
        print("error: trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    dims = sorted({int(d) for d in args.dims.split(",") if d.strip()})
    if not dims or any(d < 2 for d in dims):
        print("error: --dims needs integers >= 2", file=sys.stderr)
        return EXIT_USAGE

    def worker(t: int) -> dict:
        return _verify_trial(args.seed, t, dims)

    threads = _threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(worker, range(args.trials)))
    else:
        rows = [worker(t) for t in range(args.trials)]

    config = {
        "command": "verify",
        "format": "csv",
        "trials": args.trials,
        "dims": dims,
        "seed": args.seed,
        "out": args.out,
    }
    columns = VERIFY_COLUMNS.split(",")
    lines = ["# " + dumps_compact(config), VERIFY_COLUMNS]
    lines += [csv_line([row[c] for c in columns]) for row in rows]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    slack_columns = columns[10:-1]
    summary = {
        "config": config,
        "trials": args.trials,
        "worst_slack_per_link": {
            c: min(row[c] for row in rows) for c in slack_columns
        },
        "worst_slack": min(row["worst_slack"] for row in rows),
    }
    summary["pass"] = summary["worst_slack"] >= SLACK_FLOOR
    sys.stdout.write(dumps_stable(summary))
    return EXIT_OK if summary["pass"] else EXIT_VERIFICATION


def cmd_optimize(args) -> int:
    channel, channel_spec = _resolve_channel(args)
    rho = _resolve_state(args, channel.dim)
    outcomes = args.outcomes if args.outcomes > 0 else channel.kraus_count
    result = optimize_erasure(
        channel,
        rho,
        outcomes,
        restarts=args.restarts,
        max_iters=args.iters,
        tol=args.tol,
        seed=args.seed,
    )
    if args.oracle > 0:
        result = result.with_oracle(sample_oracle(channel, rho, args.oracle, args.seed))
    reusable = args.state == "mixed" and outcomes == channel.kraus_count
    verdict = detect_random_unitary(
        channel,
        restarts=args.restarts,
        seed=args.seed,
        result=result if reusable else None,
    )
    config = {
        "command": "optimize",
        "format": "json",
        "channel": channel_spec,
        "state": args.state,
        "outcomes": outcomes,
        "restarts": args.restarts,
        "iters": args.iters,
        "tol": args.tol,
        "oracle": args.oracle,
        "seed": args.seed,
        "out": args.out,
    }
    payload = {
        "config": config,
        "result": result_to_dict(result),
        "random_unitary": verdict_to_dict(verdict),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_stable(payload))
    if args.trace_csv:
        lines = ["restart,iteration,value"]
        lines += [f"{r},{i},{fmt17(v)}" for r, i, v in result.trace]
        with open(args.trace_csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    print(
        f"wrote {args.out} (best value {result.best_value:.12f}, "
        f"random unitary: {verdict.is_random_unitary})"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasurekit",
        description="Channel correction via quantum erasure: analyses, sweeps, and searches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="full inequality report for one configuration")
    _add_channel_source(analyze)
    analyze.add_argument("--state", default="mixed", help='"mixed" or a state JSON file')
    analyze.add_argument(
        "--mixing", default="identity", help='"identity", "hadamard", or a measurement JSON file'
    )
    analyze.add_argument("--ensemble", default=None, help="ensemble JSON file")
    analyze.add_argument("--members", type=int, default=4, help="random ensemble size")
    analyze.add_argument("--ic-size", type=int, default=0, help="IC ensemble size (0 = dim^2)")
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--out", default="analyze.json")
    analyze.set_defaults(func=cmd_analyze)

    optimize = sub.add_parser("optimize", help="search for the best erasure measurement")
    _add_channel_source(optimize)
    optimize.add_argument("--state", default="mixed", help='"mixed" or a state JSON file')
    optimize.add_argument("--outcomes", type=int, default=0, help="0 = Kraus count")
    optimize.add_argument("--restarts", type=int, default=32)
    optimize.add_argument("--iters", type=int, default=500)
    optimize.add_argument("--tol", type=float, default=1e-12)
    optimize.add_argument("--oracle", type=int, default=0, help="Haar samples for the oracle (0 = off)")
    optimize.add_argument("--seed", type=int, default=0)
    optimize.add_argument("--out", default="optimize.json")
    optimize.add_argument("--trace-csv", default=None, help="also stream the iteration trace")
    optimize.set_defaults(func=cmd_optimize)

    verify = sub.add_parser("verify", help="randomized verification sweep")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--dims", default="2,3", help="comma-separated dimensions")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default="verify.csv")
    verify.set_defaults(func=cmd_verify)

    scenario = sub.add_parser("scenario", help="closed-form sweep curves as CSV")
    scenario.add_argument("--name", choices=["eraser", "teleport"], required=True)
    scenario.add_argument("--grid", type=int, default=None, help="grid points (>= 2)")
    scenario.add_argument("--restarts", type=int, default=8, help="teleport optimized column")
    scenario.add_argument("--seed", type=int, default=0)
    scenario.add_argument("--out", default="scenario.csv")
    scenario.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        return EXIT_USAGE
    try:
        return args.func(args)
    except ErasureKitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
