"""
Random-order matching experiments: hardness greedy | offline
"""

import argparse
import logging
import math

import numpy as np
import pandas as pd

from models import RunConfig, TableRow
from routes.router import CommandRouter, CommandOutcome, arg, EXIT_CHECK_FAILED, EXIT_OK
from routes import deps
from services.hardness_service import hardness_service, DEFAULT_CHECKPOINTS
import storage

logger = logging.getLogger(__name__)

hardness_router = CommandRouter()

N = arg("--n", type=int, required=True, help="Side size of K_{n,n}")
HARDNESS_TRIALS = arg("--trials", type=int, default=100)


@hardness_router.command("greedy", help="Greedy matching trajectory against w(z) = z/(1+z)",
                         arguments=[N, HARDNESS_TRIALS,
                                    arg("--checkpoints", type=int, default=DEFAULT_CHECKPOINTS),
                                    arg("--complete", action="store_true", help="Run on K_n instead"),
                                    arg("--slack", type=float, default=0.01), deps.OUT, deps.CSV])
def greedy(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    traj = hardness_service.simulate_greedy(args.n, args.trials, args.checkpoints, args.seed,
                                            args.complete, args.workers)
    z = np.asarray(traj.checkpoints, dtype=float) / traj.edge_count
    w = z / (1.0 + z)
    frame = pd.DataFrame({
        "t": traj.checkpoints,
        "z": z,
        "mean_fraction": traj.mean,
        "w": w,
        "deviation": np.asarray(traj.mean) - w,
        "lower": traj.lower,
        "upper": traj.upper,
    })
    if args.csv:
        storage.write_csv(frame, args.csv, run_config)

    finals = np.asarray(traj.final_fractions)
    final = float(finals.mean())
    half = 1.96 * float(finals.std(ddof=1)) / math.sqrt(finals.size) if finals.size > 1 else 0.0
    increments = hardness_service.check_increments(traj, args.slack)
    deviation = hardness_service.ode_deviation(traj)
    print(f"{final:.6f}")
    storage.write_json({"n": args.n, "trials": args.trials, "complete_graph": args.complete,
                        "final_fraction": final, "ode_deviation": deviation,
                        "increments": increments.model_dump(mode="json", by_alias=True)}, args.out)

    rows = [] if args.complete else [
        TableRow(row="rom_ub", measured=final, ci_lo=final - half, ci_hi=final + half,
                 note=f"greedy on K_{{{args.n},{args.n}}}, {args.trials} trials")
    ]
    return CommandOutcome(exit_code=EXIT_OK if increments.passed else EXIT_CHECK_FAILED, rows=rows,
                          extra={"final_fraction": final, "ode_deviation": deviation})


@hardness_router.command("offline", help="Maximum matching fraction of the active subgraph",
                         arguments=[N, HARDNESS_TRIALS,
                                    arg("--coupled", action="store_true",
                                        help="Report greedy and offline on the same realizations"),
                                    deps.OUT, deps.CSV])
def offline(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    if args.coupled:
        pairs = hardness_service.coupled_fractions(args.n, args.trials, args.seed, args.workers)
        frame = pd.DataFrame(pairs, columns=["greedy", "offline"])
        frame.insert(0, "trial", range(len(pairs)))
        if args.csv:
            storage.write_csv(frame, args.csv, run_config)
        summary = {"greedy": float(frame["greedy"].mean()), "offline": float(frame["offline"].mean()),
                   "strictly_better": float((frame["offline"] > frame["greedy"]).mean())}
        storage.write_json({"n": args.n, "trials": args.trials, **summary}, args.out)
        return CommandOutcome(extra=summary)

    value = hardness_service.offline_fraction(args.n, args.trials, args.seed, args.workers)
    print(f"{value:.6f}")
    storage.write_json({"n": args.n, "trials": args.trials, "offline_fraction": value}, args.out)
    return CommandOutcome(extra={"offline_fraction": value})
