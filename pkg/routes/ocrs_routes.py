"""
Adversarial-order scheme commands: ocrs plan | run | maxc
"""

import argparse
import logging
from typing import Optional

import pandas as pd

from models import ExactSelectionCheck, GraphInstance, OcrsPlan, RunConfig, SchemeKind, SchemeSpec, TableRow
from routes.router import (
    CommandRouter, CommandOutcome, CommandError, arg, EXIT_CHECK_FAILED, EXIT_USAGE
)
from routes import deps
from services.estimator_service import estimator_service
from services.graph_service import graph_service
from services.ocrs_service import ocrs_service
from services.stats import stream_rng, STREAM_SINGLE_RUN
import storage

logger = logging.getLogger(__name__)

ocrs_router = CommandRouter()

ORDER = arg("--order", default=None, help="Comma-separated arrival order (instance order by default)")
VERTEX_LIMIT = arg("--vertex-limit", type=int, default=None, help="Vertex cap for the exact DP")
EXACT_TOL = 1e-12


def _plan_frame(g: GraphInstance, plan: OcrsPlan) -> pd.DataFrame:
    return pd.DataFrame({
        "edge": list(range(len(g.edges))),
        "x": [x for _, _, x in g.edges],
        "alpha": plan.alphas,
        "blockfree": plan.blockfree_probs,
        "valid": plan.valid,
        "ci": plan.ci_halfwidth if plan.ci_halfwidth is not None else [None] * len(g.edges),
    })


def build_plan(g: GraphInstance, c: float, order_text: Optional[str], mode: str, samples: int,
               seed: int, vertex_limit: Optional[int]) -> OcrsPlan:
    order = deps.parse_order(order_text)
    if mode == "exact":
        return ocrs_service.compute_alphas_exact(g, order, c, vertex_limit)
    return ocrs_service.compute_alphas_mc(g, order, c, samples, seed)


@ocrs_router.command("plan", help="Calibrate attenuation probabilities for a target c",
                     arguments=[deps.INSTANCE, arg("--c", type=float, required=True), ORDER,
                                arg("--mode", choices=["exact", "mc", "monte-carlo"], default="exact"),
                                arg("--samples", type=int, default=10000), VERTEX_LIMIT,
                                deps.OUT, deps.CSV])
def plan(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    graph_service.require_feasible(g)
    ocrs_plan = build_plan(g, args.c, args.order, args.mode, args.samples, args.seed, args.vertex_limit)
    storage.save_plan(ocrs_plan, args.out, run_config)
    if args.csv:
        storage.write_csv(_plan_frame(g, ocrs_plan), args.csv, run_config)
    invalid = len(ocrs_plan.valid) - sum(ocrs_plan.valid)
    return CommandOutcome(exit_code=EXIT_CHECK_FAILED if invalid else 0,
                          extra={"c": args.c, "mode": ocrs_plan.mode.value, "invalid_edges": invalid})


@ocrs_router.command("run", help="Execute the scheme and estimate per-edge selectability",
                     arguments=[deps.INSTANCE,
                                arg("--plan", default=None, help="Plan JSON (else calibrated exactly at --c)"),
                                arg("--c", type=float, default=None), ORDER, VERTEX_LIMIT,
                                deps.TRIALS, deps.Z, arg("--pool", action="store_true"),
                                arg("--exact", action="store_true",
                                    help="Also check exact selection probabilities against c x_e"),
                                arg("--single", action="store_true", help="Print one execution instead"),
                                deps.OUT, deps.CSV])
def run(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    graph_service.require_feasible(g)
    if args.plan:
        ocrs_plan = storage.load_plan(args.plan)
    elif args.c is not None:
        ocrs_plan = build_plan(g, args.c, args.order, "exact", 0, args.seed, args.vertex_limit)
    else:
        raise CommandError(EXIT_USAGE, "ocrs run needs --plan or --c")

    if args.single:
        result = ocrs_service.run_ocrs(g, ocrs_plan.order, ocrs_plan, None,
                                       stream_rng(args.seed, STREAM_SINGLE_RUN))
        storage.write_json(result.model_dump(mode="json"), args.out)
        return CommandOutcome(extra={"selected": result.selected})

    scheme = SchemeSpec(kind=SchemeKind.OCRS, plan=ocrs_plan)
    report = estimator_service.estimate_selectability(g, scheme, args.trials, args.seed, args.pool,
                                                      args.z, args.workers)
    payload = report.model_dump(mode="json")
    exit_code = 0
    if args.exact:
        probs = ocrs_service.selection_probs_exact(g, ocrs_plan.order, ocrs_plan)
        gaps = [abs(p - ocrs_plan.c * x) for p, (_, _, x), ok in zip(probs, g.edges, ocrs_plan.valid) if ok]
        worst = max(gaps, default=0.0)
        check = ExactSelectionCheck(selection_probs=probs, max_gap=worst, tolerance=EXACT_TOL,
                                    passed=worst <= EXACT_TOL)
        payload["exact"] = check.model_dump(mode="json")
        if not check.passed:
            logger.warning(f"⚠️ Exact selection deviates from c x_e by {worst:.3e}")
            exit_code = EXIT_CHECK_FAILED
    storage.write_json(payload, args.out)
    if args.csv:
        storage.write_csv(pd.DataFrame([e.model_dump() for e in report.edges]), args.csv, run_config)
    return CommandOutcome(exit_code=exit_code, extra={"min_ratio": report.min_ratio})


@ocrs_router.command("maxc", help="Largest c whose exact plan needs no clamping",
                     arguments=[deps.INSTANCE, ORDER, VERTEX_LIMIT,
                                arg("--lo", type=float, default=0.0), arg("--hi", type=float, default=1.0),
                                arg("--tol", type=float, default=1e-7), deps.OUT])
def maxc(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    value = ocrs_service.max_valid_c(g, deps.parse_order(args.order), args.lo, args.hi, args.tol,
                                     args.vertex_limit)
    print(f"{value:.6f}")
    bipartite = graph_service.bipartition_of(g) is not None
    row = TableRow(row="alg1_bipartite_ub" if bipartite else "alg1_general_ub", measured=value,
                   ci_lo=value, ci_hi=min(1.0, value + args.tol), note=f"max valid c on {g.name or args.instance}")
    if args.out != storage.STDIO:
        storage.write_json({"max_c": value, "tol": args.tol}, args.out)
    return CommandOutcome(rows=[row], extra={"max_c": value})
