"""
Random-order scheme commands: rcrs run | estimate
"""

import argparse
import logging
from typing import List

import pandas as pd

from models import (
    AttenuationKind, EstimateReport, GraphInstance, NoRelevantEstimate, ReductionMethod, RunConfig, SchemeKind,
    SchemeSpec, TableRow
)
from routes.router import CommandRouter, CommandOutcome, arg
from routes import deps
from services.estimator_service import estimator_service
from services.graph_service import graph_service
from services.rcrs_service import rcrs_service
from services.regularize_service import regularize_service
from services.stats import stream_rng, STREAM_SINGLE_RUN
import storage

logger = logging.getLogger(__name__)

rcrs_router = CommandRouter()

REGULARIZE = arg("--regularize", choices=["none"] + [m.value for m in ReductionMethod], default="none",
                 help="Estimate on a 1-regular embedding and map the edges back")
POOL = arg("--pool", action="store_true", help="Pool declared symmetry classes")

# Attenuation kinds whose guarantee is a table row
GUARANTEE_ROWS = {AttenuationKind.A1: "rcrs_general", AttenuationKind.A2: "rcrs_bipartite"}


def estimate_on(g: GraphInstance, scheme: SchemeSpec, args: argparse.Namespace) -> EstimateReport:
    """Selectability estimate, optionally measured through a 1-regularization"""
    if args.regularize == "none":
        return estimator_service.estimate_selectability(g, scheme, args.trials, args.seed, args.pool,
                                                        args.z, args.workers)
    reduction = regularize_service.regularize(g, ReductionMethod(args.regularize))
    reduced_report = estimator_service.estimate_selectability(reduction.reduced, scheme, args.trials, args.seed,
                                                              args.pool, args.z, args.workers)
    return regularize_service.map_back(reduced_report, reduction, g)


def report_rows(report: EstimateReport, scheme: SchemeSpec, g: GraphInstance) -> List[TableRow]:
    if scheme.attenuation is None or report.min_ratio is None:
        return []
    row_id = GUARANTEE_ROWS.get(scheme.attenuation.kind)
    if row_id is None:
        return []
    lo, hi = report.min_ratio_ci
    return [TableRow(row=row_id, measured=report.min_ratio, ci_lo=lo, ci_hi=hi,
                     note=f"{'pooled ' if report.pooled else ''}min ratio on {g.name or 'instance'}, "
                          f"{report.trials} trials")]


def write_report(report: EstimateReport, args: argparse.Namespace, run_config: RunConfig) -> None:
    storage.write_json(report.model_dump(mode="json"), args.out)
    if args.csv:
        frame = pd.DataFrame([e.model_dump() for e in report.edges],
                             columns=["edge", "x", "trials", "selected", "ratio", "ci_lo", "ci_hi"])
        storage.write_csv(frame, args.csv, run_config)


@rcrs_router.command("run", help="Execute the scheme and estimate per-edge selectability",
                     arguments=[deps.INSTANCE, deps.ATTENUATION, REGULARIZE, deps.TRIALS, deps.Z, POOL,
                                arg("--single", action="store_true", help="Print one execution instead"),
                                arg("--diagnostics", action="store_true",
                                    help="With --single, add relevant-edge counts and simple-blockers"),
                                deps.OUT, deps.CSV])
def run(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    fn = deps.attenuation(args)
    if args.single:
        record = rcrs_service.run_rcrs(g, fn, stream_rng(args.seed, STREAM_SINGLE_RUN), args.diagnostics)
        storage.write_json(record.model_dump(mode="json"), args.out)
        return CommandOutcome(extra={"matching": record.matching})

    scheme = SchemeSpec(kind=SchemeKind.RCRS, attenuation=fn)
    report = estimate_on(g, scheme, args)
    write_report(report, args, run_config)
    return CommandOutcome(rows=report_rows(report, scheme, g), extra={"min_ratio": report.min_ratio})


@rcrs_router.command("estimate", help="P[no relevant edge | edge survives] for one edge",
                     arguments=[deps.INSTANCE, deps.ATTENUATION, arg("--edge", type=int, required=True),
                                deps.TRIALS, deps.Z, deps.OUT])
def estimate(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    graph_service.require_feasible(g)
    fn = deps.attenuation(args)
    result = rcrs_service.estimate_no_relevant_prob(g, fn, args.edge, args.trials, args.seed, args.z)
    exact = rcrs_service.exact_no_relevant_prob(g, fn, args.edge)
    checked = NoRelevantEstimate(**result.model_dump(), edge=args.edge, exact_value=exact,
                                 exact_inside_ci=result.ci_lo <= exact <= result.ci_hi)
    if not checked.exact_inside_ci:
        logger.warning(f"⚠️ Exact value {exact:.6f} outside [{result.ci_lo:.6f}, {result.ci_hi:.6f}]")
    storage.write_json(checked.model_dump(mode="json"), args.out)
    return CommandOutcome(extra={"value": checked.value, "exact_value": checked.exact_value})
