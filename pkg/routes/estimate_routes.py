"""
Scheme-agnostic selectability estimation
"""

import argparse

from models import RunConfig, SchemeKind, SchemeSpec
from routes.router import CommandRouter, CommandOutcome, CommandError, arg, EXIT_USAGE
from routes import deps
from routes.ocrs_routes import build_plan
from routes.rcrs_routes import estimate_on, report_rows, write_report, POOL, REGULARIZE
import storage

estimate_router = CommandRouter()


@estimate_router.command("estimate", help="Empirical P[e in M]/x_e with Wilson intervals",
                         arguments=[deps.INSTANCE,
                                    arg("--scheme", choices=[k.value for k in SchemeKind], default="rcrs"),
                                    deps.ATTENUATION,
                                    arg("--plan", default=None, help="OCRS plan JSON"),
                                    arg("--c", type=float, default=None, help="OCRS target, calibrated exactly"),
                                    REGULARIZE, deps.TRIALS, deps.Z, POOL, deps.OUT, deps.CSV])
def estimate(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    if args.scheme == SchemeKind.OCRS.value:
        if args.regularize != "none":
            raise CommandError(EXIT_USAGE, "Regularization applies to the random-order scheme only")
        if args.plan:
            plan = storage.load_plan(args.plan)
        elif args.c is not None:
            plan = build_plan(g, args.c, None, "exact", 0, args.seed, None)
        else:
            raise CommandError(EXIT_USAGE, "OCRS estimation needs --plan or --c")
        scheme = SchemeSpec(kind=SchemeKind.OCRS, plan=plan)
    else:
        scheme = SchemeSpec(kind=SchemeKind.RCRS, attenuation=deps.attenuation(args))

    report = estimate_on(g, scheme, args)
    write_report(report, args, run_config)
    return CommandOutcome(rows=report_rows(report, scheme, g), extra={"min_ratio": report.min_ratio})
