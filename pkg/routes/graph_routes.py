"""
Instance checks and 1-regularization
"""

import argparse
import logging

from config import settings
from models import ReductionMethod, RunConfig
from routes.router import CommandRouter, CommandOutcome, arg, EXIT_CHECK_FAILED, EXIT_OK
from routes import deps
from services.graph_service import graph_service
from services.regularize_service import regularize_service
import storage

logger = logging.getLogger(__name__)

graph_router = CommandRouter()


@graph_router.command("validate", help="Check an instance against the matching polytope",
                      arguments=[deps.INSTANCE, arg("--tol", type=float, default=None), deps.OUT])
def validate(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    tol = settings.FEASIBILITY_TOL if args.tol is None else args.tol
    report = graph_service.validate_instance(g, tol)
    triangle, pentagon = graph_service.short_odd_cycles(g)
    payload = {
        **report.model_dump(mode="json"),
        "one_regular": graph_service.is_one_regular(g, tol),
        "bipartite": graph_service.bipartition_of(g) is not None,
        "has_triangle": triangle,
        "has_five_cycle": pentagon,
    }
    storage.write_json(payload, args.out)
    if not report.feasible:
        logger.warning(f"⚠️ {len(report.violations)} vertex load(s) exceed 1 + {tol}")
        return CommandOutcome(exit_code=EXIT_CHECK_FAILED, extra={"feasible": False})
    return CommandOutcome(exit_code=EXIT_OK, extra={"feasible": True})


@graph_router.command("regularize", help="Embed an instance in a 1-regular one",
                      arguments=[deps.INSTANCE,
                                 arg("--method", choices=[m.value for m in ReductionMethod],
                                     default=ReductionMethod.SEVEN_CYCLE.value),
                                 arg("--skip-tol", type=float, default=None),
                                 deps.OUT,
                                 arg("--map-out", default=None, help="Edge-map JSON path")])
def regularize(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    g = deps.load_instance(args)
    graph_service.require_feasible(g)
    reduction = regularize_service.regularize(g, ReductionMethod(args.method), args.skip_tol)
    storage.save_instance(reduction.reduced, args.out)
    if args.map_out:
        storage.save_edge_map(reduction, args.map_out)
    return CommandOutcome(extra={"method": reduction.method.value, "added_vertices": reduction.added_vertices,
                                 "one_regular": graph_service.is_one_regular(reduction.reduced)})
