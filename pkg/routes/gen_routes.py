"""
Instance generator commands: gen <name> [params] -o instance.json
"""

import argparse
import logging

from models import RunConfig
from routes.router import CommandRouter, CommandOutcome, arg
from routes import deps
from services.instance_service import instance_service
import storage

logger = logging.getLogger(__name__)

gen_router = CommandRouter()

EPS = arg("--eps", type=float, default=0.01, help="Light-edge value")


def _emit(g, args: argparse.Namespace) -> CommandOutcome:
    storage.save_instance(g, args.out)
    logger.info(f"✅ Generated {g.name}: {g.vertex_count} vertices, {len(g.edges)} edges")
    return CommandOutcome(extra={"name": g.name, "vertices": g.vertex_count, "edges": len(g.edges)})


@gen_router.command("example4cycle", help="K4 with a heavy 4-cycle and light diagonals", arguments=[EPS, deps.OUT])
def gen_example_4cycle(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.example_4cycle(args.eps), args)


@gen_router.command("three-path", help="Path on four vertices, light middle edge first", arguments=[EPS, deps.OUT])
def gen_three_path(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.three_path(args.eps), args)


@gen_router.command("kbipartite", help="K_{n,n} with x = 1/n",
                    arguments=[arg("--n", type=int, required=True), deps.OUT])
def gen_complete_bipartite(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.complete_bipartite(args.n), args)


@gen_router.command("neg-correlation", help="Six-vertex example with negatively correlated endpoints",
                    arguments=[deps.OUT])
def gen_neg_correlation(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.neg_correlation(), args)


@gen_router.command("star-pair", help="Center edge between two stars of n leaves",
                    arguments=[arg("--n", type=int, required=True), deps.OUT])
def gen_star_pair(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.star_pair(args.n), args)


@gen_router.command("split-vertex", help="Split a vertex of an instance into k copies",
                    arguments=[deps.INSTANCE, arg("--vertex", type=int, required=True),
                               arg("--k", type=int, required=True), deps.OUT])
def gen_split_vertex(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.split_vertex(deps.load_instance(args), args.vertex, args.k), args)


@gen_router.command("random", help="Random feasible instance",
                    arguments=[arg("--n", type=int, required=True), arg("--m", type=int, required=True),
                               arg("--density", type=float, default=1.0),
                               arg("--bipartite", action="store_true"), deps.OUT])
def gen_random(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    return _emit(instance_service.random_feasible(args.n, args.m, args.density, args.seed, args.bipartite), args)
