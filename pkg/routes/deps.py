"""
Shared argument specs and input resolution for command handlers
"""

import argparse
from typing import List, Optional

from models import AttenuationFn, GraphInstance
from routes.router import arg, CommandError, EXIT_USAGE
from services.attenuation_service import attenuation_service
from services.graph_service import graph_service
import storage

INSTANCE = arg("--instance", default=storage.STDIO, help="Instance JSON path, '-' for stdin")
OUT = arg("--out", "-o", default=storage.STDIO, help="Output JSON path, '-' for stdout")
CSV = arg("--csv", default=None, help="Optional CSV output path")
TRIALS = arg("--trials", type=int, default=10000, help="Number of trials")
Z = arg("--z", type=float, default=None, help="Critical value for Wilson intervals")
ATTENUATION = arg("--attenuation", "--fn", dest="attenuation", default="a1",
                  help="a1 | a2 | const=<v> | table=<v0,v1,...>")


def load_instance(args: argparse.Namespace) -> GraphInstance:
    """Instance named by --instance with its structure checked"""
    g = storage.load_instance(args.instance)
    graph_service.check_structure(g)
    return g


def parse_order(text: Optional[str]) -> Optional[List[int]]:
    """Comma-separated edge indices, or None"""
    if not text:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CommandError(EXIT_USAGE, f"Order must be comma-separated integers, got '{text}'")


def attenuation(args: argparse.Namespace) -> AttenuationFn:
    return attenuation_service.parse_attenuation(args.attenuation)
