"""
Routes package: command routers for the crs CLI
"""

from .gen_routes import gen_router
from .graph_routes import graph_router
from .ocrs_routes import ocrs_router
from .rcrs_routes import rcrs_router
from .estimate_routes import estimate_router
from .verify_routes import verify_router
from .hardness_routes import hardness_router
from .report_routes import report_router

__all__ = [
    "gen_router",
    "graph_router",
    "ocrs_router",
    "rcrs_router",
    "estimate_router",
    "verify_router",
    "hardness_router",
    "report_router",
]
