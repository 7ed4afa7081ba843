"""
Contention resolution toolkit - command-line entry point
Generates instances, runs and calibrates OCRS/RCRS, verifies analytic properties and assembles reports
"""

import argparse
import logging
import sys
from typing import List, Optional

# Import configuration
from config import settings, load_config_file

# Import routes
from routes.router import CommandApp, EXIT_USAGE
from routes.gen_routes import gen_router
from routes.graph_routes import graph_router
from routes.ocrs_routes import ocrs_router
from routes.rcrs_routes import rcrs_router
from routes.estimate_routes import estimate_router
from routes.verify_routes import verify_router
from routes.hardness_routes import hardness_router
from routes.report_routes import report_router

# Configure logging (stderr keeps stdout pipeable)
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def build_app() -> CommandApp:
    app = CommandApp(prog="crs", description="Contention resolution schemes for graph matchings")

    # Include routers
    app.include_router(gen_router, prefix="gen")
    app.include_router(graph_router)
    app.include_router(ocrs_router, prefix="ocrs")
    app.include_router(rcrs_router, prefix="rcrs")
    app.include_router(estimate_router)
    app.include_router(verify_router, prefix="verify")
    app.include_router(hardness_router, prefix="hardness")
    app.include_router(report_router)
    return app


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch

    Returns:
        Exit status: 0 success, 1 failed check, 2 usage or input error
    """
    argv = sys.argv[1:] if argv is None else argv

    # Validate configuration
    if not settings.validate():
        logger.error("❌ Configuration validation failed")
        return EXIT_USAGE
    for warning in settings.get_warnings():
        logger.warning(f"⚠️ {warning}")

    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    try:
        defaults = load_config_file(known.config)
    except FileNotFoundError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE

    app = build_app()
    parser = app.build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    if args.log_level:
        logging.getLogger().setLevel(args.log_level.upper())

    return app.dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
