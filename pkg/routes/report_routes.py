"""
Reproduction table command
"""

import argparse

from models import RunConfig
from routes.router import CommandRouter, CommandOutcome, arg, EXIT_CHECK_FAILED, EXIT_OK
from config import settings
from services.report_service import report_service

report_router = CommandRouter()


@report_router.command("report", help="Assemble command summaries into markdown, CSV and xlsx tables",
                       arguments=[arg("--results-dir", default=settings.OUTPUT_DIR),
                                  arg("--target-dir", default=None, help="Where to write the report files")])
def report(args: argparse.Namespace, run_config: RunConfig) -> CommandOutcome:
    frame = report_service.build_report(args.results_dir, run_config, args.target_dir)
    print(report_service.to_markdown(frame), end="")
    gaps = int((frame["status"] == "missing").sum())
    return CommandOutcome(exit_code=EXIT_CHECK_FAILED if gaps else EXIT_OK,
                          extra={"rows": len(frame), "missing": gaps})
