"""
Reproduction table assembly
Collects the rows commands leave in <command>.summary.json and writes markdown, CSV and xlsx
"""

import os
import logging
from typing import Any, Dict, List, Optional

import pandas as pd
from openpyxl.styles import Font, PatternFill, Alignment

from errors import ArtifactError
from models import RunConfig
import storage

logger = logging.getLogger(__name__)

# (row id, description, reference value)
TABLE_ROWS = [
    ("ocrs_general", "OCRS, general graphs (guarantee)", 0.3445),
    ("ocrs_bipartite", "OCRS, bipartite graphs (guarantee)", 0.349),
    ("any_ocrs_ub", "Any OCRS (upper bound)", 0.4),
    ("alg1_general_ub", "Attenuated greedy OCRS, general (upper bound)", 0.361),
    ("alg1_bipartite_ub", "Attenuated greedy OCRS, bipartite (upper bound)", 0.382),
    ("rcrs_general", "RCRS, general graphs (guarantee)", 0.474),
    ("rcrs_bipartite", "RCRS, bipartite graphs (guarantee)", 0.4789),
    ("rom_ub", "Random-order matching (upper bound)", 0.5),
]

COLUMNS = ["row", "description", "reference", "measured", "ci_lo", "ci_hi", "source", "note", "status"]


class ReportService:
    """Table assembly from command summaries"""

    def collect_rows(self, summaries: List[Dict[str, Any]]) -> pd.DataFrame:
        """
        One line per table row; the last summary contributing a row wins

        Args:
            summaries: Parsed summary payloads, in file-name order

        Returns:
            DataFrame with COLUMNS, missing rows flagged "missing"
        """
        found: Dict[str, Dict[str, Any]] = {}
        for summary in summaries:
            for entry in summary.get("rows", []):
                row_id = entry.get("row") if isinstance(entry, dict) else None
                if row_id not in {r[0] for r in TABLE_ROWS}:
                    logger.warning(f"⚠️ Unknown table row '{row_id}' in {summary.get('command')}")
                    continue
                found[row_id] = {**entry, "source": summary.get("command")}

        records = []
        for row_id, description, reference in TABLE_ROWS:
            entry = found.get(row_id)
            if entry is None:
                records.append({"row": row_id, "description": description, "reference": reference,
                                "measured": None, "ci_lo": None, "ci_hi": None, "source": None,
                                "note": None, "status": "missing"})
                continue
            records.append({"row": row_id, "description": description, "reference": reference,
                            "measured": entry.get("measured"), "ci_lo": entry.get("ci_lo"),
                            "ci_hi": entry.get("ci_hi"), "source": entry.get("source"),
                            "note": entry.get("note"), "status": "ok"})

        frame = pd.DataFrame.from_records(records, columns=COLUMNS)
        gaps = int((frame["status"] == "missing").sum())
        if gaps:
            logger.warning(f"⚠️ {gaps} of {len(TABLE_ROWS)} table rows have no measurement")
        return frame

    def to_markdown(self, frame: pd.DataFrame) -> str:
        def fmt(value: Optional[float]) -> str:
            return "" if value is None or pd.isna(value) else f"{value:.6f}"

        lines = [
            "| Row | Reference | Measured | CI | Source | Status |",
            "|---|---|---|---|---|---|",
        ]
        for rec in frame.to_dict("records"):
            ci = ""
            if not pd.isna(rec["ci_lo"]) and not pd.isna(rec["ci_hi"]):
                ci = f"[{fmt(rec['ci_lo'])}, {fmt(rec['ci_hi'])}]"
            status = "**MISSING**" if rec["status"] == "missing" else rec["status"]
            source = rec["source"] if isinstance(rec["source"], str) else ""
            lines.append(f"| {rec['description']} | {rec['reference']} | {fmt(rec['measured'])} | "
                         f"{ci} | {source} | {status} |")
        return "\n".join(lines) + "\n"

    def _format_sheet(self, worksheet, title: str) -> None:
        """Title in row 1, styled header in row 2"""
        header_font = Font(bold=True, color="FFFFFF")
        header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        header_alignment = Alignment(horizontal="center", vertical="center")
        for cell in worksheet[2]:
            cell.font = header_font
            cell.fill = header_fill
            cell.alignment = header_alignment

        worksheet["A1"] = title
        worksheet["A1"].font = Font(bold=True, size=14)
        worksheet["A1"].alignment = Alignment(horizontal="left", vertical="center")

        missing_fill = PatternFill(start_color="F4CCCC", end_color="F4CCCC", fill_type="solid")
        status_col = COLUMNS.index("status") + 1
        for row in worksheet.iter_rows(min_row=3):
            if row[status_col - 1].value == "missing":
                for cell in row:
                    cell.fill = missing_fill

    def write_workbook(self, frame: pd.DataFrame, path: str) -> None:
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            frame.to_excel(writer, sheet_name="Table", index=False, startrow=1)
            self._format_sheet(writer.sheets["Table"], "Contention resolution reproduction table")

    def build_report(self, results_dir: str, run_config: RunConfig,
                     output_dir: Optional[str] = None) -> pd.DataFrame:
        """
        Assemble report.md, report.csv and report.xlsx from a results directory

        Raises:
            ArtifactError: the directory holds no summaries
        """
        summaries = storage.load_summaries(results_dir)
        if not summaries:
            raise ArtifactError(f"No *.summary.json files in {results_dir}")
        logger.info(f"🚀 Building report from {len(summaries)} summaries in {results_dir}")

        frame = self.collect_rows(summaries)
        target = output_dir or results_dir
        os.makedirs(target, exist_ok=True)
        with open(os.path.join(target, "report.md"), "w", encoding="utf-8") as fh:
            fh.write(self.to_markdown(frame))
        storage.write_csv(frame, os.path.join(target, "report.csv"), run_config)
        self.write_workbook(frame, os.path.join(target, "report.xlsx"))
        logger.info(f"📁 Report written to {target}")
        return frame


# Global report service instance
report_service = ReportService()
