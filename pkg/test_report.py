"""
Tests for summary persistence and the reproduction table
"""

import json

import pandas as pd
import pytest
from openpyxl import load_workbook

from errors import ArtifactError
from models import RunConfig, TableRow
from services.report_service import report_service, TABLE_ROWS
import storage


def config():
    return RunConfig(subcommand="test", seed=4)


def summary(command, rows):
    return {"command": command, "rows": [r.model_dump(mode="json") for r in rows]}


def test_config_hash_ignores_outputs():
    """Test that output paths do not change the configuration hash"""
    first = RunConfig(subcommand="ocrs run", seed=1, parameters={"c": 0.3}, outputs={"out": "a.json"})
    second = RunConfig(subcommand="ocrs run", seed=1, parameters={"c": 0.3}, outputs={"out": "b.json"})
    third = RunConfig(subcommand="ocrs run", seed=2, parameters={"c": 0.3})
    assert first.config_hash() == second.config_hash()
    assert first.config_hash() != third.config_hash()


def test_collect_rows_last_summary_wins():
    """Test row selection, unknown rows and missing rows"""
    summaries = [
        summary("estimate", [TableRow(row="rcrs_general", measured=0.5)]),
        summary("verify-curves", [TableRow(row="rcrs_general", measured=0.474035),
                                  TableRow(row="not_a_row", measured=1.0)]),
    ]
    frame = report_service.collect_rows(summaries)
    assert list(frame["row"]) == [r[0] for r in TABLE_ROWS]
    general = frame.set_index("row").loc["rcrs_general"]
    assert general["measured"] == pytest.approx(0.474035)
    assert general["source"] == "verify-curves"
    assert general["status"] == "ok"
    assert int((frame["status"] == "missing").sum()) == len(TABLE_ROWS) - 1


def test_markdown_marks_missing_rows():
    frame = report_service.collect_rows([])
    markdown = report_service.to_markdown(frame)
    assert markdown.count("**MISSING**") == len(TABLE_ROWS)
    assert markdown.startswith("| Row | Reference |")


def test_build_report_writes_all_formats(tmp_path):
    """Test report.md, report.csv and a styled report.xlsx"""
    results = tmp_path / "results"
    storage.save_summary("ocrs-maxc", [TableRow(row="alg1_bipartite_ub", measured=0.381966)],
                         config(), str(results))
    frame = report_service.build_report(str(results), config(), str(tmp_path / "out"))
    assert len(frame) == len(TABLE_ROWS)

    table = storage.read_csv(str(tmp_path / "out" / "report.csv"))
    assert list(table.columns) == list(frame.columns)
    with open(tmp_path / "out" / "report.csv", "r", encoding="utf-8") as fh:
        assert fh.readline().startswith("# seed=4")

    sheet = load_workbook(tmp_path / "out" / "report.xlsx")["Table"]
    assert sheet["A1"].value == "Contention resolution reproduction table"
    assert sheet["A2"].value == "row"
    assert sheet["A2"].font.bold


def test_build_report_needs_summaries(tmp_path):
    with pytest.raises(ArtifactError):
        report_service.build_report(str(tmp_path), config())
    with pytest.raises(ArtifactError):
        report_service.build_report(str(tmp_path / "absent"), config())


def test_instance_round_trip_and_schema_version(tmp_path):
    """Test instance persistence and refusal of newer schema versions"""
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": 2, "edges": [[0, 1, 0.5]], "schema_version": 1}))
    g = storage.load_instance(str(path))
    assert g.edges == [(0, 1, 0.5)]

    path.write_text(json.dumps({"vertices": 2, "edges": [[0, 1, 0.5]], "schema_version": 99}))
    with pytest.raises(ArtifactError):
        storage.load_instance(str(path))

    path.write_text(json.dumps([1, 2, 3]))
    with pytest.raises(ArtifactError):
        storage.load_instance(str(path))


def test_unreadable_summary_is_skipped(tmp_path):
    (tmp_path / "bad.summary.json").write_text("{")
    storage.save_summary("good", [], config(), str(tmp_path))
    summaries = storage.load_summaries(str(tmp_path))
    assert [s["command"] for s in summaries] == ["good"]


def test_write_csv_to_file(tmp_path):
    frame = pd.DataFrame({"a": [1, 2]})
    storage.write_csv(frame, str(tmp_path / "t.csv"), config())
    assert (tmp_path / "t.meta.json").exists()
    assert list(storage.read_csv(str(tmp_path / "t.csv"))["a"]) == [1, 2]


@pytest.mark.parametrize("loader,content", [
    (storage.load_plan, "[1, 2]"),
    (storage.load_edge_map, "[0, 1]"),
    (storage.load_edge_map, '{"edge_map": ["a"]}'),
    (storage.load_instance, '{"schema_version": "1", "vertices": 2, "edges": []}'),
    (storage.load_instance, '{"schema_version": true, "vertices": 2, "edges": []}'),
])
def test_malformed_artifacts_raise_artifact_error(tmp_path, loader, content):
    path = tmp_path / "artifact.json"
    path.write_text(content)
    with pytest.raises(ArtifactError):
        loader(str(path))


def test_summary_that_is_not_an_object_is_skipped(tmp_path):
    (tmp_path / "list.summary.json").write_text("[]")
    storage.save_summary("good", [], config(), str(tmp_path))
    assert [s["command"] for s in storage.load_summaries(str(tmp_path))] == ["good"]
