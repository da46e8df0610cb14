# tests/test_reporting.py
import json
import pytest

from src.reporting.models import ChartSpec, Report, ReportMetadata, ReportRow
from src.reporting.writer import CSV_HEADER, ReportWriter, emit_report, parse_formats
from src.utils.errors import ConfigError
from src.utils.formatting import format_number, round_sig, sanitize_filename


@pytest.fixture
def report():
    report = Report(
        experiment="Simulate",
        metadata=ReportMetadata(
            experiment_id="Simulate_gpt2-medium",
            config_hash="ab" * 32,
            tool_version="1.0.0",
            seed=0,
            timestamp="2026-01-01T00:00:00+00:00",
        ),
    )
    report.add("stages", "S1", "delay", 1.3109876543e-3, "s")
    report.add("stages", "S2", "delay", 0.000412, "s")
    report.add("stages", "S1", "crossbars", 2048, "count")
    report.add("performance", "pipeline", "feasible", True, "")
    report.charts.append(ChartSpec(name="stage_delays", title="Stage delay", section="stages",
                                   metrics=("delay",), ylabel="s"))
    return report


def test_round_sig():
    assert round_sig(1.3109876543e-3) == 0.00131099
    assert round_sig(123456789) == 123456789
    assert round_sig(True) is True
    with pytest.raises(ValueError):
        round_sig(float("inf"))


def test_format_number():
    assert format_number(0.00131099) == "0.00131099"
    assert format_number(12) == "12"
    assert format_number(False) == "false"
    assert format_number(1.5e-12) == "1.5e-12"


def test_sanitize_filename():
    assert sanitize_filename("NocCompare_gpt2 medium") == "NocCompare_gpt2_medium"
    assert sanitize_filename('a/b:c*"') == "abc"
    assert sanitize_filename("...") == "report"


def test_row_rejects_non_finite():
    with pytest.raises(ValueError):
        ReportRow(section="s", item="i", metric="m", value=float("nan"), unit="")


def test_report_lookup(report):
    assert report.value("stages", "S1", "crossbars") == 2048
    assert len(report.section("stages")) == 3
    with pytest.raises(KeyError):
        report.value("stages", "S9", "delay")


def test_parse_formats():
    assert parse_formats("CSV, json,csv") == ["csv", "json"]
    assert parse_formats(["svg"]) == ["svg"]
    with pytest.raises(ConfigError):
        parse_formats("csv,xlsx")
    with pytest.raises(ConfigError):
        parse_formats(" , ")


def test_write_csv(report, out_dir):
    paths = emit_report(report, "csv", out_dir)
    assert [p.name for p in paths] == ["Simulate_gpt2-medium.csv"]
    lines = paths[0].read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "stages,S1,delay,0.00131099,s"
    assert lines[4] == "performance,pipeline,feasible,true,"


def test_write_json_round_trip(report, out_dir):
    path = emit_report(report, ["json"], out_dir)[0]
    data = json.loads(path.read_text(encoding="utf-8"))
    # 既定ではタイムスタンプを出力しない
    assert "timestamp" not in data["metadata"]
    restored = Report.from_dict(data)
    assert restored == report
    assert restored.rows[0].value == 0.00131099


def test_json_includes_timestamp_on_request(report, out_dir):
    path = emit_report(report, "json", out_dir, include_timestamp=True)[0]
    assert json.loads(path.read_text(encoding="utf-8"))["metadata"]["timestamp"] == "2026-01-01T00:00:00+00:00"


def test_from_dict_rejects_unknown_schema(report):
    data = report.to_dict()
    data["schema_version"] = 99
    with pytest.raises(ValueError):
        Report.from_dict(data)


def test_outputs_are_byte_identical(report, tmp_path):
    first = emit_report(report, "csv,json,svg", tmp_path / "a")
    second = emit_report(report, "csv,json,svg", tmp_path / "b")
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_write_svg(report, out_dir):
    paths = ReportWriter(out_dir).write(report, "svg")
    assert [p.name for p in paths] == ["Simulate_gpt2-medium_stage_delays.svg"]
    assert paths[0].read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_empty_report_is_rejected(report, out_dir):
    report.rows.clear()
    with pytest.raises(ConfigError):
        emit_report(report, "csv", out_dir)
    assert not out_dir.exists()


def test_unwritable_output_dir(report, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(ConfigError):
        emit_report(report, "csv", blocker / "results")
