# tests/test_run_script.py
import json
import logging
import time
import pytest
from dataclasses import replace
from unittest.mock import MagicMock

from src.experiment import ExperimentKind, SweepConfig, load_experiment_config
from src.noc.models import TopologyKind
from src.run_script import EnergyBreakdown, ExperimentRunner, run_experiment
from src.utils.errors import ConfigError
from src.utils.logger import StructuredLogger


def _runner(experiment: str, **kwargs) -> ExperimentRunner:
    return ExperimentRunner(load_experiment_config(experiment=experiment, **kwargs))


@pytest.fixture(scope="module")
def simulate_report():
    return _runner("Simulate").run()


@pytest.fixture(scope="module")
def quant_report():
    return _runner("QuantSweep").run()


@pytest.fixture(scope="module")
def noc_report():
    return _runner("NocCompare").run()


def test_energy_breakdown_share():
    energy = EnergyBreakdown(reram=1.0, systolic=3.0, noc=0.0)
    assert energy.total == 4.0
    assert energy.share("reram") == pytest.approx(25.0)
    assert EnergyBreakdown(0.0, 0.0, 0.0).share("noc") == 0.0


def test_simulate_report_sections(simulate_report):
    sections = {row.section for row in simulate_report.rows}
    assert {"workload", "stages", "ops", "compute_share", "energy", "performance",
            "noc", "allocation", "endurance", "datasets"} <= sections
    assert simulate_report.metadata.experiment_id == "Simulate_gpt2-medium"
    assert simulate_report.metadata.timestamp is not None
    assert [chart.name for chart in simulate_report.charts] == ["stage_delays", "ops_breakdown", "energy_breakdown"]


def test_simulate_compute_share(simulate_report):
    assert simulate_report.value("compute_share", "ReRAM/Systolic", "exact_ratio") == pytest.approx(12288 / 1155, rel=1e-5)
    assert simulate_report.value("compute_share", "ReRAM/Systolic", "approx_ratio") == pytest.approx(12.0)
    share = simulate_report.value("compute_share", "ReRAM/Systolic", "reram_share")
    assert 90.4 <= share <= 92.9


def test_simulate_energy_share_below_op_share(simulate_report):
    op_share = simulate_report.value("ops", "ReRAM", "share")
    energy_share = simulate_report.value("energy", "ReRAM", "share")
    assert 90.0 <= op_share <= 95.0
    assert energy_share < op_share
    shares = [simulate_report.value("energy", item, "share") for item in ("ReRAM", "Systolic", "NoC")]
    assert sum(shares) == pytest.approx(100.0, abs=1e-3)


def test_simulate_performance(simulate_report):
    stage_time = simulate_report.value("performance", "pipeline", "stage_time")
    assert simulate_report.value("performance", "pipeline", "throughput") == pytest.approx(1 / stage_time, rel=1e-5)
    assert simulate_report.value("performance", "pipeline", "dram_load_delay") == pytest.approx(1.28e-6, rel=1e-5)
    # 最も遅いステージ以下のステージはない
    totals = [simulate_report.value("stages", s, "total_delay") for s in ("S1", "S2", "S3", "S4")]
    assert max(totals) == pytest.approx(stage_time, rel=1e-5)


def test_simulate_endurance(simulate_report):
    assert simulate_report.value("endurance", "AtleusHeterogeneous", "rewrites") == 0
    assert simulate_report.value("endurance", "AllOnReram", "rewrites") > 0


def test_quant_sweep_ordering(quant_report):
    energy = {plan: quant_report.value("quant", plan, "normalized_energy")
              for plan in ("16-bit", "M8F8", "M8F4", "M4F8", "M4F4")}
    assert energy["16-bit"] == pytest.approx(1.0)
    assert energy["M8F4"] < energy["M4F8"] < energy["M8F8"] < energy["16-bit"]
    assert energy["M4F4"] < energy["M8F4"]


def test_quant_sweep_noc_energy_unchanged(quant_report):
    noc = {quant_report.value("quant", plan, "noc_energy") for plan in ("16-bit", "M8F8", "M4F4")}
    assert len(noc) == 1


def test_quant_sweep_trend_fit(quant_report):
    alpha = quant_report.value("quant_fit", "energy_vs_bits", "alpha")
    assert 0.0 < alpha < 1.0
    assert quant_report.value("quant", "M4F4", "bits_normalized") == pytest.approx(0.25)
    assert quant_report.value("quant", "16-bit", "dequant_post_mvm") == 0
    assert quant_report.value("quant", "M8F8", "dequant_post_mvm") < quant_report.value("quant", "M8F8", "dequant_pre_compute")


def test_quant_sweep_level_usage(quant_report):
    low = quant_report.value("level_usage", "4-bit", "fraction")
    high = quant_report.value("level_usage", "16-bit", "fraction")
    assert 0.0 < high < low <= 1.0


def test_quant_sweep_without_baseline_plan():
    runner = _runner("QuantSweep")
    runner.config = replace(runner.config, sweep=replace(runner.config.sweep, precisions=("M4F4",)))
    report = runner.run()
    # 基準の 16-bit は行に出さないが正規化には使う
    assert report.value("quant", "M4F4", "normalized_energy") < 1.0
    with pytest.raises(KeyError):
        report.value("quant", "16-bit", "energy")


def test_shape_sweep_report():
    report = _runner("ShapeSweep").run()
    assert report.metadata.experiment_id == "ShapeSweep_bert-large"
    assert report.value("shape_sweep", "128x32", "rank") == 1
    assert report.value("shape_sweep", "128x32", "normalized_delay") == pytest.approx(0.907, abs=1e-3)
    assert report.value("shape_sweep", "128x32", "feasible") is True
    assert report.value("shape_sweep", "64x32", "feasible") is False
    assert report.value("shape_sweep", "ReRAM", "stage_delay") == pytest.approx(655.68e-6, rel=1e-5)


@pytest.mark.parametrize("experiment, sweep", [
    ("ShapeSweep", SweepConfig(precisions=("M8F8",))),
    ("QuantSweep", SweepConfig(shapes=((128, 32),))),
])
def test_empty_sweep_axis(experiment, sweep):
    runner = _runner(experiment)
    runner.config = replace(runner.config, sweep=sweep)
    with pytest.raises(ConfigError):
        runner.run()


def test_noc_compare_normalized(noc_report):
    assert noc_report.value("noc", "Mesh3D", "normalized_edp") == pytest.approx(1.0)
    assert noc_report.value("noc", "Atleus", "normalized_edp") < noc_report.value("noc", "Mesh3DSkip", "normalized_edp") < 1.0
    assert noc_report.value("noc", "Atleus", "normalized_area") == pytest.approx(26.29 / 25.19, abs=1e-3)
    assert noc_report.value("noc", "Mesh3DSkip", "normalized_cost") > noc_report.value("noc", "Atleus", "normalized_cost") > 1.0


def test_noc_compare_port_rows(noc_report):
    assert noc_report.value("noc_ports", "Mesh3D", "4_ports") == 8
    assert noc_report.value("noc_ports", "Atleus", "5_ports") == 46
    chart = next(c for c in noc_report.charts if c.name == "noc_ports")
    assert chart.metrics == ("4_ports", "5_ports", "6_ports", "7_ports")


def test_noc_compare_errors():
    runner = _runner("NocCompare")
    runner.config = replace(runner.config, noc_compare=(TopologyKind.ATLEUS,))
    with pytest.raises(ConfigError):
        runner.run()
    runner.config = replace(runner.config, noc_compare=())
    with pytest.raises(ConfigError):
        runner.run()


def test_cost_compare():
    report = run_experiment(load_experiment_config(experiment="CostCompare"))
    assert report.value("cost_2d_3d", "literal", "ratio") == pytest.approx(1.6745, abs=1e-4)
    assert report.value("cost_2d_3d", "textbook", "ratio") > report.value("cost_2d_3d", "literal", "ratio")
    assert report.value("die", "100 mm2", "dies_per_wafer") == pytest.approx(700.194, abs=1e-3)
    assert report.value("die", "400 mm2", "yield") == pytest.approx(0.49205, abs=1e-5)
    assert report.value("stack_cost", "Mesh3D", "normalized_cost") == pytest.approx(1.0)
    assert report.value("tier_cost", "Atleus/tier0", "die_area") > 100.0


def test_run_concurrently_keeps_input_order():
    runner = _runner("Simulate")

    def slow_first(value):
        # 先頭ほど遅く終わる
        time.sleep(0.01 * (4 - value))
        return value * 10

    assert runner._run_concurrently([0, 1, 2, 3], slow_first) == [0, 10, 20, 30]


def test_run_concurrently_propagates_errors():
    runner = _runner("Simulate")
    func = MagicMock(side_effect=[1, RuntimeError("boom"), 3])
    with pytest.raises(RuntimeError):
        ExperimentRunner(runner.config, max_workers=1)._run_concurrently(["a", "b", "c"], func)


def test_run_emits_structured_log(mocker):
    runner = _runner("CostCompare")
    mock_log = mocker.patch.object(runner.structured_logger, "info")
    runner.run()
    mock_log.assert_called_once()
    _, kwargs = mock_log.call_args
    assert kwargs["experiment_id"] == "CostCompare_gpt2-medium"
    assert kwargs["config_hash"] == runner.config.config_hash
    assert kwargs["success"] is True


def test_run_failure_is_logged_and_raised(mocker):
    runner = _runner("Simulate")
    mocker.patch.object(runner, "run_simulate", side_effect=ConfigError("bad", field="x"))
    mock_log = mocker.patch.object(runner.structured_logger, "info")
    mock_error = mocker.patch.object(runner.structured_logger, "error")
    with pytest.raises(ConfigError):
        runner.run()
    assert mock_log.call_args.kwargs["success"] is False
    mock_error.assert_called_once()
    assert mock_error.call_args.kwargs["error_type"] == "ConfigError"
    assert mock_error.call_args.kwargs["experiment_id"] == runner.config.experiment_id


def test_structured_logger_emits_json(caplog):
    structured = StructuredLogger("src.run_script")
    with caplog.at_level(logging.ERROR, logger="src.run_script"):
        structured.error("experiment failed", experiment_id="Simulate_gpt2-medium", error_type="ConfigError")
    entry = json.loads(caplog.records[-1].getMessage())
    assert entry["severity"] == "ERROR"
    assert entry["service"] == "stacked-pim-sim"
    assert entry["profile"] == "reference"
    assert entry["experiment_id"] == "Simulate_gpt2-medium"


def test_dispatch_covers_every_kind():
    for kind in ExperimentKind:
        runner = _runner(kind.value)
        assert runner.config.experiment == kind
