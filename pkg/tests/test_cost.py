# tests/test_cost.py
import itertools

import pytest

from src.cost.loader import load_cost_params
from src.cost.models import EQ7_TEXTBOOK, CostParams, DieSpec
from src.cost.yield_model import (
    compare_2d_3d,
    cost_summary,
    die_area,
    die_cost,
    die_yield,
    dies_per_wafer,
    normalized_cost,
    stack_cost_3d,
    stack_cost_for_topology,
    tier_die_specs,
)
from src.noc.models import NocParams, TopologyKind
from src.noc.topology import build_topology
from src.utils.errors import ConfigError


@pytest.fixture
def params():
    return CostParams()


@pytest.fixture
def stacks(hw, params):
    noc_params = NocParams()
    return {
        kind.value: stack_cost_for_topology(build_topology(kind, params=noc_params), noc_params, hw, params)
        for kind in TopologyKind
    }


def test_loader_matches_defaults(params):
    assert load_cost_params() == params
    assert load_cost_params({"eq7_variant": "textbook"}).eq7_variant == EQ7_TEXTBOOK
    with pytest.raises(ConfigError):
        load_cost_params({"eq7_variant": "exact"})
    with pytest.raises(ConfigError):
        load_cost_params({"die_cost": 3})


def test_dies_per_wafer_literal(params):
    assert dies_per_wafer(100.0, params) == pytest.approx(700.194, abs=1e-3)
    assert dies_per_wafer(400.0, params) == pytest.approx(175.049, abs=1e-3)


def test_dies_per_wafer_textbook():
    textbook = CostParams(eq7_variant=EQ7_TEXTBOOK)
    assert dies_per_wafer(100.0, textbook) == pytest.approx(640.2, abs=0.1)


def test_die_yield(params):
    assert die_yield(100.0, params) == pytest.approx(0.82397, abs=1e-5)
    assert die_yield(400.0, params) == pytest.approx(0.49205, abs=1e-5)
    # 欠陥がなければウェハ歩留まりのみ
    assert die_yield(400.0, CostParams(defect_density_per_cm2=0.0, wafer_yield=0.9)) == pytest.approx(0.9)


def test_yield_decreases_with_area(params):
    areas = [10.0, 50.0, 100.0, 200.0, 400.0, 800.0]
    yields = [die_yield(a, params) for a in areas]
    assert yields == sorted(yields, reverse=True)


@pytest.mark.parametrize("area", [0.0, -5.0])
def test_rejects_non_positive_area(params, area):
    with pytest.raises(ConfigError):
        dies_per_wafer(area, params)
    with pytest.raises(ConfigError):
        die_yield(area, params)


def test_rejects_die_larger_than_wafer(params):
    with pytest.raises(ConfigError):
        dies_per_wafer(80000.0, params)


def test_compare_2d_3d(params):
    comparison = compare_2d_3d(params, tier_area_mm2=100.0, tiers=4)
    assert comparison.area_2d_mm2 == 400.0
    assert comparison.ratio == pytest.approx(1.6745, abs=1e-4)
    with_stacking = compare_2d_3d(params, tier_area_mm2=100.0, tiers=4, include_stacking=True)
    assert with_stacking.ratio == pytest.approx(comparison.ratio * 0.99 ** 4)
    assert with_stacking.ratio > 1.0


def test_compare_2d_3d_textbook_still_favours_3d():
    comparison = compare_2d_3d(CostParams(eq7_variant=EQ7_TEXTBOOK))
    assert comparison.ratio > 1.0
    assert comparison.to_dict()["eq7_variant"] == EQ7_TEXTBOOK


def test_compare_2d_3d_rejects_zero_tiers(params):
    with pytest.raises(ConfigError):
        compare_2d_3d(params, tiers=0)


def test_normalized_cost(params):
    assert normalized_cost(DieSpec(400.0), DieSpec(100.0), params) == pytest.approx(6.698, abs=1e-3)
    assert normalized_cost(DieSpec(100.0), DieSpec(100.0), params) == pytest.approx(1.0)
    # コア 100 mm² + TSV 4 mm²
    with_tsv = DieSpec(core_area_mm2=100.0, tsv_count=400, tsv_area_each_mm2=0.01)
    assert die_area(with_tsv) == pytest.approx(104.0)
    assert normalized_cost(with_tsv, DieSpec(100.0), params) == pytest.approx(1.0478, abs=1e-4)


def test_normalized_cost_reciprocal(params):
    areas = [10.0, 55.5, 100.0, 104.0, 250.0, 400.0, 800.0]
    for a, b in itertools.product(areas, repeat=2):
        forward = normalized_cost(DieSpec(a), DieSpec(b), params)
        assert forward * normalized_cost(DieSpec(b), DieSpec(a), params) == pytest.approx(1.0, rel=1e-12)
        assert (forward > 1.0) == (a > b)


def test_die_cost_uses_wafer_cost(params):
    doubled = CostParams(wafer_cost=2.0)
    assert die_cost(100.0, doubled) == pytest.approx(2 * die_cost(100.0, params))


def test_stack_cost_3d(params):
    assert stack_cost_3d([1.0, 1.0, 1.0, 1.0], params) == pytest.approx(4 / 0.99 ** 4)
    assert stack_cost_3d([2.0], params) == pytest.approx(2 / 0.99)
    with pytest.raises(ConfigError):
        stack_cost_3d([], params)


def test_die_spec_rejects_negative_area():
    with pytest.raises(ConfigError):
        DieSpec(core_area_mm2=-1.0)


def test_cost_params_validation():
    with pytest.raises(ConfigError):
        CostParams(stacking_yield=1.5)
    with pytest.raises(ConfigError):
        CostParams(wafer_cost=0.0)


def test_tier_die_specs(hw):
    noc_params = NocParams()
    dies = tier_die_specs(build_topology(TopologyKind.MESH3D, params=noc_params), noc_params, hw)
    assert len(dies) == 4
    # シストリック tier は TSV を受けない
    assert dies[0].tsv_count == 0
    assert all(die.skip_tsv_count == 0 for die in dies)
    assert all(die.tsv_count == 16 * 128 for die in dies[1:])


def test_topology_cost_ordering(stacks):
    costs = {name: stack.cost_3d for name, stack in stacks.items()}
    assert costs["Mesh3D"] < costs["Atleus"] < costs["Mesh3DSkip"]


def test_cost_summary(stacks):
    summary = cost_summary(stacks, "Mesh3D")
    assert summary["Mesh3D"] == pytest.approx(1.0)
    assert summary["Atleus"] > 1.0
    with pytest.raises(ConfigError):
        cost_summary(stacks, "Torus")
