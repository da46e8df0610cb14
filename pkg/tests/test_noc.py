# tests/test_noc.py
import itertools

import pytest

from src.mapping.models import StageId
from src.mapping.pipeline import build_pipeline
from src.noc.evaluation import evaluate_noc, noc_area, stage_comm_model, tier_tsv_counts
from src.noc.loader import load_noc_params
from src.noc.models import Flow, LinkKind, NocParams, TopologyKind, TrafficTrace
from src.noc.routing import hop_count, route
from src.noc.topology import build_topology, is_hamiltonian_path, mean_ports, port_histogram, serpentine_order
from src.noc.traffic import DRAM_LABEL, gen_traffic, vertical_placement
from src.utils.errors import ConfigError, PlacementError, RoutingError
from src.workload.models import TransformerConfig
from src.workload.presets import get_preset

PARAMS = NocParams()


@pytest.fixture
def topologies():
    return {kind: build_topology(kind, params=PARAMS) for kind in TopologyKind}


@pytest.fixture
def gpt2_evaluations(gpt2, hw, topologies):
    schedule = build_pipeline(gpt2, hw)
    results = {}
    for kind, topo in topologies.items():
        placement = vertical_placement(gpt2.num_layers, topo, PARAMS)
        results[kind] = evaluate_noc(topo, gen_traffic(schedule, gpt2, placement), PARAMS)
    return results


def test_loader_matches_defaults():
    loaded = load_noc_params()
    assert loaded.topology == TopologyKind.ATLEUS
    assert loaded.tsv_energy_per_bit == pytest.approx(PARAMS.tsv_energy_per_bit)
    assert loaded.memory_controller == (0, 0, 0)
    assert loaded.layer_slots == 16
    assert load_noc_params({"topology": "Mesh3D"}).topology == TopologyKind.MESH3D
    with pytest.raises(ConfigError):
        load_noc_params({"topology": "Torus"})
    with pytest.raises(ConfigError):
        load_noc_params({"hop_energy": 1.0})


def test_serpentine_order():
    assert serpentine_order(3) == [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1), (0, 2), (1, 2), (2, 2)]


def test_node_ids(topologies):
    topo = topologies[TopologyKind.MESH3D]
    assert len(topo.nodes) == 64
    assert topo.node_id(2, 1, 3) == 2 * 16 + 3 * 4 + 1
    with pytest.raises(ConfigError):
        topo.node_id(4, 0, 0)


def test_port_histograms(topologies):
    assert port_histogram(topologies[TopologyKind.MESH3D]) == {4: 8, 5: 24, 6: 24, 7: 8}
    assert port_histogram(topologies[TopologyKind.MESH3D_SKIP]) == {5: 16, 6: 32, 7: 16}
    assert port_histogram(topologies[TopologyKind.ATLEUS]) == {4: 6, 5: 46, 6: 8, 7: 4}


def test_atleus_ports_shift_left(topologies):
    atleus = topologies[TopologyKind.ATLEUS]
    skip = topologies[TopologyKind.MESH3D_SKIP]
    assert mean_ports(atleus) < mean_ports(skip)
    assert port_histogram(atleus)[7] < port_histogram(skip)[7]
    # ReRAM tier の最大ポート数は厳密に小さい
    assert max(port_histogram(atleus, tiers=[1, 2, 3])) < max(port_histogram(skip, tiers=[1, 2, 3]))


def test_sfc_tiers_are_hamiltonian_paths(topologies):
    atleus = topologies[TopologyKind.ATLEUS]
    assert all(is_hamiltonian_path(atleus, tier) for tier in (1, 2, 3))
    assert not is_hamiltonian_path(atleus, 0)
    assert not is_hamiltonian_path(topologies[TopologyKind.MESH3D], 1)


def test_link_energies(topologies):
    skip_links = topologies[TopologyKind.ATLEUS].links_of_kind(LinkKind.TSV_SKIP)
    assert len(skip_links) == 16
    assert skip_links[0].energy_per_bit == pytest.approx(3 * PARAMS.tsv_energy_per_bit)
    assert PARAMS.tsv_energy_per_bit == pytest.approx(18.5e-15)
    assert not topologies[TopologyKind.MESH3D].has_skip


def test_skip_shortens_vertical_route(topologies):
    src = topologies[TopologyKind.MESH3D].node_id(0, 0, 0)
    dst = topologies[TopologyKind.MESH3D].node_id(3, 0, 0)
    assert hop_count(topologies[TopologyKind.MESH3D], src, dst) == 3
    assert hop_count(topologies[TopologyKind.MESH3D_SKIP], src, dst) == 1
    assert hop_count(topologies[TopologyKind.ATLEUS], src, dst) == 1


def test_skip_ablation_never_shortens():
    with_skip = build_topology(TopologyKind.ATLEUS, params=PARAMS)
    without = build_topology(TopologyKind.ATLEUS, with_skip=False, params=PARAMS)
    assert not without.has_skip
    for src in range(0, 64, 7):
        for dst in range(0, 64, 5):
            assert hop_count(with_skip, src, dst) <= hop_count(without, src, dst)


def test_skip_ablation_lengthens_outer_tier_routes():
    with_skip = build_topology(TopologyKind.ATLEUS, params=PARAMS)
    without = build_topology(TopologyKind.ATLEUS, with_skip=False, params=PARAMS)
    for a, b in itertools.product(range(16), repeat=2):
        bottom = with_skip.node_id(0, a % 4, a // 4)
        top = with_skip.node_id(3, b % 4, b // 4)
        for src, dst in ((bottom, top), (top, bottom)):
            assert hop_count(without, src, dst) > hop_count(with_skip, src, dst), (src, dst)


def test_mesh_routes_are_manhattan(topologies):
    mesh = topologies[TopologyKind.MESH3D]
    for src, dst in itertools.product(mesh.nodes, repeat=2):
        distance = abs(src.tier - dst.tier) + abs(src.x - dst.x) + abs(src.y - dst.y)
        assert hop_count(mesh, src.id, dst.id) == distance


def test_sfc_routing_follows_path(topologies):
    atleus = topologies[TopologyKind.ATLEUS]
    # 蛇行路の両端 (0,0) と (0,3) は路に沿って 15 ホップ
    assert hop_count(atleus, atleus.node_id(1, 0, 0), atleus.node_id(1, 0, 3)) == 15
    mesh = topologies[TopologyKind.MESH3D]
    assert hop_count(mesh, mesh.node_id(1, 0, 0), mesh.node_id(1, 0, 3)) == 3


def test_route_edge_cases(topologies):
    topo = topologies[TopologyKind.MESH3D]
    assert route(topo, 5, 5) == ()
    with pytest.raises(RoutingError):
        route(topo, 0, 64)


def test_routes_are_deterministic(topologies):
    topo = topologies[TopologyKind.ATLEUS]
    assert route(topo, 3, 60) == route(topo, 3, 60)
    assert build_topology(TopologyKind.ATLEUS, params=PARAMS) is topo


def test_flow_validation():
    with pytest.raises(ConfigError):
        Flow(src=1, dst=1, bytes_per_iteration=8, stage="S2")
    with pytest.raises(ConfigError):
        Flow(src=1, dst=2, bytes_per_iteration=0, stage="S2")


def test_vertical_placement(gpt2, topologies):
    topo = topologies[TopologyKind.ATLEUS]
    placement = vertical_placement(gpt2.num_layers, topo, PARAMS)
    assert placement.window == 16
    assert placement.node(0, StageId.S2) == 0
    assert placement.node(0, StageId.S1) == topo.node_id(3, 0, 0)
    assert placement.node(1, StageId.S3) == topo.node_id(2, 1, 0)
    assert placement.node(4, StageId.S4) == topo.node_id(1, 3, 1)
    with pytest.raises(PlacementError):
        placement.node(16, StageId.S1)


def test_gen_traffic_gpt2(gpt2, hw, topologies):
    topo = topologies[TopologyKind.ATLEUS]
    schedule = build_pipeline(gpt2, hw)
    trace = gen_traffic(schedule, gpt2, vertical_placement(gpt2.num_layers, topo, PARAMS))
    assert len(trace.flows) == 16 * 3 + 15 + 15
    by_label = trace.bytes_by_label()
    assert by_label["S1->S2"] == 16 * 3 * 1024 * 1024 * 2
    # スロット 0 の S2 はメモリコントローラ上なので DRAM フローなし
    assert by_label[DRAM_LABEL] == 15 * 262144


@pytest.mark.parametrize("bits, s2_to_s3", [(12, 1572864), (4, 524288)])
def test_gen_traffic_narrow_activations(gpt2, hw, topologies, bits, s2_to_s3):
    # 8 の倍数でない活性化幅でもバイト数を取りこぼさない
    cfg = get_preset("gpt2-medium", overrides={"activation_bits": bits})
    topo = topologies[TopologyKind.ATLEUS]
    schedule = build_pipeline(gpt2, hw)
    trace = gen_traffic(schedule, cfg, vertical_placement(cfg.num_layers, topo, PARAMS))
    flows = [f for f in trace.flows if f.label == "S2->S3"]
    assert len(flows) == 16
    assert all(f.bytes_per_iteration == s2_to_s3 for f in flows)
    # LoRA パラメータは常に 16 ビット
    assert trace.bytes_by_label()[DRAM_LABEL] == 15 * 262144


def test_gen_traffic_minimal_workload(gpt2, hw, topologies):
    # フローの生成はスケジュールのステージ構成だけを参照する
    cfg = TransformerConfig(d_model=2, n=1, num_layers=1, num_heads=1, r=1, k=1)
    topo = topologies[TopologyKind.MESH3D]
    schedule = build_pipeline(gpt2, hw)
    trace = gen_traffic(schedule, cfg, vertical_placement(1, topo, PARAMS))
    s2_to_s3 = [f for f in trace.flows if f.label == "S2->S3"]
    assert [f.bytes_per_iteration for f in s2_to_s3] == [1 * 2 * 2]
    assert all(f.label != "S4->S1" for f in trace.flows)


def test_evaluate_noc_edp_ordering(gpt2_evaluations):
    edp = {kind: ev.edp for kind, ev in gpt2_evaluations.items()}
    assert edp[TopologyKind.ATLEUS] < edp[TopologyKind.MESH3D_SKIP] < edp[TopologyKind.MESH3D]


def test_evaluate_noc_per_stage_delays(gpt2_evaluations):
    evaluation = gpt2_evaluations[TopologyKind.ATLEUS]
    assert set(evaluation.per_stage_comm_delay) == {"S1", "S2", "S3", "S4"}
    assert all(delay > 0 for delay in evaluation.per_stage_comm_delay.values())
    assert evaluation.edp == pytest.approx(evaluation.total_energy * evaluation.total_delay)


def test_evaluate_noc_requires_flows(topologies):
    with pytest.raises(ConfigError):
        evaluate_noc(topologies[TopologyKind.MESH3D], TrafficTrace(flows=()), PARAMS)


def test_noc_areas(topologies):
    mesh = noc_area(topologies[TopologyKind.MESH3D], PARAMS)
    atleus = noc_area(topologies[TopologyKind.ATLEUS], PARAMS)
    skip = noc_area(topologies[TopologyKind.MESH3D_SKIP], PARAMS)
    assert mesh == pytest.approx(25.19, abs=0.01)
    assert atleus == pytest.approx(26.29, abs=0.01)
    assert skip == pytest.approx(33.56, abs=0.01)
    assert mesh < atleus < skip
    assert atleus / mesh - 1 <= 0.08
    assert skip / mesh - 1 >= 0.12


def test_tier_tsv_counts(topologies):
    counts = tier_tsv_counts(topologies[TopologyKind.MESH3D_SKIP])
    assert counts[0] == {"adjacent": 0, "skip": 0}
    assert counts[1]["adjacent"] == 16 * 128
    assert all(counts[tier]["skip"] == 16 * 128 for tier in (1, 2, 3))


def test_stage_comm_model(gpt2, hw, topologies):
    model = stage_comm_model(topologies[TopologyKind.ATLEUS], PARAMS)
    schedule = build_pipeline(gpt2, hw, comm_model=model)
    assert all(stage.comm_delay > 0 for stage in schedule.stages)
