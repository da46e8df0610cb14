from collections import defaultdict
from typing import Dict, List, Mapping, Optional, Tuple
import logging

from ..mapping.models import PipelineSchedule, StageId
from ..utils.errors import ConfigError
from ..workload.models import TransformerConfig
from .models import LinkKind, NocEvaluation, NocParams, Topology, TrafficTrace
from .routing import get_router
from .traffic import gen_traffic, vertical_placement

logger = logging.getLogger(__name__)


def router_energy_per_bit(topo: Topology, params: NocParams, path: List[int]) -> float:
    """経路上の全ルータ (両端を含む) の通過エネルギー"""
    return sum(params.router_energy_per_bit_per_port * topo.ports(node_id) for node_id in path)


def evaluate_noc(topo: Topology, traffic: TrafficTrace, params: NocParams) -> NocEvaluation:
    """
    ホップ数とリンク直列化による解析評価

    ステージ内で同じリンクを使うフローはそのリンク上で直列化する。
    ステージの通信遅延はフローの遅延の最大値。
    """
    if not traffic.flows:
        raise ConfigError("NoC evaluation needs at least one flow", field='traffic')

    router = get_router(topo)
    routed = []
    stage_link_bits: Dict[str, Dict[Tuple[int, int], float]] = defaultdict(lambda: defaultdict(float))
    for flow in traffic.flows:
        links = router.route(flow.src, flow.dst)
        bits = flow.bytes_per_iteration * 8
        for link in links:
            stage_link_bits[flow.stage][link.key] += bits
        routed.append((flow, links, bits))

    total_energy = 0.0
    total_hops = 0
    per_stage: Dict[str, float] = {stage.value: 0.0 for stage in StageId}
    for flow, links, bits in routed:
        path = router.node_path(flow.src, flow.dst)
        per_bit = sum(link.energy_per_bit for link in links) + router_energy_per_bit(topo, params, path)
        total_energy += bits * per_bit
        total_hops += len(links)

        serialization = max(
            stage_link_bits[flow.stage][link.key] / (link.width_bits * params.clock_hz) for link in links
        )
        delay = len(links) * params.router_latency_cycles / params.clock_hz + serialization
        per_stage[flow.stage] = max(per_stage.get(flow.stage, 0.0), delay)

    edp = total_energy * sum(per_stage.values())
    area = noc_area(topo, params)
    logger.debug(
        f"{topo.kind_tag.value}: energy {total_energy:.6g} J, EDP {edp:.6g} J*s, area {area:.6g} mm2"
    )
    return NocEvaluation(
        topology=topo.kind_tag,
        per_stage_comm_delay=per_stage,
        total_energy=total_energy,
        edp=edp,
        noc_area_mm2=area,
        total_hops=total_hops,
    )


def router_area(topo: Topology, params: NocParams, tier: Optional[int] = None) -> float:
    """ルータ面積 ∝ ポート数²"""
    return sum(
        params.router_area_unit * topo.ports(node.id) ** 2
        for node in topo.nodes
        if tier is None or node.tier == tier
    )


def tsv_area(topo: Topology, params: NocParams) -> float:
    total = 0.0
    for link in topo.links:
        if link.kind == LinkKind.TSV_ADJACENT:
            total += link.width_bits * params.tsv_area_mm2
        elif link.kind == LinkKind.TSV_SKIP:
            total += link.width_bits * params.skip_tsv_area_mm2
    return total


def noc_area(topo: Topology, params: NocParams) -> float:
    return router_area(topo, params) + tsv_area(topo, params)


def tier_tsv_counts(topo: Topology) -> Dict[int, Dict[str, int]]:
    """
    tier ごとの TSV 本数 (配線資源を塞ぐ分)

    隣接 TSV (t, t+1) は tier t+1 に、スキップ TSV は通過・到達する tier 1 以上すべてに計上
    """
    counts = {tier: {'adjacent': 0, 'skip': 0} for tier in range(topo.tiers)}
    for link in topo.links:
        low, high = sorted((topo.node(link.a).tier, topo.node(link.b).tier))
        if link.kind == LinkKind.TSV_ADJACENT:
            counts[high]['adjacent'] += link.width_bits
        elif link.kind == LinkKind.TSV_SKIP:
            for tier in range(low + 1, high + 1):
                counts[tier]['skip'] += link.width_bits
    return counts


def stage_comm_model(topo: Topology, params: NocParams):
    """
    build_pipeline に渡す通信遅延モデル (縦配置のトラフィックを評価)
    """
    def model(schedule: PipelineSchedule, cfg: TransformerConfig) -> Mapping[StageId, float]:
        placement = vertical_placement(cfg.num_layers, topo, params)
        evaluation = evaluate_noc(topo, gen_traffic(schedule, cfg, placement), params)
        return {StageId(stage): delay for stage, delay in evaluation.per_stage_comm_delay.items()}

    return model
