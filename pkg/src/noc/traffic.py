from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from ..mapping.models import PipelineSchedule, StageId
from ..utils.errors import ConfigError, PlacementError
from ..workload.models import TransformerConfig
from .models import Flow, NocParams, Topology, TrafficTrace
from .topology import SYSTOLIC_TIER, serpentine_order

logger = logging.getLogger(__name__)

DRAM_LABEL = 'DRAM->S2'


@dataclass(frozen=True)
class Placement:
    """(層スロット, ステージ) → ノード id"""
    nodes: Dict[Tuple[int, StageId], int] = field(default_factory=dict)
    window: int = 1
    memory_controller: int = 0

    def node(self, layer: int, stage: StageId) -> int:
        key = (layer, StageId(stage))
        if key not in self.nodes:
            raise PlacementError(f"Stage {StageId(stage).value} of layer slot {layer} is not placed")
        return self.nodes[key]


def stage_tiers(tiers: int) -> Dict[StageId, int]:
    """
    ステージ → tier

    S2 はシストリック tier、S1 は最上段 (スキップ TSV で S2 と直結)、S3, S4 は下へ
    """
    return {
        StageId.S2: SYSTOLIC_TIER,
        StageId.S1: tiers - 1,
        StageId.S3: tiers - 2,
        StageId.S4: 1,
    }


def vertical_placement(num_layers: int, topo: Topology, params: NocParams,
                       positions: Optional[Sequence[Tuple[int, int]]] = None) -> Placement:
    """
    層スロット s を蛇行順の位置 s に置き、4ステージを同じ (x, y) の各 tier に縦配置する

    同時に載る層数は min(num_layers, layer_slots, grid²)
    """
    positions = list(positions) if positions is not None else serpentine_order(topo.grid)
    window = min(num_layers, params.layer_slots, len(positions))
    if window < 1:
        raise ConfigError("Placement needs at least one layer", field='num_layers')

    tiers = stage_tiers(topo.tiers)
    nodes = {}
    for slot in range(window):
        x, y = positions[slot]
        for stage_id, tier in tiers.items():
            nodes[(slot, stage_id)] = topo.node_id(tier, x, y)
    return Placement(nodes=nodes, window=window, memory_controller=topo.node_id(*params.memory_controller))


def gen_traffic(schedule: PipelineSchedule, cfg: TransformerConfig, placement: Placement) -> TrafficTrace:
    """
    1イテレーション分のフロー (各フローは消費側ステージに計上)

    S1→S2: 3·n·d (Q, K, V) / S2→S3: n·d / S3→S4: n·d_ff / S4→次層S1: n·d (活性化幅をビット単位で掛けてバイトに切り上げ)
    DRAM→S2: LoRA パラメータ
    """
    d, n, d_ff = cfg.d_model, cfg.n, cfg.d_ff
    present = {stage.id for stage in schedule.stages}
    for stage_id in (StageId.S1, StageId.S2, StageId.S3, StageId.S4):
        if stage_id not in present:
            raise PlacementError(f"Schedule has no stage {stage_id.value}")

    edges = [
        (StageId.S1, StageId.S2, cfg.activation_message_bytes(3 * n * d)),
        (StageId.S2, StageId.S3, cfg.activation_message_bytes(n * d)),
        (StageId.S3, StageId.S4, cfg.activation_message_bytes(n * d_ff)),
    ]

    flows: List[Flow] = []
    for slot in range(placement.window):
        for producer, consumer, num_bytes in edges:
            flows.append(Flow(
                src=placement.node(slot, producer),
                dst=placement.node(slot, consumer),
                bytes_per_iteration=num_bytes,
                stage=consumer.value,
                layer=slot,
                label=f"{producer.value}->{consumer.value}",
            ))
        if slot + 1 < placement.window:
            flows.append(Flow(
                src=placement.node(slot, StageId.S4),
                dst=placement.node(slot + 1, StageId.S1),
                bytes_per_iteration=cfg.activation_message_bytes(n * d),
                stage=StageId.S1.value,
                layer=slot,
                label='S4->S1',
            ))
        lora_bytes = cfg.lora_param_bytes
        target = placement.node(slot, StageId.S2)
        if lora_bytes > 0 and target != placement.memory_controller:
            flows.append(Flow(
                src=placement.memory_controller,
                dst=target,
                bytes_per_iteration=lora_bytes,
                stage=StageId.S2.value,
                layer=slot,
                label=DRAM_LABEL,
            ))

    logger.debug(f"Generated {len(flows)} flows for {placement.window} layer slots")
    return TrafficTrace(flows=tuple(flows))
