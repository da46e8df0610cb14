from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from ..hardware.models import TsvConfig
from ..utils.errors import ConfigError, require

_DEFAULT_TSV = TsvConfig()


class TopologyKind(str, Enum):
    MESH3D = 'Mesh3D'
    MESH3D_SKIP = 'Mesh3DSkip'
    ATLEUS = 'Atleus'


class NodeKind(str, Enum):
    RERAM = 'ReRAM'
    SYSTOLIC = 'Systolic'


class LinkKind(str, Enum):
    PLANAR = 'Planar'
    TSV_ADJACENT = 'TsvAdjacent'
    TSV_SKIP = 'TsvSkip'


@dataclass(frozen=True)
class NocParams:
    """
    NoC の評価パラメータ

    tsv_energy_per_bit の既定値は ½·C·V² (37 fF, 1 V)
    """
    topology: TopologyKind = TopologyKind.ATLEUS
    router_latency_cycles: int = 3
    clock_hz: float = 1e9
    link_width_bits: int = 128
    planar_energy_per_bit: float = 0.1e-12
    tsv_energy_per_bit: float = _DEFAULT_TSV.energy_per_bit
    router_energy_per_bit_per_port: float = 0.05e-12
    router_area_unit: float = 0.012
    tsv_diameter_um: float = _DEFAULT_TSV.diameter_um
    tsv_pitch_factor: float = _DEFAULT_TSV.pitch_factor
    skip_diameter_factor: float = 3.0
    memory_controller: Tuple[int, int, int] = (0, 0, 0)
    layer_slots: int = 16

    def __post_init__(self):
        try:
            object.__setattr__(self, 'topology', TopologyKind(self.topology))
        except ValueError as e:
            raise ConfigError(f"Invalid 'noc.topology': {str(e)}", field='noc.topology') from e
        object.__setattr__(self, 'memory_controller', tuple(self.memory_controller))
        require(isinstance(self.router_latency_cycles, int) and self.router_latency_cycles >= 0,
                'noc.router_latency_cycles', "must be a non-negative integer")
        require(self.clock_hz > 0, 'noc.clock_hz', "must be positive")
        require(isinstance(self.link_width_bits, int) and self.link_width_bits > 0,
                'noc.link_width_bits', "must be a positive integer")
        require(self.planar_energy_per_bit >= 0, 'noc.planar_energy_per_bit', "must be non-negative")
        require(self.tsv_energy_per_bit >= 0, 'noc.tsv_energy_per_bit', "must be non-negative")
        require(self.router_area_unit >= 0, 'noc.router_area_unit', "must be non-negative")
        require(self.tsv_diameter_um > 0, 'noc.tsv_diameter_um', "must be positive")
        require(self.skip_diameter_factor >= 1, 'noc.skip_diameter_factor', "must be at least 1")
        require(len(self.memory_controller) == 3, 'noc.memory_controller', "must be (tier, x, y)")
        require(self.layer_slots > 0, 'noc.layer_slots', "must be positive")

    @property
    def tsv_pitch_um(self) -> float:
        return self.tsv_pitch_factor * self.tsv_diameter_um

    @property
    def tsv_area_mm2(self) -> float:
        return (self.tsv_pitch_um * 1e-3) ** 2

    @property
    def skip_tsv_area_mm2(self) -> float:
        return (self.tsv_pitch_um * self.skip_diameter_factor * 1e-3) ** 2

    def to_dict(self) -> dict:
        return {
            'topology': self.topology.value,
            'router_latency_cycles': self.router_latency_cycles,
            'clock_hz': self.clock_hz,
            'link_width_bits': self.link_width_bits,
            'planar_energy_per_bit': self.planar_energy_per_bit,
            'tsv_energy_per_bit': self.tsv_energy_per_bit,
            'router_energy_per_bit_per_port': self.router_energy_per_bit_per_port,
            'router_area_unit': self.router_area_unit,
            'tsv_diameter_um': self.tsv_diameter_um,
            'tsv_pitch_factor': self.tsv_pitch_factor,
            'skip_diameter_factor': self.skip_diameter_factor,
            'memory_controller': list(self.memory_controller),
            'layer_slots': self.layer_slots
        }


@dataclass(frozen=True)
class Node:
    id: int
    tier: int
    x: int
    y: int
    kind: NodeKind


@dataclass(frozen=True)
class Link:
    """無向リンク (a < b)"""
    a: int
    b: int
    kind: LinkKind
    width_bits: int
    latency_cycles: int
    energy_per_bit: float

    @property
    def key(self) -> Tuple[int, int]:
        return (self.a, self.b)

    @property
    def is_vertical(self) -> bool:
        return self.kind != LinkKind.PLANAR


@dataclass(frozen=True)
class Topology:
    """
    4 tier × grid² ノードの 3D NoC

    ノード id = tier·grid² + y·grid + x
    """
    kind_tag: TopologyKind
    tiers: int
    grid: int
    nodes: Tuple[Node, ...]
    links: Tuple[Link, ...]
    sfc_tiers: FrozenSet[int] = frozenset()
    graph: nx.Graph = field(default_factory=nx.Graph, compare=False, hash=False, repr=False)

    def node_id(self, tier: int, x: int, y: int) -> int:
        if not (0 <= tier < self.tiers and 0 <= x < self.grid and 0 <= y < self.grid):
            raise ConfigError(f"Node ({tier}, {x}, {y}) is outside the {self.tiers}x{self.grid}x{self.grid} stack",
                              field='node')
        return tier * self.grid * self.grid + y * self.grid + x

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def link(self, a: int, b: int) -> Optional[Link]:
        data = self.graph.get_edge_data(a, b)
        return data['link'] if data else None

    def ports(self, node_id: int) -> int:
        """ルータのポート数 = 次数 + ローカルポート"""
        return self.graph.degree(node_id) + 1

    def links_of_kind(self, kind: LinkKind) -> List[Link]:
        return [link for link in self.links if link.kind == kind]

    @property
    def has_skip(self) -> bool:
        return any(link.kind == LinkKind.TSV_SKIP for link in self.links)

    def to_dict(self) -> dict:
        return {
            'kind': self.kind_tag.value,
            'tiers': self.tiers,
            'grid': self.grid,
            'nodes': len(self.nodes),
            'planar_links': len(self.links_of_kind(LinkKind.PLANAR)),
            'vertical_links': len(self.links_of_kind(LinkKind.TSV_ADJACENT)),
            'skip_links': len(self.links_of_kind(LinkKind.TSV_SKIP))
        }


@dataclass(frozen=True)
class Flow:
    """1イテレーションあたりのノード間転送 (消費側ステージに計上)"""
    src: int
    dst: int
    bytes_per_iteration: int
    stage: str
    layer: int = 0
    label: str = ''

    def __post_init__(self):
        if self.bytes_per_iteration <= 0:
            raise ConfigError(f"Flow {self.label or self.stage} has no bytes", field='flow.bytes')
        if self.src == self.dst:
            raise ConfigError(f"Flow {self.label or self.stage} has src == dst ({self.src})", field='flow.dst')


@dataclass(frozen=True)
class TrafficTrace:
    flows: Tuple[Flow, ...]

    @property
    def total_bytes(self) -> int:
        return sum(flow.bytes_per_iteration for flow in self.flows)

    def bytes_by_label(self) -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for flow in self.flows:
            totals[flow.label] = totals.get(flow.label, 0) + flow.bytes_per_iteration
        return totals


@dataclass
class NocEvaluation:
    """NoC 評価結果"""
    topology: TopologyKind
    per_stage_comm_delay: Dict[str, float]
    total_energy: float
    edp: float
    noc_area_mm2: float
    total_hops: int = 0

    @property
    def total_delay(self) -> float:
        return sum(self.per_stage_comm_delay.values())

    def to_dict(self) -> dict:
        return {
            'topology': self.topology.value,
            'per_stage_comm_delay': dict(self.per_stage_comm_delay),
            'total_energy': self.total_energy,
            'edp': self.edp,
            'noc_area_mm2': self.noc_area_mm2,
            'total_hops': self.total_hops
        }
