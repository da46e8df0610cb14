from abc import ABC, abstractmethod
from collections import Counter
from typing import Dict, List, Optional, Tuple
import logging
import threading

from cachetools import LRUCache, cached
import networkx as nx

from .models import Link, LinkKind, NocParams, Node, NodeKind, Topology, TopologyKind

logger = logging.getLogger(__name__)

SYSTOLIC_TIER = 0


def serpentine_order(grid: int) -> List[Tuple[int, int]]:
    """
    行方向の蛇行順 (boustrophedon) で grid×grid の (x, y) を列挙
    """
    order = []
    for y in range(grid):
        xs = range(grid) if y % 2 == 0 else range(grid - 1, -1, -1)
        order.extend((x, y) for x in xs)
    return order


class BaseTopologyBuilder(ABC):
    """トポロジ生成の基底クラス"""

    kind: TopologyKind
    default_skip = False

    def __init__(self, params: NocParams, tiers: int = 4, grid: int = 4, with_skip: Optional[bool] = None):
        self.params = params
        self.tiers = tiers
        self.grid = grid
        self.with_skip = self.default_skip if with_skip is None else with_skip
        self.logger = logging.getLogger(__name__)

    @abstractmethod
    def planar_edges(self, tier: int) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
        """
        tier 内の平面リンク ((x, y), (x, y)) を返す抽象メソッド
        """
        pass

    def sfc_tiers(self) -> frozenset:
        return frozenset()

    def _node_id(self, tier: int, x: int, y: int) -> int:
        return tier * self.grid * self.grid + y * self.grid + x

    def _link(self, a: int, b: int, kind: LinkKind) -> Link:
        if kind == LinkKind.PLANAR:
            energy = self.params.planar_energy_per_bit
        elif kind == LinkKind.TSV_ADJACENT:
            energy = self.params.tsv_energy_per_bit
        else:
            # スキップ TSV は跨ぐ tier 数に比例
            energy = self.params.tsv_energy_per_bit * (self.tiers - 1)
        return Link(
            a=min(a, b),
            b=max(a, b),
            kind=kind,
            width_bits=self.params.link_width_bits,
            latency_cycles=1,
            energy_per_bit=energy,
        )

    def build(self) -> Topology:
        nodes = tuple(
            Node(
                id=self._node_id(tier, x, y),
                tier=tier,
                x=x,
                y=y,
                kind=NodeKind.SYSTOLIC if tier == SYSTOLIC_TIER else NodeKind.RERAM,
            )
            for tier in range(self.tiers)
            for y in range(self.grid)
            for x in range(self.grid)
        )

        links: List[Link] = []
        for tier in range(self.tiers):
            for (x1, y1), (x2, y2) in self.planar_edges(tier):
                links.append(self._link(self._node_id(tier, x1, y1), self._node_id(tier, x2, y2), LinkKind.PLANAR))
        for tier in range(self.tiers - 1):
            for y in range(self.grid):
                for x in range(self.grid):
                    links.append(self._link(self._node_id(tier, x, y), self._node_id(tier + 1, x, y),
                                            LinkKind.TSV_ADJACENT))
        if self.with_skip:
            top = self.tiers - 1
            for y in range(self.grid):
                for x in range(self.grid):
                    links.append(self._link(self._node_id(SYSTOLIC_TIER, x, y), self._node_id(top, x, y),
                                            LinkKind.TSV_SKIP))

        graph = nx.Graph()
        for node in nodes:
            graph.add_node(node.id, tier=node.tier, x=node.x, y=node.y, kind=node.kind.value)
        for link in links:
            graph.add_edge(link.a, link.b, link=link, kind=link.kind.value)

        topo = Topology(
            kind_tag=self.kind,
            tiers=self.tiers,
            grid=self.grid,
            nodes=nodes,
            links=tuple(links),
            sfc_tiers=self.sfc_tiers(),
            graph=graph,
        )
        self.logger.debug(f"Built {self.kind.value} (skip={self.with_skip}): {len(links)} links")
        return topo


class Mesh3DBuilder(BaseTopologyBuilder):
    """全 tier が 2D メッシュ、隣接 tier 間を TSV で接続"""

    kind = TopologyKind.MESH3D

    def planar_edges(self, tier: int):
        edges = []
        for y in range(self.grid):
            for x in range(self.grid):
                if x + 1 < self.grid:
                    edges.append(((x, y), (x + 1, y)))
                if y + 1 < self.grid:
                    edges.append(((x, y), (x, y + 1)))
        return edges


class Mesh3DSkipBuilder(Mesh3DBuilder):
    kind = TopologyKind.MESH3D_SKIP
    default_skip = True


class AtleusBuilder(Mesh3DSkipBuilder):
    """
    ReRAM tier は蛇行 SFC のハミルトン路、シストリック tier はメッシュのまま
    """

    kind = TopologyKind.ATLEUS

    def planar_edges(self, tier: int):
        if tier == SYSTOLIC_TIER:
            return super().planar_edges(tier)
        order = serpentine_order(self.grid)
        return list(zip(order, order[1:]))

    def sfc_tiers(self) -> frozenset:
        return frozenset(range(1, self.tiers))


BUILDERS = {
    TopologyKind.MESH3D: Mesh3DBuilder,
    TopologyKind.MESH3D_SKIP: Mesh3DSkipBuilder,
    TopologyKind.ATLEUS: AtleusBuilder,
}


@cached(cache=LRUCache(maxsize=32), lock=threading.RLock())
def build_topology(kind: TopologyKind, with_skip: Optional[bool] = None,
                   params: NocParams = NocParams(), tiers: int = 4, grid: int = 4) -> Topology:
    """
    トポロジを生成 (同じ引数ではキャッシュを返す)

    with_skip=None はトポロジ種別の既定 (Mesh3D 以外はスキップ TSV あり)
    """
    builder = BUILDERS[TopologyKind(kind)](params, tiers=tiers, grid=grid, with_skip=with_skip)
    return builder.build()


def port_histogram(topo: Topology, tiers: Optional[List[int]] = None) -> Dict[int, int]:
    """ポート数 → ルータ数"""
    counts = Counter(
        topo.ports(node.id) for node in topo.nodes
        if tiers is None or node.tier in tiers
    )
    return dict(sorted(counts.items()))


def mean_ports(topo: Topology) -> float:
    return sum(topo.ports(node.id) for node in topo.nodes) / len(topo.nodes)


def tier_subgraph(topo: Topology, tier: int) -> nx.Graph:
    """tier 内の平面リンクのみのグラフ"""
    members = [node.id for node in topo.nodes if node.tier == tier]
    return topo.graph.subgraph(members).copy()


def is_hamiltonian_path(topo: Topology, tier: int) -> bool:
    """tier の平面リンクが全ノードを1度ずつ通る単一路か"""
    sub = tier_subgraph(topo, tier)
    if sub.number_of_nodes() == 0 or not nx.is_connected(sub):
        return False
    degrees = [degree for _, degree in sub.degree()]
    return sub.number_of_edges() == sub.number_of_nodes() - 1 and max(degrees) <= 2


def sfc_positions(topo: Topology, tier: int) -> Dict[int, int]:
    """SFC tier の ノード id → 路上の位置"""
    return {
        topo.node_id(tier, x, y): position
        for position, (x, y) in enumerate(serpentine_order(topo.grid))
    }
