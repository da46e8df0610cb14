from typing import Dict, List, Tuple
import logging
import operator
import threading

from cachetools import LRUCache, cached, cachedmethod

from ..utils.errors import RoutingError
from .models import Link, Node, Topology
from .topology import SYSTOLIC_TIER, serpentine_order

logger = logging.getLogger(__name__)


def _chain(start: int, end: int) -> List[int]:
    """start の次から end までの tier 列"""
    step = 1 if end >= start else -1
    return list(range(start + step, end + step, step)) if start != end else []


class Router:
    """
    決定的な最短経路ルーティング

    垂直移動を先に行い (ホップ数が厳密に減るときだけスキップ TSV を使う)、
    その後 tier 内を移動する (メッシュ tier は XY、SFC tier は路に沿って)。
    """

    def __init__(self, topo: Topology):
        self.topo = topo
        self._cache: LRUCache = LRUCache(maxsize=8192)
        self._lock = threading.RLock()
        order = serpentine_order(topo.grid)
        self._sfc_order: Dict[int, List[int]] = {
            tier: [topo.node_id(tier, x, y) for x, y in order] for tier in topo.sfc_tiers
        }
        self._sfc_position: Dict[int, Dict[int, int]] = {
            tier: {node_id: pos for pos, node_id in enumerate(ids)} for tier, ids in self._sfc_order.items()
        }

    def _vertical_tiers(self, node: Node, dst_tier: int) -> List[int]:
        direct = _chain(node.tier, dst_tier)
        top = self.topo.tiers - 1
        if self.topo.link(self.topo.node_id(SYSTOLIC_TIER, node.x, node.y),
                          self.topo.node_id(top, node.x, node.y)) is None:
            return direct

        candidates = [
            _chain(node.tier, SYSTOLIC_TIER) + [top] + _chain(top, dst_tier),
            _chain(node.tier, top) + [SYSTOLIC_TIER] + _chain(SYSTOLIC_TIER, dst_tier),
        ]
        best = min(candidates, key=len)
        return best if len(best) < len(direct) else direct

    def _planar(self, tier: int, src: Tuple[int, int], dst: Tuple[int, int]) -> List[int]:
        if tier in self._sfc_order:
            ids = self._sfc_order[tier]
            start = self._sfc_position[tier][self.topo.node_id(tier, *src)]
            end = self._sfc_position[tier][self.topo.node_id(tier, *dst)]
            step = 1 if end >= start else -1
            return [ids[pos] for pos in range(start + step, end + step, step)] if start != end else []

        (x, y), (dx, dy) = src, dst
        path = []
        while x != dx:
            x += 1 if dx > x else -1
            path.append(self.topo.node_id(tier, x, y))
        while y != dy:
            y += 1 if dy > y else -1
            path.append(self.topo.node_id(tier, x, y))
        return path

    def node_path(self, src: int, dst: int) -> List[int]:
        s, d = self.topo.node(src), self.topo.node(dst)
        path = [src]
        path.extend(self.topo.node_id(tier, s.x, s.y) for tier in self._vertical_tiers(s, d.tier))
        path.extend(self._planar(d.tier, (s.x, s.y), (d.x, d.y)))
        return path

    @cachedmethod(operator.attrgetter('_cache'), lock=operator.attrgetter('_lock'))
    def route(self, src: int, dst: int) -> Tuple[Link, ...]:
        if src == dst:
            return ()
        path = self.node_path(src, dst)
        links = []
        for a, b in zip(path, path[1:]):
            link = self.topo.link(a, b)
            if link is None:
                logger.error(f"No link between {a} and {b} on {self.topo.kind_tag.value}")
                raise RoutingError(f"Route {src}->{dst} needs missing link {a}-{b} on {self.topo.kind_tag.value}")
            links.append(link)
        return tuple(links)


@cached(cache=LRUCache(maxsize=16), lock=threading.RLock())
def get_router(topo: Topology) -> Router:
    return Router(topo)


def route(topo: Topology, src: int, dst: int) -> Tuple[Link, ...]:
    """src から dst への経路 (リンク列)。src == dst なら空"""
    for node_id in (src, dst):
        if not 0 <= node_id < len(topo.nodes):
            raise RoutingError(f"Node {node_id} is not in {topo.kind_tag.value}")
    return get_router(topo).route(src, dst)


def hop_count(topo: Topology, src: int, dst: int) -> int:
    return len(route(topo, src, dst))
