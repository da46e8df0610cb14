"""
NoC Package
3D NoC トポロジの生成・ルーティング・評価
"""
from .models import (
    TopologyKind,
    NodeKind,
    LinkKind,
    NocParams,
    Node,
    Link,
    Topology,
    Flow,
    TrafficTrace,
    NocEvaluation,
)
from .topology import build_topology, port_histogram, mean_ports, serpentine_order, is_hamiltonian_path
from .routing import Router, route, hop_count
from .traffic import Placement, vertical_placement, gen_traffic
from .evaluation import evaluate_noc, noc_area, router_area, tsv_area, tier_tsv_counts, stage_comm_model
from .loader import load_noc_params

__all__ = [
    'TopologyKind',
    'NodeKind',
    'LinkKind',
    'NocParams',
    'Node',
    'Link',
    'Topology',
    'Flow',
    'TrafficTrace',
    'NocEvaluation',
    'build_topology',
    'port_histogram',
    'mean_ports',
    'serpentine_order',
    'is_hamiltonian_path',
    'Router',
    'route',
    'hop_count',
    'Placement',
    'vertical_placement',
    'gen_traffic',
    'evaluate_noc',
    'noc_area',
    'router_area',
    'tsv_area',
    'tier_tsv_counts',
    'stage_comm_model',
    'load_noc_params'
]
