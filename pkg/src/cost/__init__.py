"""
Cost Package
ダイ / 3D-IC 製造コストモデル
"""
from .models import CostParams, DieSpec, EQ7_LITERAL, EQ7_TEXTBOOK
from .yield_model import (
    die_area,
    dies_per_wafer,
    die_yield,
    die_cost,
    stack_cost_3d,
    normalized_cost,
    compare_2d_3d,
    CostComparison,
    tier_die_specs,
    StackCost,
    stack_cost_for_topology,
    cost_summary,
)
from .loader import load_cost_params

__all__ = [
    'CostParams',
    'DieSpec',
    'EQ7_LITERAL',
    'EQ7_TEXTBOOK',
    'die_area',
    'dies_per_wafer',
    'die_yield',
    'die_cost',
    'stack_cost_3d',
    'normalized_cost',
    'compare_2d_3d',
    'CostComparison',
    'tier_die_specs',
    'StackCost',
    'stack_cost_for_topology',
    'cost_summary',
    'load_cost_params'
]
