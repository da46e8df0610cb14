from dataclasses import dataclass, field
from typing import Dict, List, Sequence
import logging
import math

from ..hardware.models import HardwareSpec
from ..noc.evaluation import router_area, tier_tsv_counts
from ..noc.models import NocParams, Topology
from ..utils.errors import ConfigError
from .models import EQ7_LITERAL, CostParams, DieSpec

logger = logging.getLogger(__name__)

MM2_PER_CM2 = 100.0


def die_area(spec: DieSpec) -> float:
    """A_die = A_core + A_router + X_TSV·A_TSV"""
    return (
        spec.core_area_mm2
        + spec.router_area_mm2
        + spec.tsv_count * spec.tsv_area_each_mm2
        + spec.skip_tsv_count * spec.skip_tsv_area_each_mm2
    )


def wafer_area(p: CostParams) -> float:
    return math.pi * (p.wafer_diameter_mm / 2) ** 2


def dies_per_wafer(area_mm2: float, p: CostParams) -> float:
    """
    ウェハあたりのダイ数

    literal: π(ϕ/2)²/A − πϕ/(√2·A)
    textbook: π(ϕ/2)²/A − πϕ/√(2·A)
    """
    if area_mm2 <= 0:
        raise ConfigError(f"Invalid 'die_area': must be positive, got {area_mm2}", field='die_area')
    if area_mm2 >= wafer_area(p):
        raise ConfigError(f"Invalid 'die_area': {area_mm2} mm2 does not fit on the wafer", field='die_area')

    gross = wafer_area(p) / area_mm2
    if p.eq7_variant == EQ7_LITERAL:
        edge = math.pi * p.wafer_diameter_mm / (math.sqrt(2) * area_mm2)
    else:
        edge = math.pi * p.wafer_diameter_mm / math.sqrt(2 * area_mm2)
    count = gross - edge
    if count <= 0:
        raise ConfigError(f"Invalid 'die_area': no whole die fits ({area_mm2} mm2)", field='die_area')
    return count


def die_yield(area_mm2: float, p: CostParams) -> float:
    """負の二項分布モデル Y = Y_wafer·(1 + A·D0/α)^(−α)"""
    if area_mm2 <= 0:
        raise ConfigError(f"Invalid 'die_area': must be positive, got {area_mm2}", field='die_area')
    area_cm2 = area_mm2 / MM2_PER_CM2
    return p.wafer_yield * (1 + area_cm2 * p.defect_density_per_cm2 / p.clustering_alpha) ** (-p.clustering_alpha)


def die_cost(area_mm2: float, p: CostParams) -> float:
    return (p.wafer_cost / dies_per_wafer(area_mm2, p)) / die_yield(area_mm2, p)


def stack_cost_3d(tier_costs: Sequence[float], p: CostParams) -> float:
    """C_3D = ΣC_i / (Y_stacking^(n−1)·Y_TSV)"""
    if not tier_costs:
        raise ConfigError("3D stack needs at least one tier", field='tier_costs')
    n = len(tier_costs)
    return sum(tier_costs) / (p.stacking_yield ** (n - 1) * p.tsv_yield)


def normalized_cost(die_a: DieSpec, die_b: DieSpec, p: CostParams) -> float:
    """B を基準とした A のダイコスト (Y_B·N_B)/(Y_A·N_A)"""
    area_a, area_b = die_area(die_a), die_area(die_b)
    return (die_yield(area_b, p) * dies_per_wafer(area_b, p)) / (die_yield(area_a, p) * dies_per_wafer(area_a, p))


@dataclass
class CostComparison:
    """2D 単一ダイと 3D スタックの比較"""
    area_2d_mm2: float
    tier_area_mm2: float
    tiers: int
    cost_2d: float
    cost_3d: float
    include_stacking: bool = False
    eq7_variant: str = EQ7_LITERAL

    @property
    def ratio(self) -> float:
        return self.cost_2d / self.cost_3d

    def to_dict(self) -> dict:
        return {
            'area_2d_mm2': self.area_2d_mm2,
            'tier_area_mm2': self.tier_area_mm2,
            'tiers': self.tiers,
            'cost_2d': self.cost_2d,
            'cost_3d': self.cost_3d,
            'ratio': self.ratio,
            'include_stacking': self.include_stacking,
            'eq7_variant': self.eq7_variant
        }


def compare_2d_3d(p: CostParams, tier_area_mm2: float = 100.0, tiers: int = 4,
                  include_stacking: bool = False) -> CostComparison:
    """
    同じ総面積の 2D ダイと tiers 枚の 3D スタックのコスト比較

    include_stacking=False では積層・TSV 歩留まりを除いたダイコストの和で比べる
    """
    if tiers < 1:
        raise ConfigError("Invalid 'tiers': must be at least 1", field='tiers')
    tier_cost = die_cost(tier_area_mm2, p)
    costs = [tier_cost] * tiers
    cost_3d = stack_cost_3d(costs, p) if include_stacking else sum(costs)
    comparison = CostComparison(
        area_2d_mm2=tier_area_mm2 * tiers,
        tier_area_mm2=tier_area_mm2,
        tiers=tiers,
        cost_2d=die_cost(tier_area_mm2 * tiers, p),
        cost_3d=cost_3d,
        include_stacking=include_stacking,
        eq7_variant=p.eq7_variant,
    )
    logger.debug(f"2D/3D cost ratio ({p.eq7_variant}): {comparison.ratio:.6g}")
    return comparison


def tier_die_specs(topo: Topology, noc_params: NocParams, hw: HardwareSpec) -> List[DieSpec]:
    """NoC トポロジを反映した tier ごとのダイ構成"""
    tsv_counts = tier_tsv_counts(topo)
    return [
        DieSpec(
            core_area_mm2=hw.tier_area_mm2,
            router_area_mm2=router_area(topo, noc_params, tier),
            tsv_count=tsv_counts[tier]['adjacent'],
            tsv_area_each_mm2=noc_params.tsv_area_mm2,
            skip_tsv_count=tsv_counts[tier]['skip'],
            skip_tsv_area_each_mm2=noc_params.skip_tsv_area_mm2,
        )
        for tier in range(topo.tiers)
    ]


@dataclass
class StackCost:
    topology: str
    dies: List[DieSpec] = field(default_factory=list)
    tier_costs: List[float] = field(default_factory=list)
    cost_3d: float = 0.0

    def to_dict(self) -> dict:
        return {
            'topology': self.topology,
            'dies': [d.to_dict() for d in self.dies],
            'tier_costs': list(self.tier_costs),
            'cost_3d': self.cost_3d
        }


def stack_cost_for_topology(topo: Topology, noc_params: NocParams, hw: HardwareSpec, p: CostParams) -> StackCost:
    dies = tier_die_specs(topo, noc_params, hw)
    tier_costs = [die_cost(die_area(die), p) for die in dies]
    return StackCost(
        topology=topo.kind_tag.value,
        dies=dies,
        tier_costs=tier_costs,
        cost_3d=stack_cost_3d(tier_costs, p),
    )


def cost_summary(stacks: Dict[str, StackCost], baseline: str) -> Dict[str, float]:
    """基準トポロジに対する 3D コスト比"""
    if baseline not in stacks:
        raise ConfigError(f"Baseline topology '{baseline}' was not evaluated", field='baseline')
    base = stacks[baseline].cost_3d
    return {name: stack.cost_3d / base for name, stack in stacks.items()}
