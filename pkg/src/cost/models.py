from dataclasses import dataclass
from typing import Dict

from ..utils.errors import ConfigError, require

EQ7_LITERAL = 'literal'
EQ7_TEXTBOOK = 'textbook'


@dataclass(frozen=True)
class CostParams:
    """
    ダイコストモデルのパラメータ

    wafer_diameter_mm は 300 mm、defect_density は cm² あたり
    """
    wafer_cost: float = 1.0
    wafer_diameter_mm: float = 300.0
    defect_density_per_cm2: float = 0.2
    clustering_alpha: float = 3.0
    wafer_yield: float = 1.0
    stacking_yield: float = 0.99
    tsv_yield: float = 0.99
    eq7_variant: str = EQ7_LITERAL

    def __post_init__(self):
        require(self.wafer_cost > 0, 'cost.wafer_cost', "must be positive")
        require(self.wafer_diameter_mm > 0, 'cost.wafer_diameter_mm', "must be positive")
        require(self.defect_density_per_cm2 >= 0, 'cost.defect_density_per_cm2', "must be non-negative")
        require(self.clustering_alpha > 0, 'cost.clustering_alpha', "must be positive")
        for key in ('wafer_yield', 'stacking_yield', 'tsv_yield'):
            value = getattr(self, key)
            require(0 < value <= 1, f"cost.{key}", f"must be in (0, 1], got {value}")
        if self.eq7_variant not in (EQ7_LITERAL, EQ7_TEXTBOOK):
            raise ConfigError(
                f"Invalid 'cost.eq7_variant': {self.eq7_variant!r} (expected literal or textbook)",
                field='cost.eq7_variant',
            )

    def to_dict(self) -> dict:
        return {
            'wafer_cost': self.wafer_cost,
            'wafer_diameter_mm': self.wafer_diameter_mm,
            'defect_density_per_cm2': self.defect_density_per_cm2,
            'clustering_alpha': self.clustering_alpha,
            'wafer_yield': self.wafer_yield,
            'stacking_yield': self.stacking_yield,
            'tsv_yield': self.tsv_yield,
            'eq7_variant': self.eq7_variant
        }


@dataclass(frozen=True)
class DieSpec:
    """ダイ面積の内訳 (TSV はメタル配線を塞ぐ面積として加算)"""
    core_area_mm2: float
    router_area_mm2: float = 0.0
    tsv_count: int = 0
    tsv_area_each_mm2: float = 0.0
    skip_tsv_count: int = 0
    skip_tsv_area_each_mm2: float = 0.0

    def __post_init__(self):
        for key in ('core_area_mm2', 'router_area_mm2', 'tsv_count', 'tsv_area_each_mm2',
                    'skip_tsv_count', 'skip_tsv_area_each_mm2'):
            require(getattr(self, key) >= 0, f"die.{key}", "must be non-negative")

    def to_dict(self) -> Dict[str, float]:
        return {
            'core_area_mm2': self.core_area_mm2,
            'router_area_mm2': self.router_area_mm2,
            'tsv_count': self.tsv_count,
            'tsv_area_each_mm2': self.tsv_area_each_mm2,
            'skip_tsv_count': self.skip_tsv_count,
            'skip_tsv_area_each_mm2': self.skip_tsv_area_each_mm2
        }
