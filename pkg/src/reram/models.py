from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..utils.errors import require


class MappingPolicy(str, Enum):
    ALL_ON_RERAM = 'AllOnReram'
    ATLEUS_HETEROGENEOUS = 'AtleusHeterogeneous'


@dataclass(frozen=True)
class ReramTileConfig:
    """
    ReRAM タイル構成 (既定値はリファレンス構成: 128×128 クロスバー, 2 bit/cell)
    """
    xbar_rows: int = 128
    xbar_cols: int = 128
    bits_per_cell: int = 2
    xbars_per_tile: int = 96
    tiles_per_core: int = 16
    adc_bits: int = 8
    adcs_per_tile: int = 96
    dac_bits: int = 1
    tile_power_w: float = 0.345
    tile_area_mm2: float = 0.37
    scale_register_bytes: int = 192
    sa_units: int = 48
    dequant_power_overhead: float = 0.015
    dequant_area_overhead: float = 0.0215
    clock_hz: float = 12.5e6
    pipeline_depth: int = 4
    weight_duplication: bool = False
    stage_core_budget: int = 2
    endurance_writes: float = 1e8

    def __post_init__(self):
        for key in ('xbar_rows', 'xbar_cols', 'bits_per_cell', 'xbars_per_tile', 'tiles_per_core',
                    'adc_bits', 'dac_bits', 'pipeline_depth', 'stage_core_budget'):
            value = getattr(self, key)
            require(isinstance(value, int) and value > 0, f"reram.{key}", f"must be a positive integer, got {value!r}")
        require(self.tile_power_w >= 0, 'reram.tile_power_w', "must be non-negative")
        require(self.clock_hz > 0, 'reram.clock_hz', "must be positive")
        require(0 <= self.dequant_power_overhead < 1, 'reram.dequant_power_overhead', "must be in [0, 1)")
        require(0 <= self.dequant_area_overhead < 1, 'reram.dequant_area_overhead', "must be in [0, 1)")
        require(1e6 <= self.endurance_writes <= 1e12, 'reram.endurance_writes', "must be within 1e6..1e12")

    @property
    def xbars_per_core(self) -> int:
        return self.xbars_per_tile * self.tiles_per_core

    @property
    def cells_per_xbar(self) -> int:
        return self.xbar_rows * self.xbar_cols

    def tile_area_with_dequant(self) -> float:
        return self.tile_area_mm2 * (1 + self.dequant_area_overhead)

    def to_dict(self) -> dict:
        return {
            'xbar_rows': self.xbar_rows,
            'xbar_cols': self.xbar_cols,
            'bits_per_cell': self.bits_per_cell,
            'xbars_per_tile': self.xbars_per_tile,
            'tiles_per_core': self.tiles_per_core,
            'adc_bits': self.adc_bits,
            'adcs_per_tile': self.adcs_per_tile,
            'dac_bits': self.dac_bits,
            'tile_power_w': self.tile_power_w,
            'tile_area_mm2': self.tile_area_mm2,
            'scale_register_bytes': self.scale_register_bytes,
            'sa_units': self.sa_units,
            'dequant_power_overhead': self.dequant_power_overhead,
            'dequant_area_overhead': self.dequant_area_overhead,
            'clock_hz': self.clock_hz,
            'pipeline_depth': self.pipeline_depth,
            'weight_duplication': self.weight_duplication,
            'stage_core_budget': self.stage_core_budget,
            'endurance_writes': self.endurance_writes
        }


@dataclass
class QuantizedBlock:
    """クロスバー1つ分の量子化ブロック (スケール1つ)"""
    ints: np.ndarray
    scale: float
    bits: int

    def dequantize(self) -> np.ndarray:
        return self.ints.astype(float) * self.scale
