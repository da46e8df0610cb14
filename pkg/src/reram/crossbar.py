from dataclasses import dataclass
from typing import List
import logging
import math

from ..utils.errors import ConfigError
from ..workload.models import TransformerConfig
from .models import ReramTileConfig

logger = logging.getLogger(__name__)


def cells_per_weight(weight_bits: int, cfg: ReramTileConfig) -> int:
    if weight_bits <= 0 or weight_bits % cfg.bits_per_cell != 0:
        raise ConfigError(
            f"Invalid 'weight_bits': {weight_bits} is not a multiple of bits_per_cell={cfg.bits_per_cell}",
            field='weight_bits',
        )
    return weight_bits // cfg.bits_per_cell


def weights_per_crossbar(weight_bits: int, cfg: ReramTileConfig) -> int:
    return cfg.xbar_rows * (cfg.xbar_cols // cells_per_weight(weight_bits, cfg))


def crossbars_for_matrix(rows: int, cols: int, weight_bits: int, cfg: ReramTileConfig) -> int:
    """
    rows×cols の重み行列に必要なクロスバー数
    """
    per_weight = cells_per_weight(weight_bits, cfg)
    return math.ceil(rows / cfg.xbar_rows) * math.ceil(cols * per_weight / cfg.xbar_cols)


def tiles_for_crossbars(crossbars: int, cfg: ReramTileConfig) -> int:
    return math.ceil(crossbars / cfg.xbars_per_tile)


def cores_for_tiles(tiles: int, cfg: ReramTileConfig) -> int:
    return math.ceil(tiles / cfg.tiles_per_core)


@dataclass(frozen=True)
class MatrixAllocation:
    """重み行列1つのクロスバー割り当て"""
    matrix: str
    rows: int
    cols: int
    weight_bits: int
    crossbars: int
    tiles: int
    cores: int

    def to_dict(self) -> dict:
        return {
            'matrix': self.matrix,
            'rows': self.rows,
            'cols': self.cols,
            'weight_bits': self.weight_bits,
            'crossbars': self.crossbars,
            'tiles': self.tiles,
            'cores': self.cores
        }


def allocate_matrix(name: str, rows: int, cols: int, weight_bits: int, cfg: ReramTileConfig) -> MatrixAllocation:
    crossbars = crossbars_for_matrix(rows, cols, weight_bits, cfg)
    tiles = tiles_for_crossbars(crossbars, cfg)
    return MatrixAllocation(
        matrix=name,
        rows=rows,
        cols=cols,
        weight_bits=weight_bits,
        crossbars=crossbars,
        tiles=tiles,
        cores=cores_for_tiles(tiles, cfg),
    )


def allocation_table(workload: TransformerConfig, cfg: ReramTileConfig) -> List[MatrixAllocation]:
    """
    1層の静的重み行列ごとの割り当て表 (精度プランを反映)
    """
    d, d_ff = workload.d_model, workload.d_ff
    mha_bits = workload.precision.mha_bits
    ff_bits = workload.precision.ff_bits
    table = [allocate_matrix(name, d, d, mha_bits, cfg) for name in ('W_Q', 'W_K', 'W_V', 'W_O')]
    table.append(allocate_matrix('W_FF1', d, d_ff, ff_bits, cfg))
    table.append(allocate_matrix('W_FF2', d_ff, d, ff_bits, cfg))
    return table
