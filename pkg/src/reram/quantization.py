from dataclasses import dataclass, field
from typing import List, Tuple
import logging
import math

import numpy as np

from ..utils.errors import ConfigError
from .crossbar import cells_per_weight
from .models import QuantizedBlock, ReramTileConfig

logger = logging.getLogger(__name__)

POST_MVM = 'post_mvm'
PRE_COMPUTE = 'pre_compute'


def quantize_block(block, bits: int) -> QuantizedBlock:
    """
    対称 absmax 量子化 (偶数丸め)

    Args:
        block: 空でない実数配列
        bits: 量子化ビット数 (2以上)

    Returns:
        QuantizedBlock: ints は [−(2^(b−1)−1), 2^(b−1)−1]
    """
    values = np.asarray(block, dtype=float)
    if values.size == 0:
        raise ConfigError("Cannot quantize an empty block", field='block')
    if not np.all(np.isfinite(values)):
        raise ConfigError("Block contains non-finite values", field='block')
    if bits < 2:
        raise ConfigError(f"Invalid 'bits': need at least 2, got {bits}", field='bits')

    qmax = 2 ** (bits - 1) - 1
    absmax = float(np.max(np.abs(values)))
    if absmax == 0.0:
        return QuantizedBlock(ints=np.zeros(values.shape, dtype=np.int64), scale=1.0, bits=bits)

    # np.rint は偶数丸め
    ints = np.clip(np.rint(values / absmax * qmax), -qmax, qmax).astype(np.int64)
    return QuantizedBlock(ints=ints, scale=absmax / qmax, bits=bits)


def dequantize_block(qblock: QuantizedBlock) -> np.ndarray:
    return qblock.dequantize()


def dequantize_mvm(int_acc, scale: float) -> np.ndarray:
    """
    クロスバー出力 (整数累算 Q·x) をMVM後にスケール1回で逆量子化
    """
    return np.asarray(int_acc, dtype=float) * scale


@dataclass
class CrossbarQuantizedMatrix:
    """クロスバー単位で量子化した重み行列"""
    shape: Tuple[int, int]
    bits: int
    blocks: List[Tuple[slice, slice, QuantizedBlock]] = field(default_factory=list)

    @property
    def scales(self) -> List[float]:
        return [block.scale for _, _, block in self.blocks]


def quantize_matrix(weights, bits: int, cfg: ReramTileConfig) -> CrossbarQuantizedMatrix:
    """
    重み行列をクロスバー領域ごとに独立に量子化

    1クロスバーは xbar_rows 行 × (xbar_cols / cells_per_weight) 列の重みを保持する
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2:
        raise ConfigError("Weights must be a 2-D matrix", field='weights')
    cols_per_xbar = cfg.xbar_cols // cells_per_weight(bits, cfg)
    rows, cols = weights.shape
    matrix = CrossbarQuantizedMatrix(shape=(rows, cols), bits=bits)
    for row_start in range(0, rows, cfg.xbar_rows):
        row_slice = slice(row_start, min(rows, row_start + cfg.xbar_rows))
        for col_start in range(0, cols, cols_per_xbar):
            col_slice = slice(col_start, min(cols, col_start + cols_per_xbar))
            matrix.blocks.append((row_slice, col_slice, quantize_block(weights[row_slice, col_slice], bits)))
    return matrix


def crossbar_mvm(x, matrix: CrossbarQuantizedMatrix) -> np.ndarray:
    """
    xᵀ·W を量子化クロスバーで計算

    各クロスバーの整数累算を先に逆量子化してから実数で集約する
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (matrix.shape[0],):
        raise ConfigError(f"Input length {x.shape} does not match {matrix.shape[0]} rows", field='x')
    out = np.zeros(matrix.shape[1])
    for row_slice, col_slice, block in matrix.blocks:
        int_acc = x[row_slice] @ block.ints
        out[col_slice] += dequantize_mvm(int_acc, block.scale)
    return out


def dequantization_count(rows: int, cols: int, weight_bits: int, cfg: ReramTileConfig, scheme: str = POST_MVM) -> int:
    """
    1回のMVMで必要な逆量子化演算数

    post_mvm: クロスバー出力ごとに1回 / pre_compute: 重み要素ごとに1回
    """
    cells_per_weight(weight_bits, cfg)
    if scheme == POST_MVM:
        return math.ceil(rows / cfg.xbar_rows) * cols
    if scheme == PRE_COMPUTE:
        return rows * cols
    raise ConfigError(f"Unknown dequantization scheme '{scheme}'", field='scheme')


def level_usage(qblock: QuantizedBlock) -> float:
    """使用されている整数レベルの割合"""
    levels = 2 ** qblock.bits - 1
    return len(np.unique(qblock.ints)) / levels
