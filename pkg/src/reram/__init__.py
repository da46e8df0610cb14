"""
ReRAM Package
クロスバー割り当て・量子化・MVMタイミング・書き換え回数
"""
from .models import ReramTileConfig, QuantizedBlock, MappingPolicy
from .crossbar import (
    cells_per_weight,
    weights_per_crossbar,
    crossbars_for_matrix,
    tiles_for_crossbars,
    cores_for_tiles,
    MatrixAllocation,
    allocate_matrix,
    allocation_table,
)
from .quantization import (
    quantize_block,
    dequantize_block,
    dequantize_mvm,
    quantize_matrix,
    crossbar_mvm,
    dequantization_count,
    level_usage,
)
from .timing import mvm_latency, reram_energy, pipeline_depth, cycles_to_seconds
from .endurance import rewrite_count, endurance_lifetime_passes

__all__ = [
    'ReramTileConfig',
    'QuantizedBlock',
    'MappingPolicy',
    'cells_per_weight',
    'weights_per_crossbar',
    'crossbars_for_matrix',
    'tiles_for_crossbars',
    'cores_for_tiles',
    'MatrixAllocation',
    'allocate_matrix',
    'allocation_table',
    'quantize_block',
    'dequantize_block',
    'dequantize_mvm',
    'quantize_matrix',
    'crossbar_mvm',
    'dequantization_count',
    'level_usage',
    'mvm_latency',
    'reram_energy',
    'pipeline_depth',
    'cycles_to_seconds',
    'rewrite_count',
    'endurance_lifetime_passes'
]
