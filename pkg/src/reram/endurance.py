import logging
import math

from ..utils.errors import ConfigError
from ..workload.models import Phase, TransformerConfig
from .models import MappingPolicy, ReramTileConfig

logger = logging.getLogger(__name__)

GRANULARITY_ROW = 'row'
GRANULARITY_CELL = 'cell'


def rewrite_count(
    cfg: TransformerConfig,
    mapping_policy: MappingPolicy,
    granularity: str = GRANULARITY_ROW,
    tile: ReramTileConfig = ReramTileConfig(),
) -> int:
    """
    1層・1入力あたりの動的オペランドの ReRAM 書き込み回数

    row: ヘッドごとの Q, K, V, S をクロスバー行単位で書く回数 (4·n·h)。
         FineTune では更新された LoRA 因子 A, B の行 (k·(d + r)) を加える。
    cell: 要素ごとのセル書き込み数 (要素数 × activation_bits / bits_per_cell)
    """
    policy = MappingPolicy(mapping_policy)
    if policy == MappingPolicy.ATLEUS_HETEROGENEOUS:
        return 0

    d, n, h, r, k = cfg.d_model, cfg.n, cfg.num_heads, cfg.r, cfg.k
    fine_tune = cfg.phase == Phase.FINE_TUNE

    if granularity == GRANULARITY_ROW:
        count = 4 * n * h
        if fine_tune:
            count += k * (d + r)
    elif granularity == GRANULARITY_CELL:
        # Q, K, V (n×d) と ヘッドごとの S (n×n)
        elements = 3 * n * d + h * n * n
        if fine_tune:
            elements += k * 2 * d * r
        count = elements * math.ceil(cfg.precision.activation_bits / tile.bits_per_cell)
    else:
        raise ConfigError(f"Invalid 'granularity': {granularity!r} (expected row or cell)", field='granularity')

    logger.debug(f"rewrite_count {cfg.name} ({policy.value}, {granularity}): {count}")
    return count


def endurance_lifetime_passes(rewrites: int, endurance_writes: float) -> float:
    """セル寿命までに処理できる入力パス数 (書き込みなしなら無限大)"""
    if not 1e6 <= endurance_writes <= 1e12:
        raise ConfigError("Invalid 'endurance_writes': must be within 1e6..1e12", field='endurance_writes')
    if rewrites < 0:
        raise ConfigError("Invalid 'rewrites': must be non-negative", field='rewrites')
    if rewrites == 0:
        return math.inf
    return endurance_writes / rewrites
