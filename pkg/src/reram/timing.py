import logging

from ..utils.errors import ConfigError
from .crossbar import cells_per_weight
from .models import ReramTileConfig

logger = logging.getLogger(__name__)


def pipeline_depth(cfg: ReramTileConfig, dequant_enabled: bool) -> int:
    """クロスバー読出し → ADC → S&A (→ 逆量子化 S&A) → 出力レジスタ"""
    return cfg.pipeline_depth + (1 if dequant_enabled else 0)


def mvm_latency(
    job_rows: int,
    job_cols: int,
    input_bits: int,
    weight_bits: int,
    cfg: ReramTileConfig,
    dequant_enabled: bool,
    vectors: int = 1,
) -> int:
    """
    ビットシリアル入力での MVM レイテンシ (ReRAM クロックのサイクル数)

    Args:
        job_rows, job_cols: 重み行列の形状 (配置可否は呼び出し側で確認済み)
        input_bits: 入力ビット数 (1bit DAC なので1ビット1サイクル)
        weight_bits: 重みビット数
        cfg: タイル構成
        dequant_enabled: MVM後の逆量子化段を通すか
        vectors: 連続して流す入力ベクトル数

    Returns:
        int: vectors·input_bits + パイプライン段数
    """
    if input_bits <= 0:
        raise ConfigError(f"Invalid 'input_bits': must be positive, got {input_bits}", field='input_bits')
    if job_rows <= 0 or job_cols <= 0:
        raise ConfigError(f"Invalid job shape {job_rows}x{job_cols}", field='job')
    if vectors < 1:
        raise ConfigError(f"Invalid 'vectors': must be at least 1, got {vectors}", field='vectors')
    cells_per_weight(weight_bits, cfg)
    return vectors * input_bits + pipeline_depth(cfg, dequant_enabled)


def cycles_to_seconds(cycles: int, cfg: ReramTileConfig) -> float:
    return cycles / cfg.clock_hz


def reram_energy(active_tiles: int, duration_s: float, cfg: ReramTileConfig, dequant_enabled: bool) -> float:
    """アクティブタイル数 × タイル電力 × 時間 (逆量子化時は電力オーバーヘッドを加算)"""
    factor = 1.0 + (cfg.dequant_power_overhead if dequant_enabled else 0.0)
    return active_tiles * cfg.tile_power_w * factor * duration_s
