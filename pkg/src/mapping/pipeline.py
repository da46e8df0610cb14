from dataclasses import replace
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple
import logging
import math

from ..hardware.models import HardwareSpec
from ..reram.crossbar import cores_for_tiles, crossbars_for_matrix, tiles_for_crossbars
from ..reram.timing import cycles_to_seconds, mvm_latency
from ..systolic.cycles import kernel_delay
from ..utils.errors import ConfigError, InfeasibleStageError
from ..workload.kernels import layer_kernels
from ..workload.models import KernelId, KernelInstance, TransformerConfig
from .models import STAGE_LAYOUT, PipelineSchedule, PipelineTiming, Resource, Stage, StageId

logger = logging.getLogger(__name__)

CommModel = Callable[[PipelineSchedule, TransformerConfig], Mapping[StageId, float]]

FULL_PRECISION_BITS = 16


def kernel_weight_matrices(kernel: KernelInstance, cfg: TransformerConfig) -> List[Tuple[str, int, int, int]]:
    """
    静的重みカーネルがクロスバーに保持する行列 (名前, 行, 列, ビット数)
    """
    d, d_ff = cfg.d_model, cfg.d_ff
    mha_bits, ff_bits = cfg.precision.mha_bits, cfg.precision.ff_bits
    if kernel.id == KernelId.MHA1:
        return [(name, d, d, mha_bits) for name in ('W_Q', 'W_K', 'W_V')]
    if kernel.id == KernelId.MHA4:
        return [('W_O', d, d, mha_bits)]
    if kernel.id == KernelId.FF1:
        return [('W_FF1', d, d_ff, ff_bits)]
    if kernel.id == KernelId.FF2:
        return [('W_FF2', d_ff, d, ff_bits)]
    return []


def dram_transfer_time(num_bytes: int, hw: HardwareSpec) -> float:
    """DRAM からの転送時間 (実効帯域 = 最大帯域 × 効率)"""
    if num_bytes < 0:
        raise ConfigError(f"Invalid 'bytes': must be non-negative, got {num_bytes}", field='bytes')
    return num_bytes / hw.dram.effective_bandwidth


def overlapped_delay(compute: float, load: float, overlap: float) -> float:
    """ロードは overlap·compute まで計算に隠れる"""
    return compute + load - min(load, overlap * compute)


def _reram_stage(stage_id: StageId, kernels: Sequence[KernelInstance], cfg: TransformerConfig,
                 hw: HardwareSpec) -> Stage:
    tile = hw.reram
    matrices = [m for kernel in kernels for m in kernel_weight_matrices(kernel, cfg)]
    crossbars = sum(crossbars_for_matrix(rows, cols, bits, tile) for _, rows, cols, bits in matrices)
    tiles = tiles_for_crossbars(crossbars, tile)
    budget = tile.stage_core_budget * tile.xbars_per_core
    if crossbars > budget:
        logger.warning(
            f"Stage {stage_id.value} needs {crossbars} crossbars, more than the "
            f"{tile.stage_core_budget}-core budget ({budget})"
        )

    duplication = 1
    if tile.weight_duplication and crossbars:
        duplication = max(1, budget // crossbars)
    vectors = math.ceil(cfg.n / duplication)

    mvm_cycles = max(
        (mvm_latency(rows, cols, cfg.precision.activation_bits, bits, tile,
                     dequant_enabled=bits < FULL_PRECISION_BITS, vectors=vectors)
         for _, rows, cols, bits in matrices),
        default=0,
    )
    # ReRAM ステージ上の非線形演算 (L2) は要素演算モデルで加算
    elementwise = sum(kernel_delay(k, hw.systolic) for k in kernels if not k.is_matmul)
    compute = cycles_to_seconds(mvm_cycles, tile) + elementwise

    logger.debug(
        f"Stage {stage_id.value}: {crossbars} crossbars, {tiles} tiles, duplication {duplication}, "
        f"compute {compute:.6g} s"
    )
    return Stage(
        id=stage_id,
        resource=Resource.RERAM,
        kernels=tuple(kernels),
        compute_delay=compute,
        crossbars=crossbars,
        tiles=tiles,
        cores=cores_for_tiles(tiles, tile),
        dequant_enabled=any(bits < FULL_PRECISION_BITS for _, _, _, bits in matrices),
        duplication=duplication,
    )


def _check_feasibility(kernels: Sequence[KernelInstance], hw: HardwareSpec, reram_bound: float):
    bound = (1.0 + hw.systolic_slack) * reram_bound
    for kernel in kernels:
        delay = kernel_delay(kernel, hw.systolic)
        if delay > bound:
            logger.error(
                f"Systolic array {hw.systolic.shape_label} is undersized: {kernel.label} "
                f"takes {delay:.6g} s against a bound of {bound:.6g} s"
            )
            raise InfeasibleStageError(StageId.S2.value, kernel.label, delay, bound)


def stage_kernels(cfg: TransformerConfig) -> Dict[StageId, List[KernelInstance]]:
    """1層分のカーネルをステージごとに分ける"""
    kernels = layer_kernels(cfg, 0)
    return {
        stage_id: [k for k in kernels if k.id in ids] for stage_id, (_, ids) in STAGE_LAYOUT.items()
    }


def build_reram_stages(cfg: TransformerConfig, hw: HardwareSpec) -> Dict[StageId, Stage]:
    grouped = stage_kernels(cfg)
    return {
        stage_id: _reram_stage(stage_id, grouped[stage_id], cfg, hw)
        for stage_id, (resource, _) in STAGE_LAYOUT.items()
        if resource == Resource.RERAM
    }


def build_pipeline(cfg: TransformerConfig, hw: HardwareSpec,
                   comm_model: Optional[CommModel] = None) -> PipelineSchedule:
    """
    1層分のカーネルを固定の4段パイプラインに割り当てて遅延を求める

    Args:
        cfg: ワークロード
        hw: ハードウェア構成
        comm_model: スケジュールからステージ別通信遅延を返す関数 (NoC評価)

    Returns:
        PipelineSchedule: 通信遅延は comm_model がなければ 0
    """
    grouped = stage_kernels(cfg)
    reram_stages = build_reram_stages(cfg, hw)
    slowest_reram = max(stage.compute_delay for stage in reram_stages.values())

    systolic_kernels = grouped[StageId.S2]
    _check_feasibility(systolic_kernels, hw, slowest_reram)
    compute = sum(kernel_delay(k, hw.systolic) for k in systolic_kernels)
    load = dram_transfer_time(cfg.lora_param_bytes, hw)
    s2 = Stage(
        id=StageId.S2,
        resource=Resource.SYSTOLIC,
        kernels=tuple(systolic_kernels),
        compute_delay=overlapped_delay(compute, load, hw.lora_load_overlap),
    )

    stages = (reram_stages[StageId.S1], s2, reram_stages[StageId.S3], reram_stages[StageId.S4])
    schedule = PipelineSchedule(
        stages=stages,
        core_ratio=(len(reram_stages), 1),
        dram_load_delay=load,
    )
    if comm_model is not None:
        schedule = with_comm_delays(schedule, comm_model(schedule, cfg))
    return schedule


def with_comm_delays(schedule: PipelineSchedule, delays: Mapping[StageId, float]) -> PipelineSchedule:
    """ステージ別通信遅延を設定したスケジュールを返す"""
    stages = tuple(
        replace(stage, comm_delay=float(delays.get(stage.id, 0.0)))
        for stage in schedule.stages
    )
    return replace(schedule, stages=stages)


def pipeline_timing(schedule: PipelineSchedule, num_layers: int, batch: int) -> PipelineTiming:
    """
    スループットは最も遅いステージで決まる

    深さ D = ステージ数·層数、レイテンシ = (D + batch − 1)·stage_time
    """
    if not isinstance(num_layers, int) or num_layers < 1:
        raise ConfigError(f"Invalid 'num_layers': must be a positive integer, got {num_layers!r}", field='num_layers')
    if not isinstance(batch, int) or batch < 1:
        raise ConfigError(f"Invalid 'batch': must be a positive integer, got {batch!r}", field='batch')

    stage_time = max(stage.total_delay for stage in schedule.stages)
    if stage_time <= 0:
        raise ConfigError("Pipeline has no positive stage delay", field='stages')
    depth = len(schedule.stages) * num_layers
    return PipelineTiming(
        stage_time=stage_time,
        throughput=1.0 / stage_time,
        end_to_end_latency=(depth + batch - 1) * stage_time,
        sequential_latency=sum(stage.total_delay for stage in schedule.stages),
        depth=depth,
    )
