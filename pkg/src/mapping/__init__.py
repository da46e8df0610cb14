"""
Mapping Package
カーネル分割と4段パイプライン
"""
from .models import StageId, Resource, Partition, Stage, PipelineSchedule, PipelineTiming, STAGE_LAYOUT
from .partition import partition, compute_share
from .pipeline import (
    build_pipeline,
    pipeline_timing,
    dram_transfer_time,
    with_comm_delays,
    kernel_weight_matrices,
    overlapped_delay,
    stage_kernels,
    build_reram_stages,
)

__all__ = [
    'StageId',
    'Resource',
    'Partition',
    'Stage',
    'PipelineSchedule',
    'PipelineTiming',
    'STAGE_LAYOUT',
    'partition',
    'compute_share',
    'build_pipeline',
    'pipeline_timing',
    'dram_transfer_time',
    'with_comm_delays',
    'kernel_weight_matrices',
    'overlapped_delay',
    'stage_kernels',
    'build_reram_stages'
]
