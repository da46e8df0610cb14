from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

from ..workload.models import KernelId, KernelInstance


class StageId(str, Enum):
    S1 = 'S1'
    S2 = 'S2'
    S3 = 'S3'
    S4 = 'S4'


class Resource(str, Enum):
    RERAM = 'ReRAM'
    SYSTOLIC = 'Systolic'


# 層内パイプラインの固定構成
STAGE_LAYOUT: Dict[StageId, Tuple[Resource, Tuple[KernelId, ...]]] = {
    StageId.S1: (Resource.RERAM, (KernelId.MHA1, KernelId.MHA4)),
    StageId.S2: (Resource.SYSTOLIC, (KernelId.MHA2, KernelId.MHA3, KernelId.L1,
                                     KernelId.LORA_FWD, KernelId.LORA_BWD)),
    StageId.S3: (Resource.RERAM, (KernelId.FF1,)),
    StageId.S4: (Resource.RERAM, (KernelId.FF2, KernelId.L2)),
}


@dataclass
class Partition:
    """ReRAM / シストリックへのカーネル分割"""
    reram_kernels: List[KernelInstance] = field(default_factory=list)
    systolic_kernels: List[KernelInstance] = field(default_factory=list)
    mm_reram: int = 0
    mm_systolic: int = 0

    @property
    def total_ops(self) -> int:
        return self.mm_reram + self.mm_systolic

    @property
    def reram_share_pct(self) -> float:
        return 100.0 * self.mm_reram / self.total_ops if self.total_ops else 0.0

    def to_dict(self) -> dict:
        return {
            'reram_kernels': [k.label for k in self.reram_kernels],
            'systolic_kernels': [k.label for k in self.systolic_kernels],
            'mm_reram': self.mm_reram,
            'mm_systolic': self.mm_systolic
        }


@dataclass(frozen=True)
class Stage:
    """
    パイプラインステージ1つ

    crossbars / tiles / cores は ReRAM ステージのみ非ゼロ
    """
    id: StageId
    resource: Resource
    kernels: Tuple[KernelInstance, ...]
    compute_delay: float
    comm_delay: float = 0.0
    crossbars: int = 0
    tiles: int = 0
    cores: int = 0
    dequant_enabled: bool = False
    duplication: int = 1

    @property
    def total_delay(self) -> float:
        return self.compute_delay + self.comm_delay

    def to_dict(self) -> dict:
        return {
            'id': self.id.value,
            'resource': self.resource.value,
            'kernels': [k.label for k in self.kernels],
            'compute_delay': self.compute_delay,
            'comm_delay': self.comm_delay,
            'crossbars': self.crossbars,
            'tiles': self.tiles,
            'cores': self.cores,
            'dequant_enabled': self.dequant_enabled,
            'duplication': self.duplication
        }


@dataclass(frozen=True)
class PipelineSchedule:
    """4段の層内パイプライン (構築後は不変)"""
    stages: Tuple[Stage, ...]
    core_ratio: Tuple[int, int] = (3, 1)
    dram_load_delay: float = 0.0

    def stage(self, stage_id: StageId) -> Stage:
        for stage in self.stages:
            if stage.id == StageId(stage_id):
                return stage
        raise KeyError(f"Stage {stage_id} not in schedule")

    @property
    def reram_stages(self) -> Tuple[Stage, ...]:
        return tuple(s for s in self.stages if s.resource == Resource.RERAM)

    def to_dict(self) -> dict:
        return {
            'stages': [s.to_dict() for s in self.stages],
            'core_ratio': list(self.core_ratio),
            'dram_load_delay': self.dram_load_delay
        }


@dataclass(frozen=True)
class PipelineTiming:
    """パイプライン全体の時間特性"""
    stage_time: float
    throughput: float
    end_to_end_latency: float
    sequential_latency: float
    depth: int

    def to_dict(self) -> dict:
        return {
            'stage_time': self.stage_time,
            'throughput': self.throughput,
            'end_to_end_latency': self.end_to_end_latency,
            'sequential_latency': self.sequential_latency,
            'depth': self.depth
        }
