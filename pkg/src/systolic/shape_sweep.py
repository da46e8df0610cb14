from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence
import logging

from ..utils.errors import ConfigError
from ..workload.models import KernelInstance
from .cycles import kernel_cycles, kernel_utilization
from .models import SystolicConfig

logger = logging.getLogger(__name__)

RANK_BY_UTILIZATION = 'utilization'
RANK_BY_DELAY = 'delay'


@dataclass
class ShapeSweepRow:
    """候補アレイ形状1つ分の評価結果"""
    config: SystolicConfig
    kernel_delays: Dict[str, float] = field(default_factory=dict)
    cumulative_delay: float = 0.0
    mean_utilization: float = 0.0
    feasible: bool = False
    rank: int = 0

    @property
    def label(self) -> str:
        return self.config.shape_label

    @property
    def pes(self) -> int:
        return self.config.pes

    def to_dict(self) -> dict:
        return {
            'config': self.label,
            'pes': self.pes,
            'kernel_delays': dict(self.kernel_delays),
            'cumulative_delay': self.cumulative_delay,
            'mean_utilization': self.mean_utilization,
            'feasible': self.feasible,
            'rank': self.rank
        }


def _kernel_key(kernel: KernelInstance, seen: Dict[str, int]) -> str:
    label = kernel.label
    seen[label] = seen.get(label, 0) + 1
    return label if seen[label] == 1 else f"{label}#{seen[label]}"


def shape_sweep(
    kernels: Sequence[KernelInstance],
    candidates: Sequence[SystolicConfig],
    reram_stage_delay: float,
    extra_delay: Optional[Callable[[float], float]] = None,
    rank_by: str = RANK_BY_DELAY,
) -> List[ShapeSweepRow]:
    """
    シストリックアレイ形状のスイープ

    Args:
        kernels: S2 ステージのカーネル
        candidates: 同一クロックの候補構成
        reram_stage_delay: 正規化基準 (最も遅い ReRAM ステージの遅延)
        extra_delay: S2 計算時間を受け取り DRAM ロードを加味した時間を返す関数
        rank_by: 'delay' (既定: 実行可能 → 累積遅延 → 平均利用率) または 'utilization' (実行可能 → 平均利用率 → 累積遅延)

    Returns:
        List[ShapeSweepRow]: 順位順
    """
    if not candidates:
        raise ConfigError("Shape sweep needs at least one candidate", field='sweep.candidates')
    if reram_stage_delay <= 0:
        raise ConfigError("reram_stage_delay must be positive", field='reram_stage_delay')
    if len({c.clock_hz for c in candidates}) != 1:
        raise ConfigError("Shape sweep candidates must share one clock", field='sweep.candidates')
    if rank_by not in (RANK_BY_UTILIZATION, RANK_BY_DELAY):
        raise ConfigError(f"Invalid 'sweep.rank_by': {rank_by}", field='sweep.rank_by')

    rows: List[ShapeSweepRow] = []
    for cfg in candidates:
        row = ShapeSweepRow(config=cfg)
        seen: Dict[str, int] = {}
        compute = 0.0
        utilizations = []
        for kernel in kernels:
            seconds = kernel_cycles(kernel, cfg) / cfg.clock_hz
            compute += seconds
            row.kernel_delays[_kernel_key(kernel, seen)] = seconds / reram_stage_delay
            if kernel.is_matmul:
                utilizations.append(kernel_utilization(kernel, cfg))

        total = extra_delay(compute) if extra_delay else compute
        row.cumulative_delay = total / reram_stage_delay
        row.feasible = row.cumulative_delay <= 1.0
        row.mean_utilization = sum(utilizations) / len(utilizations) if utilizations else 0.0
        logger.debug(
            f"Candidate {row.label}: normalized delay {row.cumulative_delay:.4f}, "
            f"utilization {row.mean_utilization:.4f}, feasible={row.feasible}"
        )
        rows.append(row)

    if rank_by == RANK_BY_DELAY:
        ordered = sorted(rows, key=lambda r: (not r.feasible, r.cumulative_delay, -r.mean_utilization))
    else:
        ordered = sorted(rows, key=lambda r: (not r.feasible, -r.mean_utilization, r.cumulative_delay))

    for rank, row in enumerate(ordered, start=1):
        row.rank = rank
    return ordered
