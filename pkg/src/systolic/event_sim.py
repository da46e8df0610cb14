from dataclasses import dataclass
import logging

import numpy as np

from ..utils.errors import ConfigError
from .cycles import _check_dataflow, iter_folds
from .models import MMJob, SystolicConfig

logger = logging.getLogger(__name__)


@dataclass
class EventSimResult:
    """イベントシミュレーション結果"""
    cycles: int
    product: np.ndarray
    macs: int = 0


def _as_operands(job: MMJob, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise ConfigError("Operands must be 2-D matrices", field='operands')
    if a.shape != (job.m, job.k) or b.shape != (job.k, job.n):
        raise ConfigError(
            f"Dimension mismatch: A{a.shape} x B{b.shape} does not match job "
            f"({job.m}x{job.k}) x ({job.k}x{job.n})",
            field='operands',
        )
    return a, b


def event_sim(job: MMJob, cfg: SystolicConfig, a, b) -> EventSimResult:
    """
    1フォールド分のPEレベルシミュレーション (OS)

    各PEは部分和を保持し、入力は右へ、重みは下へ毎サイクル1段ずつ進む。
    行 i の入力は i サイクル、列 j の重みは j サイクル遅れて投入される。
    全MAC完了後、出力を1サイクル1行ずつ下端から排出する。
    """
    _check_dataflow(cfg)
    a, b = _as_operands(job, a, b)
    if job.m > cfg.rows or job.n > cfg.cols:
        raise ConfigError(
            f"Job {job.m}x{job.n} does not fit a single fold on {cfg.shape_label}",
            field='job',
        )

    rows, cols, depth = job.m, job.n, job.k
    a_reg = np.zeros((rows, cols))
    a_valid = np.zeros((rows, cols), dtype=bool)
    b_reg = np.zeros((rows, cols))
    b_valid = np.zeros((rows, cols), dtype=bool)
    acc = np.zeros((rows, cols))

    remaining = rows * cols * depth
    done = 0
    cycle = 0
    while remaining > 0:
        # 入力は右隣、重みは下隣へ
        a_reg[:, 1:] = a_reg[:, :-1].copy()
        a_valid[:, 1:] = a_valid[:, :-1].copy()
        b_reg[1:, :] = b_reg[:-1, :].copy()
        b_valid[1:, :] = b_valid[:-1, :].copy()

        for i in range(rows):
            step = cycle - i
            a_valid[i, 0] = 0 <= step < depth
            a_reg[i, 0] = a[i, step] if a_valid[i, 0] else 0.0
        for j in range(cols):
            step = cycle - j
            b_valid[0, j] = 0 <= step < depth
            b_reg[0, j] = b[step, j] if b_valid[0, j] else 0.0

        fire = a_valid & b_valid
        acc[fire] += a_reg[fire] * b_reg[fire]
        fired = int(fire.sum())
        remaining -= fired
        done += fired
        cycle += 1

    product = np.zeros((rows, cols))
    for step in range(rows):
        product[rows - 1 - step] = acc[-1]
        acc[1:] = acc[:-1].copy()
        acc[0] = 0.0
        cycle += 1

    logger.debug(f"event_sim {job.m}x{job.k}x{job.n} on {cfg.shape_label}: {cycle} cycles")
    return EventSimResult(cycles=cycle, product=product, macs=done)


def tiled_event_sim(job: MMJob, cfg: SystolicConfig, a, b) -> EventSimResult:
    """
    フォールドに分割して event_sim を順に実行 (複数フォールドのオラクル)
    """
    a, b = _as_operands(job, a, b)
    product = np.zeros((job.m, job.n))
    cycles = 0
    macs = 0
    for row_start, rows, col_start, cols in iter_folds(job, cfg):
        fold = MMJob(rows, job.k, cols)
        result = event_sim(
            fold, cfg,
            a[row_start:row_start + rows, :],
            b[:, col_start:col_start + cols],
        )
        product[row_start:row_start + rows, col_start:col_start + cols] = result.product
        cycles += result.cycles
        macs += result.macs
    return EventSimResult(cycles=cycles, product=product, macs=macs)
