from typing import Iterator, Tuple
import logging
import math

from ..utils.errors import UnsupportedDataflowError
from ..workload.models import KernelInstance, Product
from .models import Dataflow, EnergyMode, MMJob, SystolicConfig

logger = logging.getLogger(__name__)


def fold_cycles(r: int, c: int, k: int) -> int:
    """r×c PE を占有する1フォールドのサイクル数 (スキュー充填 + K + 行単位ドレイン)"""
    return (r - 1) + (c - 1) + k + r


def iter_folds(job: MMJob, cfg: SystolicConfig) -> Iterator[Tuple[int, int, int, int]]:
    """
    フォールドを (行ブロック, 列ブロック) の行優先で列挙

    Yields:
        (row_start, rows, col_start, cols)
    """
    for row_start in range(0, job.m, cfg.rows):
        rows = min(cfg.rows, job.m - row_start)
        for col_start in range(0, job.n, cfg.cols):
            yield row_start, rows, col_start, min(cfg.cols, job.n - col_start)


def _check_dataflow(cfg: SystolicConfig):
    if cfg.dataflow != Dataflow.OS:
        raise UnsupportedDataflowError(
            f"Dataflow {cfg.dataflow.value} has no cycle model; only OS is supported"
        )


def analytic_cycles(job: MMJob, cfg: SystolicConfig) -> int:
    """
    OSデータフローの解析サイクル数

    フォールドを重ねずに順に実行した場合の総和
    """
    _check_dataflow(cfg)
    row_blocks = math.ceil(job.m / cfg.rows)
    col_blocks = math.ceil(job.n / cfg.cols)
    # Σ fold_cycles = 2·M·(列ブロック数) + N·(行ブロック数) + フォールド数·(K−2)
    return 2 * job.m * col_blocks + job.n * row_blocks + row_blocks * col_blocks * (job.k - 2)


def utilization(job: MMJob, cfg: SystolicConfig) -> float:
    return job.macs / (cfg.pes * analytic_cycles(job, cfg))


def energy_for_cycles(cycles: int, macs: int, cfg: SystolicConfig) -> float:
    if cfg.energy_mode == EnergyMode.PER_MAC:
        return macs * cfg.pe_energy_per_mac
    return cfg.core_power_w * (cycles / cfg.clock_hz)


def systolic_energy(job: MMJob, cfg: SystolicConfig) -> float:
    """
    ジョブのエネルギー (既定は 電力×時間、per_mac モードでは MAC 数×MACあたりエネルギー)
    """
    return energy_for_cycles(analytic_cycles(job, cfg), job.macs, cfg)


def product_cycles(product: Product, cfg: SystolicConfig) -> int:
    """転置ジョブ (Cᵀ = Bᵀ·Aᵀ) と比較して短い方を採用"""
    job = MMJob(product.m, product.k, product.n)
    return product.count * min(analytic_cycles(job, cfg), analytic_cycles(job.transposed(), cfg))


def elementwise_cycles(ops: int, cfg: SystolicConfig) -> int:
    """非線形演算は 1 op/PE/cycle"""
    return math.ceil(ops / cfg.pes)


def kernel_cycles(kernel: KernelInstance, cfg: SystolicConfig) -> int:
    if kernel.is_matmul:
        return sum(product_cycles(product, cfg) for product in kernel.products)
    _check_dataflow(cfg)
    return elementwise_cycles(kernel.macs, cfg)


def kernel_delay(kernel: KernelInstance, cfg: SystolicConfig) -> float:
    return kernel_cycles(kernel, cfg) / cfg.clock_hz


def kernel_utilization(kernel: KernelInstance, cfg: SystolicConfig) -> float:
    cycles = kernel_cycles(kernel, cfg)
    return kernel.macs / (cfg.pes * cycles) if cycles else 0.0


def kernel_energy(kernel: KernelInstance, cfg: SystolicConfig) -> float:
    return energy_for_cycles(kernel_cycles(kernel, cfg), kernel.macs, cfg)
