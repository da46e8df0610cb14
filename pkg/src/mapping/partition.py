from typing import Dict, Optional, Sequence
import logging

from ..workload.kernels import kernel_macs
from ..workload.models import KernelClass, KernelInstance, TransformerConfig
from .models import Partition

logger = logging.getLogger(__name__)


def partition(kernels: Sequence[KernelInstance], cfg: Optional[TransformerConfig] = None) -> Partition:
    """
    カーネルクラスで ReRAM (静的重み) とシストリック (動的 MM + 非線形) に分割

    cfg を渡した場合は kernel_macs で演算数を数え直す
    """
    result = Partition()
    for kernel in kernels:
        ops = kernel_macs(kernel, cfg) if cfg is not None else kernel.macs
        if kernel.kernel_class == KernelClass.STATIC_WEIGHT:
            result.reram_kernels.append(kernel)
            result.mm_reram += ops
        else:
            result.systolic_kernels.append(kernel)
            result.mm_systolic += ops

    logger.debug(
        f"Partition: {len(result.reram_kernels)} ReRAM kernels ({result.mm_reram} ops), "
        f"{len(result.systolic_kernels)} systolic kernels ({result.mm_systolic} ops)"
    )
    return result


def compute_share(cfg: TransformerConfig) -> Dict[str, float]:
    """
    ReRAM / シストリックの演算量比

    exact: 12·d²·n / (d·n² + 2k·d·r·n + 3·d·n)
    approx: 12·d / n
    """
    d, n, r, k = cfg.d_model, cfg.n, cfg.r, cfg.k
    numerator = 12 * d * d * n
    denominator = d * n * n + 2 * k * d * r * n + 3 * d * n
    exact = numerator / denominator
    return {
        'exact_ratio': exact,
        'approx_ratio': 12 * d / n,
        'reram_share_pct': 100.0 * exact / (1.0 + exact)
    }
