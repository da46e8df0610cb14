from typing import List
import logging

from .models import (
    KERNEL_CLASS_MAP,
    KernelId,
    KernelInstance,
    Phase,
    Product,
    TransformerConfig,
)

logger = logging.getLogger(__name__)


def kernel_macs(kernel: KernelInstance, cfg: TransformerConfig) -> int:
    """
    カーネルの正確なMAC数 (非線形カーネルは要素演算数)
    """
    d, n, r = cfg.d_model, cfg.n, cfg.r
    kid = kernel.id
    if kid == KernelId.MHA1:
        return 3 * d * d * n
    if kid == KernelId.MHA2:
        return d * n * n
    if kid == KernelId.MHA4:
        return d * d * n
    if kid in (KernelId.FF1, KernelId.FF2):
        return n * d * cfg.d_ff
    if kid in (KernelId.MHA3, KernelId.L1, KernelId.L2):
        return d * n
    if kid in (KernelId.LORA_FWD, KernelId.LORA_BWD):
        return 2 * d * r * n
    raise ValueError(f"Unknown kernel id: {kid}")


def _make(kid: KernelId, layer: int, dims, products, cfg: TransformerConfig,
          trainable: int = 0, target=None) -> KernelInstance:
    stub = KernelInstance(
        id=kid,
        layer_index=layer,
        operand_dims=dims,
        macs=0,
        kernel_class=KERNEL_CLASS_MAP[kid],
        trainable_param_count=trainable,
        products=tuple(products),
        lora_target=target,
    )
    macs = kernel_macs(stub, cfg)
    if stub.products and sum(p.macs for p in stub.products) != macs:
        raise AssertionError(f"Product decomposition of {kid.value} does not match its MAC count")
    return KernelInstance(
        id=kid,
        layer_index=layer,
        operand_dims=dims,
        macs=macs,
        kernel_class=stub.kernel_class,
        trainable_param_count=trainable,
        products=stub.products,
        lora_target=target,
    )


def layer_kernels(cfg: TransformerConfig, layer: int = 0) -> List[KernelInstance]:
    """
    1層分のカーネル列
    """
    d, n, r, h = cfg.d_model, cfg.n, cfg.r, cfg.num_heads
    dh = cfg.head_dim
    d_ff = cfg.d_ff

    kernels = [
        _make(KernelId.MHA1, layer, (n, d, d), [Product(n, d, d, 3)], cfg),
        _make(KernelId.MHA2, layer, (n, dh, n), [Product(n, dh, n, h)], cfg),
        _make(KernelId.MHA3, layer, (n, n, dh), [], cfg),
        _make(KernelId.MHA4, layer, (n, d, d), [Product(n, d, d)], cfg),
        _make(KernelId.L1, layer, (n, d, 1), [], cfg),
        _make(KernelId.FF1, layer, (n, d, d_ff), [Product(n, d, d_ff)], cfg),
        _make(KernelId.FF2, layer, (n, d_ff, d), [Product(n, d_ff, d)], cfg),
        _make(KernelId.L2, layer, (n, d, 1), [], cfg),
    ]

    fine_tune = cfg.phase == Phase.FINE_TUNE
    for target in cfg.lora_targets:
        # 順伝播: X·A (n×d×r) の後に (XA)·B (n×r×d)
        kernels.append(_make(
            KernelId.LORA_FWD, layer, (n, d, r),
            [Product(n, d, r), Product(n, r, d)], cfg,
            trainable=2 * d * r if fine_tune else 0,
            target=target,
        ))
        if fine_tune:
            # 逆伝播: 学習対象 A, B の勾配 (d×n×r と r×n×d)
            kernels.append(_make(
                KernelId.LORA_BWD, layer, (d, n, r),
                [Product(d, n, r), Product(r, n, d)], cfg,
                target=target,
            ))
    return kernels


def enumerate_kernels(cfg: TransformerConfig) -> List[KernelInstance]:
    """
    全層のカーネルを列挙する

    Args:
        cfg: 検証済みのワークロード設定

    Returns:
        List[KernelInstance]: 層順、層内は固定順
    """
    kernels: List[KernelInstance] = []
    for layer in range(cfg.num_layers):
        kernels.extend(layer_kernels(cfg, layer))
    logger.debug(f"Enumerated {len(kernels)} kernels for {cfg.name} ({cfg.num_layers} layers)")
    return kernels


def closed_form_layer_macs(cfg: TransformerConfig) -> int:
    """1層あたりの総演算数の閉形式"""
    d, n, r, k = cfg.d_model, cfg.n, cfg.r, cfg.k
    lora = 2 * k * 2 * d * r * n if cfg.phase == Phase.FINE_TUNE else k * 2 * d * r * n
    return 12 * d * d * n + d * n * n + lora + 3 * d * n
