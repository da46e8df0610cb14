"""
Workload Package
Transformerワークロードとカーネル列挙
"""
from .models import (
    Phase,
    KernelId,
    KernelClass,
    PrecisionPlan,
    TransformerConfig,
    KernelInstance,
    Product,
)
from .kernels import enumerate_kernels, kernel_macs, layer_kernels, closed_form_layer_macs
from .presets import get_preset, preset_names, build_transformer_config, list_datasets

__all__ = [
    'Phase',
    'KernelId',
    'KernelClass',
    'PrecisionPlan',
    'TransformerConfig',
    'KernelInstance',
    'Product',
    'enumerate_kernels',
    'kernel_macs',
    'layer_kernels',
    'closed_form_layer_macs',
    'get_preset',
    'preset_names',
    'build_transformer_config',
    'list_datasets'
]
