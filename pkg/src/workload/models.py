from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple
import math
import re

from ..utils.errors import ConfigError, require

ALLOWED_WEIGHT_BITS = (4, 8, 16)
LORA_TARGET_ORDER = ('W_Q', 'W_V', 'W_K', 'W_O')
MAX_LORA_TARGETS = len(LORA_TARGET_ORDER)


class Phase(str, Enum):
    FINE_TUNE = 'FineTune'
    INFERENCE = 'Inference'


class KernelId(str, Enum):
    MHA1 = 'MHA1'
    MHA2 = 'MHA2'
    MHA3 = 'MHA3'
    MHA4 = 'MHA4'
    L1 = 'L1'
    FF1 = 'FF1'
    FF2 = 'FF2'
    L2 = 'L2'
    LORA_FWD = 'LoRA_Fwd'
    LORA_BWD = 'LoRA_Bwd'


class KernelClass(str, Enum):
    STATIC_WEIGHT = 'StaticWeight'
    DYNAMIC_MM = 'DynamicMM'
    NON_LINEAR = 'NonLinear'


KERNEL_CLASS_MAP = {
    KernelId.MHA1: KernelClass.STATIC_WEIGHT,
    KernelId.MHA4: KernelClass.STATIC_WEIGHT,
    KernelId.FF1: KernelClass.STATIC_WEIGHT,
    KernelId.FF2: KernelClass.STATIC_WEIGHT,
    KernelId.MHA2: KernelClass.DYNAMIC_MM,
    KernelId.LORA_FWD: KernelClass.DYNAMIC_MM,
    KernelId.LORA_BWD: KernelClass.DYNAMIC_MM,
    KernelId.MHA3: KernelClass.NON_LINEAR,
    KernelId.L1: KernelClass.NON_LINEAR,
    KernelId.L2: KernelClass.NON_LINEAR,
}


@dataclass(frozen=True)
class PrecisionPlan:
    """
    重み精度プラン (MnFm 表記)
    """
    mha_bits: int = 16
    ff_bits: int = 16
    lora_bits: int = 16
    activation_bits: int = 16

    def __post_init__(self):
        require(self.mha_bits in ALLOWED_WEIGHT_BITS, 'precision.mha_bits',
                f"must be one of {ALLOWED_WEIGHT_BITS}, got {self.mha_bits}")
        require(self.ff_bits in ALLOWED_WEIGHT_BITS, 'precision.ff_bits',
                f"must be one of {ALLOWED_WEIGHT_BITS}, got {self.ff_bits}")
        require(self.lora_bits == 16, 'precision.lora_bits', "LoRA parameters are never quantized (must be 16)")
        require(self.activation_bits > 0, 'precision.activation_bits', "must be positive")

    @property
    def label(self) -> str:
        return f"M{self.mha_bits}F{self.ff_bits}"

    @property
    def is_baseline(self) -> bool:
        return self.mha_bits == 16 and self.ff_bits == 16

    @property
    def display_name(self) -> str:
        return '16-bit' if self.is_baseline else self.label

    @classmethod
    def parse(cls, text: str, activation_bits: int = 16) -> 'PrecisionPlan':
        """'M8F4' や '16-bit' から生成"""
        text = text.strip()
        if text.lower() in ('16-bit', '16bit', 'baseline'):
            return cls(activation_bits=activation_bits)
        match = re.fullmatch(r'M(\d+)F(\d+)', text, flags=re.IGNORECASE)
        if not match:
            raise ConfigError(f"Invalid 'precision': cannot parse '{text}' (expected MnFm)", field='precision')
        return cls(mha_bits=int(match.group(1)), ff_bits=int(match.group(2)), activation_bits=activation_bits)

    def to_dict(self) -> dict:
        return {
            'mha_bits': self.mha_bits,
            'ff_bits': self.ff_bits,
            'lora_bits': self.lora_bits,
            'activation_bits': self.activation_bits
        }


@dataclass(frozen=True)
class TransformerConfig:
    """
    Transformerワークロードの形状
    """
    d_model: int
    n: int
    num_layers: int
    num_heads: int
    r: int = 32
    k: int = 2
    phase: Phase = Phase.FINE_TUNE
    precision: PrecisionPlan = field(default_factory=PrecisionPlan)
    d_ff: Optional[int] = None
    name: str = 'custom'

    def __post_init__(self):
        for key in ('d_model', 'n', 'num_layers', 'num_heads', 'r'):
            value = getattr(self, key)
            require(isinstance(value, int) and value > 0, key, f"must be a positive integer, got {value!r}")
        require(isinstance(self.k, int) and self.k >= 0, 'k', f"must be a non-negative integer, got {self.k!r}")
        require(self.k <= MAX_LORA_TARGETS, 'k',
                f"at most {MAX_LORA_TARGETS} adapted matrices exist per layer (W_Q, W_K, W_V, W_O), got {self.k}")
        require(self.d_model % self.num_heads == 0, 'num_heads',
                f"d_model={self.d_model} is not divisible by num_heads={self.num_heads}")
        require(self.r < self.d_model, 'r', f"LoRA rank must be smaller than d_model, got r={self.r}")
        if self.d_ff is None:
            object.__setattr__(self, 'd_ff', 4 * self.d_model)
        require(isinstance(self.d_ff, int) and self.d_ff > 0, 'd_ff', f"must be a positive integer, got {self.d_ff!r}")
        if not isinstance(self.phase, Phase):
            try:
                object.__setattr__(self, 'phase', Phase(self.phase))
            except ValueError:
                raise ConfigError(f"Invalid 'phase': {self.phase!r} (expected FineTune or Inference)", field='phase')

    @property
    def head_dim(self) -> int:
        return self.d_model // self.num_heads

    @property
    def lora_targets(self) -> Tuple[str, ...]:
        return LORA_TARGET_ORDER[:self.k]

    def activation_message_bytes(self, elements: int) -> int:
        """活性化 elements 個を運ぶメッセージのバイト数 (端数ビットは切り上げ)"""
        return math.ceil(elements * self.precision.activation_bits / 8)

    @property
    def lora_param_bytes(self) -> int:
        """1層分のLoRAパラメータ (A, B) のバイト数"""
        return self.k * 2 * self.d_model * self.r * self.precision.lora_bits // 8

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'd_model': self.d_model,
            'n': self.n,
            'd_ff': self.d_ff,
            'num_layers': self.num_layers,
            'num_heads': self.num_heads,
            'r': self.r,
            'k': self.k,
            'phase': self.phase.value,
            'precision': self.precision.to_dict()
        }


@dataclass(frozen=True)
class Product:
    """カーネル内の1種類の行列積 (M×K と K×N) とその回数"""
    m: int
    k: int
    n: int
    count: int = 1

    @property
    def macs(self) -> int:
        return self.count * self.m * self.k * self.n


@dataclass(frozen=True)
class KernelInstance:
    """
    1層内の1カーネル
    """
    id: KernelId
    layer_index: int
    operand_dims: Tuple[int, int, int]
    macs: int
    kernel_class: KernelClass
    trainable_param_count: int = 0
    products: Tuple[Product, ...] = ()
    lora_target: Optional[str] = None

    @property
    def is_matmul(self) -> bool:
        return bool(self.products)

    @property
    def label(self) -> str:
        return f"{self.id.value}:{self.lora_target}" if self.lora_target else self.id.value

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id.value,
            'layer_index': self.layer_index,
            'operand_dims': list(self.operand_dims),
            'macs': self.macs,
            'class': self.kernel_class.value,
            'trainable_param_count': self.trainable_param_count,
            'lora_target': self.lora_target
        }
