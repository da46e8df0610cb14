from dataclasses import dataclass
from typing import Any, Dict, List, Optional
import logging

from ..utils.config_loader import load_config
from ..utils.errors import ConfigError
from .models import Phase, PrecisionPlan, TransformerConfig

logger = logging.getLogger(__name__)

PRESETS_FILE = 'presets.yaml'


@dataclass(frozen=True)
class DatasetInfo:
    """データセットのメタデータ"""
    name: str
    task: str
    samples: int

    def to_dict(self) -> dict:
        return {'name': self.name, 'task': self.task, 'samples': self.samples}


def preset_names() -> List[str]:
    return sorted(load_config(PRESETS_FILE)['models'])


def get_preset(name: str, overrides: Optional[Dict[str, Any]] = None) -> TransformerConfig:
    """
    プリセット名からワークロード設定を生成

    overrides は d_ff / r / k / phase / precision などの上書き
    """
    config = load_config(PRESETS_FILE)
    models = config['models']
    if name not in models:
        raise ConfigError(
            f"Unknown preset '{name}'. Available: {', '.join(sorted(models))}", field='workload.preset'
        )

    fields: Dict[str, Any] = {**config.get('lora', {}), **models[name], **(overrides or {})}
    return build_transformer_config(fields, name=name)


def build_transformer_config(fields: Dict[str, Any], name: str = 'custom') -> TransformerConfig:
    """辞書からTransformerConfigを生成"""
    fields = dict(fields)
    precision = fields.pop('precision', None)
    activation_bits = int(fields.pop('activation_bits', 16))
    if precision is None:
        plan = PrecisionPlan(activation_bits=activation_bits)
    elif isinstance(precision, PrecisionPlan):
        plan = precision
    elif isinstance(precision, str):
        plan = PrecisionPlan.parse(precision, activation_bits=activation_bits)
    elif isinstance(precision, dict):
        plan = PrecisionPlan(**{'activation_bits': activation_bits, **precision})
    else:
        raise ConfigError(f"Invalid 'precision': {precision!r}", field='precision')

    phase = fields.pop('phase', Phase.FINE_TUNE)
    known = {'d_model', 'n', 'num_layers', 'num_heads', 'r', 'k', 'd_ff'}
    unknown = set(fields) - known - {'preset', 'name'}
    if unknown:
        raise ConfigError(f"Unknown workload field(s): {', '.join(sorted(unknown))}", field=sorted(unknown)[0])

    missing = [key for key in ('d_model', 'n', 'num_layers', 'num_heads') if key not in fields]
    if missing:
        raise ConfigError(f"Required key '{missing[0]}' not found in workload", field=missing[0])

    return TransformerConfig(
        d_model=fields['d_model'],
        n=fields['n'],
        num_layers=fields['num_layers'],
        num_heads=fields['num_heads'],
        r=fields.get('r', 32),
        k=fields.get('k', 2),
        phase=phase,
        precision=plan,
        d_ff=fields.get('d_ff'),
        name=fields.get('name', name),
    )


def list_datasets() -> List[DatasetInfo]:
    """データセットのメタデータ一覧"""
    datasets = load_config(PRESETS_FILE).get('datasets', {})
    return [
        DatasetInfo(name=name, task=info['task'], samples=int(info['samples']))
        for name, info in sorted(datasets.items())
    ]
