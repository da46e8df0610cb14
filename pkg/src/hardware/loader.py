from typing import Any, Dict, Optional
import logging

from ..reram.models import ReramTileConfig
from ..systolic.models import SystolicConfig
from ..utils.config_loader import deep_merge, load_config
from ..utils.errors import ConfigError
from .models import DramConfig, HardwareSpec, TsvConfig

logger = logging.getLogger(__name__)

HARDWARE_FILE = 'hardware.yaml'

_SECTIONS = {
    'systolic': SystolicConfig,
    'reram': ReramTileConfig,
    'dram': DramConfig,
    'tsv': TsvConfig,
}


def _build_section(name: str, values: Dict[str, Any]):
    cls = _SECTIONS[name]
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigError(f"Invalid '{name}' section: {str(e)}", field=name) from e


def hardware_from_dict(config: Dict[str, Any]) -> HardwareSpec:
    """
    辞書 (hardware.yaml のプロファイル + 上書き) から HardwareSpec を生成
    """
    values = dict(config)
    sections = {name: _build_section(name, values.pop(name, {}) or {}) for name in _SECTIONS}
    try:
        return HardwareSpec(**values, **sections)
    except TypeError as e:
        raise ConfigError(f"Invalid hardware config: {str(e)}", field='hardware') from e


def load_hardware_spec(overrides: Optional[Dict[str, Any]] = None, profile: Optional[str] = None) -> HardwareSpec:
    """
    パッケージ既定の hardware.yaml にユーザー上書きを重ねて読み込む
    """
    config = deep_merge(load_config(HARDWARE_FILE, profile), overrides or {})
    spec = hardware_from_dict(config)
    logger.debug(
        f"Hardware: {spec.tiers} tiers, systolic {spec.systolic.shape_label}, "
        f"ReRAM clock {spec.reram.clock_hz:.6g} Hz"
    )
    return spec
