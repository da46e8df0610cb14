# src/utils/config_loader.py

from typing import Dict, Any, Optional, Union
import os
import yaml
from pathlib import Path
import logging
from functools import lru_cache

from .errors import ConfigError

logger = logging.getLogger(__name__)

PROFILE_ENV = 'SIM_PROFILE'


def get_config_path(filename: str) -> Path:
    """
    設定ファイルのパス取得
    """
    base_path = Path(__file__).parent.parent / 'configs'
    file_path = base_path / filename

    if not file_path.exists():
        raise FileNotFoundError(f"Config file not found: {filename}")

    return file_path


@lru_cache(maxsize=32)
def load_config(filename: str, profile: Optional[str] = None) -> Dict[str, Any]:
    """
    設定ファイルの読み込み関数

    profiles を持つファイルは引数、環境変数 SIM_PROFILE、default_profile の順で選択する
    """
    try:
        file_path = get_config_path(filename)
        with open(file_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}

        config = select_profile(config, filename, profile)
        validate_config(config, filename)
        return config
    except Exception as e:
        logger.error(f"Error loading config file {filename}: {str(e)}")
        raise


def load_user_config(path: Union[str, Path]) -> Dict[str, Any]:
    """
    --config で渡されたユーザー設定ファイルの読み込み
    """
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"Config file not found: {file_path}", field='config')
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        logger.error(f"Error parsing config file {file_path}: {str(e)}")
        raise ConfigError(f"Malformed YAML in {file_path}: {str(e)}", field='config') from e

    if not isinstance(config, dict):
        raise ConfigError(f"Top level of {file_path} must be a mapping", field='config')
    return config


def select_profile(config: Dict[str, Any], filename: str, profile: Optional[str] = None) -> Dict[str, Any]:
    """
    profiles セクションから対象プロファイルを取り出す
    """
    if 'profiles' not in config:
        return config

    profiles = config['profiles']
    name = profile or os.getenv(PROFILE_ENV) or config.get('default_profile')
    if name not in profiles:
        raise ConfigError(f"Profile '{name}' not found in {filename}", field='profile')
    return profiles[name]


def validate_config(config: Dict[str, Any], filename: str):
    """
    設定の検証
    """
    required_keys = {
        'hardware.yaml': ['tiers', 'grid', 'systolic', 'reram', 'dram'],
        'noc.yaml': ['topology', 'router_latency_cycles', 'clock_hz', 'link_width_bits'],
        'cost.yaml': ['wafer_cost', 'wafer_diameter_mm', 'defect_density_per_cm2', 'clustering_alpha'],
        'presets.yaml': ['models'],
        'experiment.yaml': ['workload', 'experiment', 'output'],
    }

    if filename in required_keys:
        for key in required_keys[filename]:
            if key not in config:
                raise ConfigError(f"Required key '{key}' not found in {filename}", field=key)

    if filename == 'presets.yaml':
        for name, model in config['models'].items():
            for key in ('d_model', 'n', 'num_layers', 'num_heads'):
                if key not in model:
                    raise ConfigError(f"Preset '{name}' is missing '{key}'. Check 'presets.yaml'", field=key)

    if filename == 'experiment.yaml':
        if 'dir' not in config['output']:
            raise ConfigError("Required key 'output.dir' not found in experiment.yaml", field='output.dir')


def deep_merge(dict1: Dict[str, Any], dict2: Dict[str, Any]) -> Dict[str, Any]:
    """
    二つのDict形式を再帰的マージ
    """
    result = dict1.copy()
    for key, value in dict2.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result
