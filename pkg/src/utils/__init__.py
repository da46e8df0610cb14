# src/utils/__init__.py

"""
Utilities Package
共通ユーティリティ機能を提供
"""
from .config_loader import load_config, get_config_path, load_user_config, deep_merge
from .logger import setup_logger, StructuredLogger
from .errors import (
    SimulatorError,
    ConfigError,
    InfeasibleStageError,
    UnsupportedDataflowError,
    RoutingError,
    PlacementError,
)
from .formatting import round_sig, format_number, sanitize_filename

__all__ = [
    'load_config',
    'get_config_path',
    'load_user_config',
    'deep_merge',
    'setup_logger',
    'StructuredLogger',
    'SimulatorError',
    'ConfigError',
    'InfeasibleStageError',
    'UnsupportedDataflowError',
    'RoutingError',
    'PlacementError',
    'round_sig',
    'format_number',
    'sanitize_filename'
]

__version__ = '1.0.0'

import logging
logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())
