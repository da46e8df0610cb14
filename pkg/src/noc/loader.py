from typing import Any, Dict, Optional
import logging

from ..utils.config_loader import deep_merge, load_config
from ..utils.errors import ConfigError
from .models import NocParams

logger = logging.getLogger(__name__)

NOC_FILE = 'noc.yaml'


def load_noc_params(overrides: Optional[Dict[str, Any]] = None, profile: Optional[str] = None) -> NocParams:
    """noc.yaml とユーザー上書きから NocParams を生成"""
    config = deep_merge(load_config(NOC_FILE, profile), overrides or {})
    try:
        return NocParams(**config)
    except TypeError as e:
        raise ConfigError(f"Invalid noc config: {str(e)}", field='noc') from e
