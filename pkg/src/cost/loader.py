from typing import Any, Dict, Optional

from ..utils.config_loader import deep_merge, load_config
from ..utils.errors import ConfigError
from .models import CostParams

COST_FILE = 'cost.yaml'


def load_cost_params(overrides: Optional[Dict[str, Any]] = None, profile: Optional[str] = None) -> CostParams:
    config = deep_merge(load_config(COST_FILE, profile), overrides or {})
    try:
        return CostParams(**config)
    except TypeError as e:
        raise ConfigError(f"Invalid cost config: {str(e)}", field='cost') from e
