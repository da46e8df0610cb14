# src/experiment.py

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
import hashlib
import json
import logging

from .cost.loader import load_cost_params
from .cost.models import CostParams
from .hardware.loader import load_hardware_spec
from .hardware.models import HardwareSpec
from .noc.loader import load_noc_params
from .noc.models import NocParams, TopologyKind
from .reporting.writer import parse_formats
from .systolic.shape_sweep import RANK_BY_DELAY, RANK_BY_UTILIZATION
from .utils.config_loader import deep_merge, load_config, load_user_config
from .utils.errors import ConfigError, require
from .workload.models import PrecisionPlan, TransformerConfig
from .workload.presets import build_transformer_config, get_preset

logger = logging.getLogger(__name__)

EXPERIMENT_FILE = 'experiment.yaml'


class ExperimentKind(str, Enum):
    SIMULATE = 'Simulate'
    SHAPE_SWEEP = 'ShapeSweep'
    QUANT_SWEEP = 'QuantSweep'
    NOC_COMPARE = 'NocCompare'
    COST_COMPARE = 'CostCompare'


@dataclass(frozen=True)
class SweepConfig:
    shapes: Tuple[Tuple[int, int], ...] = ()
    rank_by: str = RANK_BY_UTILIZATION
    precisions: Tuple[str, ...] = ()
    level_usage_blocks: int = 8

    def to_dict(self) -> dict:
        return {
            'shapes': [list(shape) for shape in self.shapes],
            'rank_by': self.rank_by,
            'precisions': list(self.precisions),
            'level_usage_blocks': self.level_usage_blocks
        }


@dataclass(frozen=True)
class OutputConfig:
    dir: Path = Path('results')
    formats: Tuple[str, ...] = ('csv', 'json')
    include_timestamp: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    """
    1回の実験に必要な設定一式
    """
    experiment: ExperimentKind
    workload: TransformerConfig
    hardware: HardwareSpec
    noc: NocParams
    cost: CostParams
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    noc_compare: Tuple[TopologyKind, ...] = (TopologyKind.MESH3D, TopologyKind.MESH3D_SKIP, TopologyKind.ATLEUS)
    noc_baseline: TopologyKind = TopologyKind.MESH3D
    cost_tiers: int = 4
    cost_tier_area_mm2: float = 100.0
    batch: int = 1
    seed: int = 0

    @property
    def experiment_id(self) -> str:
        return f"{self.experiment.value}_{self.workload.name}"

    def to_dict(self) -> Dict[str, Any]:
        """出力先を除いた正規形 (config hash の対象)"""
        return {
            'experiment': self.experiment.value,
            'workload': self.workload.to_dict(),
            'hardware': self.hardware.to_dict(),
            'noc': self.noc.to_dict(),
            'cost': self.cost.to_dict(),
            'sweep': self.sweep.to_dict(),
            'noc_compare': [kind.value for kind in self.noc_compare],
            'noc_baseline': self.noc_baseline.value,
            'cost_tiers': self.cost_tiers,
            'cost_tier_area_mm2': self.cost_tier_area_mm2,
            'batch': self.batch,
            'seed': self.seed
        }

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'), default=str)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _build_workload(section: Dict[str, Any], preset: Optional[str]) -> TransformerConfig:
    fields = dict(section or {})
    name = preset or fields.pop('preset', None)
    fields.pop('preset', None)
    if name:
        return get_preset(name, overrides=fields)
    return build_transformer_config(fields, name=fields.pop('name', 'custom'))


def _build_sweep(section: Dict[str, Any]) -> SweepConfig:
    shapes = []
    for shape in section.get('shapes', []):
        if not isinstance(shape, (list, tuple)) or len(shape) != 2:
            raise ConfigError(f"Invalid 'sweep.shapes' entry: {shape!r} (expected [rows, cols])", field='sweep.shapes')
        shapes.append((int(shape[0]), int(shape[1])))
    precisions = tuple(str(p) for p in section.get('precisions', []))
    for plan in precisions:
        PrecisionPlan.parse(plan)
    rank_by = section.get('rank_by', RANK_BY_UTILIZATION)
    require(rank_by in (RANK_BY_UTILIZATION, RANK_BY_DELAY), 'sweep.rank_by', f"unknown ranking '{rank_by}'")
    return SweepConfig(
        shapes=tuple(shapes),
        rank_by=rank_by,
        precisions=precisions,
        level_usage_blocks=int(section.get('level_usage_blocks', 8)),
    )


def _topology_kinds(values: List[Any], field_name: str) -> Tuple[TopologyKind, ...]:
    try:
        return tuple(TopologyKind(v) for v in values)
    except ValueError as e:
        raise ConfigError(f"Invalid '{field_name}': {str(e)}", field=field_name) from e


def load_experiment_config(
    config_path: Optional[str] = None,
    experiment: Optional[str] = None,
    preset: Optional[str] = None,
    out: Optional[str] = None,
    formats: Optional[str] = None,
    seed: Optional[int] = None,
    profile: Optional[str] = None,
) -> ExperimentConfig:
    """
    既定設定 → ユーザー設定ファイル → CLI フラグの順に重ねて ExperimentConfig を作る
    """
    try:
        config = deep_merge(load_config(EXPERIMENT_FILE), {})
        if config_path:
            config = deep_merge(config, load_user_config(config_path))

        try:
            kind = ExperimentKind(experiment or config['experiment'])
        except ValueError as e:
            raise ConfigError(f"Invalid 'experiment': {str(e)}", field='experiment') from e

        sweep_section = config.get('sweep', {}) or {}
        if preset is None and kind == ExperimentKind.SHAPE_SWEEP:
            preset = sweep_section.get('shape_preset')
        workload = _build_workload(config['workload'], preset)

        overrides = config.get('overrides', {}) or {}
        hardware = load_hardware_spec(overrides.get('hardware'), profile)
        noc_section = config.get('noc', {}) or {}
        noc = load_noc_params(overrides.get('noc'))
        cost_section = config.get('cost', {}) or {}
        cost = load_cost_params(overrides.get('cost'))

        output_section = config['output']
        output = OutputConfig(
            dir=Path(out or output_section['dir']),
            formats=tuple(parse_formats(formats or output_section.get('formats', ['csv', 'json']))),
            include_timestamp=bool(output_section.get('include_timestamp', False)),
        )

        batch = config.get('batch', 1)
        require(isinstance(batch, int) and batch >= 1, 'batch', f"must be a positive integer, got {batch!r}")
        seed_value = int(seed if seed is not None else config.get('seed', 0))
        require(0 <= seed_value < 2 ** 64, 'seed', "must fit in an unsigned 64-bit integer")

        experiment_config = ExperimentConfig(
            experiment=kind,
            workload=workload,
            hardware=hardware,
            noc=noc,
            cost=cost,
            output=output,
            sweep=_build_sweep(sweep_section),
            noc_compare=_topology_kinds(noc_section.get('compare', [k.value for k in TopologyKind]), 'noc.compare'),
            noc_baseline=_topology_kinds([noc_section.get('baseline', TopologyKind.MESH3D.value)], 'noc.baseline')[0],
            cost_tiers=int(cost_section.get('tiers', hardware.tiers)),
            cost_tier_area_mm2=float(cost_section.get('tier_area_mm2', hardware.tier_area_mm2)),
            batch=batch,
            seed=seed_value,
        )
        logger.debug(f"Experiment {experiment_config.experiment_id} config hash {experiment_config.config_hash}")
        return experiment_config
    except Exception as e:
        logger.error(f"Error loading experiment config: {str(e)}")
        raise
