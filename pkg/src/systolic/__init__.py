"""
Systolic Package
OSデータフローのサイクル・エネルギーモデル
"""
from .models import SystolicConfig, MMJob, Dataflow, EnergyMode
from .cycles import (
    analytic_cycles,
    utilization,
    systolic_energy,
    kernel_cycles,
    kernel_delay,
    kernel_utilization,
    kernel_energy,
    elementwise_cycles,
    fold_cycles,
)
from .event_sim import event_sim, tiled_event_sim, EventSimResult
from .shape_sweep import shape_sweep, ShapeSweepRow

__all__ = [
    'SystolicConfig',
    'MMJob',
    'Dataflow',
    'EnergyMode',
    'analytic_cycles',
    'utilization',
    'systolic_energy',
    'kernel_cycles',
    'kernel_delay',
    'kernel_utilization',
    'kernel_energy',
    'elementwise_cycles',
    'fold_cycles',
    'event_sim',
    'tiled_event_sim',
    'EventSimResult',
    'shape_sweep',
    'ShapeSweepRow'
]
