from dataclasses import dataclass
from enum import Enum

from ..utils.errors import ConfigError, require


class Dataflow(str, Enum):
    OS = 'OS'
    WS = 'WS'
    IS = 'IS'


class EnergyMode(str, Enum):
    POWER = 'power'
    PER_MAC = 'per_mac'


@dataclass(frozen=True)
class SystolicConfig:
    """
    シストリックアレイ1コアの構成 (リファレンス: 128×32 PE, 800 MHz)
    """
    rows: int = 128
    cols: int = 32
    clock_hz: float = 800e6
    sram_bytes: int = 131072
    dataflow: Dataflow = Dataflow.OS
    pe_energy_per_mac: float = 6.5e-13
    core_power_w: float = 2.13
    core_area_mm2: float = 2.55
    energy_mode: EnergyMode = EnergyMode.POWER

    def __post_init__(self):
        require(isinstance(self.rows, int) and self.rows > 0, 'systolic.rows', f"must be a positive integer, got {self.rows!r}")
        require(isinstance(self.cols, int) and self.cols > 0, 'systolic.cols', f"must be a positive integer, got {self.cols!r}")
        require(self.clock_hz > 0, 'systolic.clock_hz', "must be positive")
        require(self.sram_bytes > 0, 'systolic.sram_bytes', "must be positive")
        require(self.pe_energy_per_mac >= 0, 'systolic.pe_energy_per_mac', "must be non-negative")
        require(self.core_power_w >= 0, 'systolic.core_power_w', "must be non-negative")
        try:
            object.__setattr__(self, 'dataflow', Dataflow(self.dataflow))
            object.__setattr__(self, 'energy_mode', EnergyMode(self.energy_mode))
        except ValueError as e:
            raise ConfigError(f"Invalid systolic setting: {str(e)}", field='systolic') from e

    @property
    def pes(self) -> int:
        return self.rows * self.cols

    @property
    def shape_label(self) -> str:
        return f"{self.rows}x{self.cols}"

    def to_dict(self) -> dict:
        return {
            'rows': self.rows,
            'cols': self.cols,
            'clock_hz': self.clock_hz,
            'sram_bytes': self.sram_bytes,
            'dataflow': self.dataflow.value,
            'pe_energy_per_mac': self.pe_energy_per_mac,
            'core_power_w': self.core_power_w,
            'core_area_mm2': self.core_area_mm2,
            'energy_mode': self.energy_mode.value
        }


@dataclass(frozen=True)
class MMJob:
    """M×K と K×N の行列積"""
    m: int
    k: int
    n: int

    def __post_init__(self):
        for key in ('m', 'k', 'n'):
            value = getattr(self, key)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"Invalid 'job.{key}': dims must be >= 1, got {value!r}", field=f"job.{key}")

    @property
    def macs(self) -> int:
        return self.m * self.k * self.n

    def transposed(self) -> 'MMJob':
        return MMJob(self.n, self.k, self.m)
