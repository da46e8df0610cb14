from dataclasses import dataclass, field

from ..reram.models import ReramTileConfig
from ..systolic.models import SystolicConfig
from ..utils.errors import require


@dataclass(frozen=True)
class DramConfig:
    """
    HBM (2.5D インターポーザ経由) の構成
    """
    max_bandwidth_bytes_per_s: float = 256e9
    efficiency: float = 0.8
    capacity_bytes: int = 2 * 1024 ** 3
    bus_width_bits: int = 1024
    clock_hz: float = 600e6

    def __post_init__(self):
        require(self.max_bandwidth_bytes_per_s > 0, 'dram.max_bandwidth_bytes_per_s', "must be positive")
        require(0 < self.efficiency <= 1, 'dram.efficiency', f"must be in (0, 1], got {self.efficiency}")
        require(self.capacity_bytes > 0, 'dram.capacity_bytes', "must be positive")

    @property
    def effective_bandwidth(self) -> float:
        return self.max_bandwidth_bytes_per_s * self.efficiency

    def to_dict(self) -> dict:
        return {
            'max_bandwidth_bytes_per_s': self.max_bandwidth_bytes_per_s,
            'efficiency': self.efficiency,
            'capacity_bytes': self.capacity_bytes,
            'bus_width_bits': self.bus_width_bits,
            'clock_hz': self.clock_hz
        }


@dataclass(frozen=True)
class TsvConfig:
    """TSV の物理パラメータ"""
    diameter_um: float = 5.0
    via_height_um: float = 15.0
    capacitance_f: float = 37e-15
    voltage_v: float = 1.0
    pitch_factor: float = 3.0

    def __post_init__(self):
        require(self.diameter_um > 0, 'tsv.diameter_um', "must be positive")
        require(self.capacitance_f >= 0, 'tsv.capacitance_f', "must be non-negative")
        require(self.pitch_factor >= 1, 'tsv.pitch_factor', "must be at least 1")

    @property
    def pitch_um(self) -> float:
        return self.pitch_factor * self.diameter_um

    @property
    def energy_per_bit(self) -> float:
        # E = ½·C·V²
        return 0.5 * self.capacitance_f * self.voltage_v ** 2

    def to_dict(self) -> dict:
        return {
            'diameter_um': self.diameter_um,
            'via_height_um': self.via_height_um,
            'capacitance_f': self.capacitance_f,
            'voltage_v': self.voltage_v,
            'pitch_factor': self.pitch_factor
        }


@dataclass(frozen=True)
class HardwareSpec:
    """
    3D スタック全体のハードウェア構成

    tier 0 がシストリックアレイ、tier 1 以降が ReRAM
    """
    tiers: int = 4
    grid: int = 4
    tier_area_mm2: float = 100.0
    systolic_cores: int = 16
    systolic_slack: float = 2.0
    lora_load_overlap: float = 1.0
    systolic: SystolicConfig = field(default_factory=SystolicConfig)
    reram: ReramTileConfig = field(default_factory=ReramTileConfig)
    dram: DramConfig = field(default_factory=DramConfig)
    tsv: TsvConfig = field(default_factory=TsvConfig)

    def __post_init__(self):
        require(isinstance(self.tiers, int) and self.tiers >= 2, 'tiers', f"need at least 2 tiers, got {self.tiers!r}")
        require(isinstance(self.grid, int) and self.grid >= 2, 'grid', f"need at least a 2x2 grid, got {self.grid!r}")
        require(self.tier_area_mm2 > 0, 'tier_area_mm2', "must be positive")
        require(self.systolic_cores > 0, 'systolic_cores', "must be positive")
        require(self.systolic_slack >= 0, 'systolic_slack', "must be non-negative")
        require(0 <= self.lora_load_overlap <= 1, 'lora_load_overlap', "must be in [0, 1]")

    @property
    def cores_per_tier(self) -> int:
        return self.grid * self.grid

    @property
    def reram_tiers(self) -> int:
        return self.tiers - 1

    @property
    def reram_cores(self) -> int:
        return self.reram_tiers * self.cores_per_tier

    def to_dict(self) -> dict:
        return {
            'tiers': self.tiers,
            'grid': self.grid,
            'tier_area_mm2': self.tier_area_mm2,
            'systolic_cores': self.systolic_cores,
            'systolic_slack': self.systolic_slack,
            'lora_load_overlap': self.lora_load_overlap,
            'systolic': self.systolic.to_dict(),
            'reram': self.reram.to_dict(),
            'dram': self.dram.to_dict(),
            'tsv': self.tsv.to_dict()
        }
