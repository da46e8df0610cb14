"""
Hardware Package
3D スタックのハードウェア構成
"""
from .models import HardwareSpec, DramConfig, TsvConfig
from .loader import load_hardware_spec, hardware_from_dict

__all__ = [
    'HardwareSpec',
    'DramConfig',
    'TsvConfig',
    'load_hardware_spec',
    'hardware_from_dict'
]
