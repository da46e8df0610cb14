"""
Reporting Package
実験結果のモデルと CSV / JSON / SVG 出力
"""
from .models import Report, ReportRow, ReportMetadata, ChartSpec, SCHEMA_VERSION
from .writer import ReportWriter, emit_report, parse_formats, SUPPORTED_FORMATS

__all__ = [
    'Report',
    'ReportRow',
    'ReportMetadata',
    'ChartSpec',
    'SCHEMA_VERSION',
    'ReportWriter',
    'emit_report',
    'parse_formats',
    'SUPPORTED_FORMATS'
]
