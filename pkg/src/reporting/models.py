from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

from ..utils.formatting import round_sig

SCHEMA_VERSION = 1

Value = Union[int, float, bool]


@dataclass(frozen=True)
class ReportRow:
    """
    1つの計測値 (値は有効数字6桁に丸めて保持)
    """
    section: str
    item: str
    metric: str
    value: Value
    unit: str

    def __post_init__(self):
        object.__setattr__(self, 'value', round_sig(self.value))

    def to_dict(self) -> dict:
        return {
            'section': self.section,
            'item': self.item,
            'metric': self.metric,
            'value': self.value,
            'unit': self.unit
        }


@dataclass(frozen=True)
class ChartSpec:
    """グループ棒グラフ (x = セクション内の item、系列 = metric)"""
    name: str
    title: str
    section: str
    metrics: Tuple[str, ...]
    ylabel: str = ''

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'title': self.title,
            'section': self.section,
            'metrics': list(self.metrics),
            'ylabel': self.ylabel
        }


@dataclass
class ReportMetadata:
    """レポートのメタデータ (timestamp は比較対象外)"""
    experiment_id: str
    config_hash: str
    tool_version: str
    seed: int = 0
    timestamp: Optional[str] = field(default=None, compare=False)

    def to_dict(self, include_timestamp: bool = True) -> dict:
        data = {
            'experiment_id': self.experiment_id,
            'config_hash': self.config_hash,
            'tool_version': self.tool_version,
            'seed': self.seed
        }
        if include_timestamp and self.timestamp is not None:
            data['timestamp'] = self.timestamp
        return data


@dataclass
class Report:
    """実験結果"""
    experiment: str
    metadata: ReportMetadata
    rows: List[ReportRow] = field(default_factory=list)
    charts: List[ChartSpec] = field(default_factory=list)

    def add(self, section: str, item: str, metric: str, value: Value, unit: str):
        self.rows.append(ReportRow(section=section, item=item, metric=metric, value=value, unit=unit))

    def extend(self, rows: List[ReportRow]):
        self.rows.extend(rows)

    def section(self, name: str) -> List[ReportRow]:
        return [row for row in self.rows if row.section == name]

    def value(self, section: str, item: str, metric: str) -> Value:
        for row in self.rows:
            if (row.section, row.item, row.metric) == (section, item, metric):
                return row.value
        raise KeyError(f"No row {section}/{item}/{metric}")

    def to_dict(self, include_timestamp: bool = True) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'experiment': self.experiment,
            'metadata': self.metadata.to_dict(include_timestamp),
            'rows': [row.to_dict() for row in self.rows],
            'charts': [chart.to_dict() for chart in self.charts]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Report':
        if data.get('schema_version') != SCHEMA_VERSION:
            raise ValueError(f"Unsupported report schema version: {data.get('schema_version')}")
        meta = data['metadata']
        return cls(
            experiment=data['experiment'],
            metadata=ReportMetadata(
                experiment_id=meta['experiment_id'],
                config_hash=meta['config_hash'],
                tool_version=meta['tool_version'],
                seed=meta.get('seed', 0),
                timestamp=meta.get('timestamp'),
            ),
            rows=[ReportRow(**row) for row in data['rows']],
            charts=[
                ChartSpec(
                    name=chart['name'],
                    title=chart['title'],
                    section=chart['section'],
                    metrics=tuple(chart['metrics']),
                    ylabel=chart.get('ylabel', ''),
                )
                for chart in data.get('charts', [])
            ],
        )
