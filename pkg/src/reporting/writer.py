# src/reporting/writer.py

from pathlib import Path
from typing import Dict, Iterable, List, Union
import csv
import json
import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..utils.errors import ConfigError
from ..utils.formatting import format_number, sanitize_filename
from .models import ChartSpec, Report

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = ('csv', 'json', 'svg')
CSV_HEADER = ['section', 'item', 'metric', 'value', 'unit']
SVG_HASH_SALT = 'stacked-pim-sim'


def parse_formats(formats: Union[str, Iterable[str]]) -> List[str]:
    """'csv,json' やリストを検証済みの形式リストに変換"""
    items = formats.split(',') if isinstance(formats, str) else list(formats)
    result = []
    for item in (i.strip().lower() for i in items):
        if not item:
            continue
        if item not in SUPPORTED_FORMATS:
            raise ConfigError(
                f"Invalid 'output.formats': unsupported format '{item}' "
                f"(expected a subset of {', '.join(SUPPORTED_FORMATS)})",
                field='output.formats',
            )
        if item not in result:
            result.append(item)
    if not result:
        raise ConfigError("Invalid 'output.formats': no format selected", field='output.formats')
    return result


class ReportWriter:
    """
    レポートを CSV / JSON / SVG に書き出すクラス

    同じレポートからは常にバイト単位で同じファイルを出力する
    """

    def __init__(self, out_dir: Union[str, Path], include_timestamp: bool = False):
        self.out_dir = Path(out_dir)
        self.include_timestamp = include_timestamp
        self.logger = logging.getLogger(__name__)

    def _prepare_dir(self):
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            self.logger.error(f"Cannot create output directory {self.out_dir}: {str(e)}")
            raise ConfigError(f"Output directory {self.out_dir} is not writable: {str(e)}", field='output.dir') from e

    def _path(self, report: Report, suffix: str) -> Path:
        return self.out_dir / f"{sanitize_filename(report.metadata.experiment_id)}{suffix}"

    def write(self, report: Report, formats: Union[str, Iterable[str]]) -> List[Path]:
        """
        レポートを指定形式で書き出す

        Args:
            report: 行を1つ以上持つレポート
            formats: csv / json / svg の部分集合

        Returns:
            List[Path]: 書き出したファイル
        """
        if not report.rows:
            raise ConfigError(f"Report {report.metadata.experiment_id} has no rows", field='report')
        selected = parse_formats(formats)
        self._prepare_dir()

        written: List[Path] = []
        try:
            if 'csv' in selected:
                written.append(self.write_csv(report))
            if 'json' in selected:
                written.append(self.write_json(report))
            if 'svg' in selected:
                written.extend(self.write_svg(report))
        except OSError as e:
            self.logger.error(f"Error writing report {report.metadata.experiment_id}: {str(e)}")
            raise ConfigError(f"Cannot write to {self.out_dir}: {str(e)}", field='output.dir') from e

        self.logger.info(f"Wrote {len(written)} file(s) for {report.metadata.experiment_id} to {self.out_dir}")
        return written

    def write_csv(self, report: Report) -> Path:
        path = self._path(report, '.csv')
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            for row in report.rows:
                writer.writerow([row.section, row.item, row.metric, format_number(row.value), row.unit])
        return path

    def write_json(self, report: Report) -> Path:
        path = self._path(report, '.json')
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(report.to_dict(self.include_timestamp), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write('\n')
        return path

    def write_svg(self, report: Report) -> List[Path]:
        paths = []
        for chart in report.charts:
            path = self._path(report, f"_{sanitize_filename(chart.name)}.svg")
            self._render_chart(report, chart, path)
            paths.append(path)
        if not report.charts:
            self.logger.debug(f"Report {report.metadata.experiment_id} defines no charts; SVG skipped")
        return paths

    def _render_chart(self, report: Report, chart: ChartSpec, path: Path):
        rows = report.section(chart.section)
        items: List[str] = []
        values: Dict[str, Dict[str, float]] = {metric: {} for metric in chart.metrics}
        for row in rows:
            if row.metric in values:
                if row.item not in items:
                    items.append(row.item)
                values[row.metric][row.item] = float(row.value)

        positions = np.arange(len(items))
        width = 0.8 / max(len(chart.metrics), 1)
        with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
            fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(items) + 2), 4.0))
            try:
                for index, metric in enumerate(chart.metrics):
                    heights = [values[metric].get(item, 0.0) for item in items]
                    ax.bar(positions + (index - (len(chart.metrics) - 1) / 2) * width, heights, width, label=metric)
                ax.set_xticks(positions)
                ax.set_xticklabels(items, rotation=30, ha='right')
                ax.set_ylabel(chart.ylabel)
                ax.set_title(chart.title)
                if len(chart.metrics) > 1:
                    ax.legend()
                fig.tight_layout()
                fig.savefig(path, format='svg', metadata={'Date': None})
            finally:
                plt.close(fig)


def emit_report(report: Report, formats: Union[str, Iterable[str]], out_dir: Union[str, Path],
                include_timestamp: bool = False) -> List[Path]:
    return ReportWriter(out_dir, include_timestamp=include_timestamp).write(report, formats)
