import argparse
import logging
import sys
from typing import List, Optional

from .experiment import ExperimentKind, load_experiment_config
from .reporting.writer import emit_report
from .run_script import ExperimentRunner
from .utils.errors import SimulatorError
from .utils.logger import setup_logger

logger = logging.getLogger(__name__)

SWEEP_AXES = {
    'shape': ExperimentKind.SHAPE_SWEEP,
    'quant': ExperimentKind.QUANT_SWEEP,
}


def build_parser() -> argparse.ArgumentParser:
    """コマンドライン引数の定義"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='YAML experiment config layered over the packaged defaults')
    common.add_argument('--preset', help='workload preset name (e.g. gpt2-medium)')
    common.add_argument('--out', help='output directory')
    common.add_argument('--format', dest='formats', help='comma-separated subset of csv,json,svg')
    common.add_argument('--seed', type=int, help='seed for randomized properties')
    common.add_argument('--profile', help='hardware profile in hardware.yaml')
    common.add_argument('--workers', type=int, default=4, help='concurrent sweep points')
    common.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    common.add_argument('--log-file', help='also write JSON logs to this file')

    parser = argparse.ArgumentParser(
        prog='stacked-pim-sim',
        description='Design-space simulator for a 3D ReRAM + systolic transformer accelerator',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    subparsers.add_parser('simulate', parents=[common], help='run the full pipeline on one workload')

    sweep = subparsers.add_parser('sweep', parents=[common], help='systolic shape or precision sweep')
    sweep.add_argument('--axis', required=True, choices=sorted(SWEEP_AXES))

    noc = subparsers.add_parser('noc', parents=[common], help='compare NoC topologies')
    noc.add_argument('--compare', action='store_true', required=True)

    cost = subparsers.add_parser('cost', parents=[common], help='2D vs 3D fabrication cost')
    cost.add_argument('--compare-2d', dest='compare_2d', action='store_true', required=True)

    return parser


def experiment_kind(args: argparse.Namespace) -> ExperimentKind:
    if args.command == 'simulate':
        return ExperimentKind.SIMULATE
    if args.command == 'sweep':
        return SWEEP_AXES[args.axis]
    if args.command == 'noc':
        return ExperimentKind.NOC_COMPARE
    return ExperimentKind.COST_COMPARE


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI エントリポイント

    Returns:
        int: 0 成功 / 2 設定エラー / 3 実行不能なステージ / 1 その他
    """
    args = build_parser().parse_args(argv)
    setup_logger(level=args.log_level, log_file=args.log_file)

    try:
        config = load_experiment_config(
            config_path=args.config,
            experiment=experiment_kind(args).value,
            preset=args.preset,
            out=args.out,
            formats=args.formats,
            seed=args.seed,
            profile=args.profile,
        )
        report = ExperimentRunner(config, max_workers=args.workers).run()
        paths = emit_report(
            report,
            config.output.formats,
            config.output.dir,
            include_timestamp=config.output.include_timestamp,
        )
        for path in paths:
            logger.info(f"Wrote {path}")
        return 0

    except SimulatorError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
