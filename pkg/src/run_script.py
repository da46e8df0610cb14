import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np
import pytz

from .cost.models import EQ7_LITERAL, EQ7_TEXTBOOK
from .cost.yield_model import (
    compare_2d_3d,
    cost_summary,
    die_area,
    die_cost,
    die_yield,
    dies_per_wafer,
    stack_cost_for_topology,
)
from .experiment import ExperimentConfig, ExperimentKind
from .mapping.models import PipelineSchedule, PipelineTiming, Resource, StageId
from .mapping.partition import compute_share, partition
from .mapping.pipeline import (
    build_pipeline,
    build_reram_stages,
    dram_transfer_time,
    overlapped_delay,
    pipeline_timing,
    stage_kernels,
)
from .noc.evaluation import evaluate_noc, stage_comm_model
from .noc.models import NocEvaluation, Topology, TopologyKind
from .noc.topology import build_topology, mean_ports, port_histogram
from .noc.traffic import gen_traffic, vertical_placement
from .reporting.models import ChartSpec, Report, ReportMetadata
from .reram.crossbar import allocation_table, cells_per_weight
from .reram.endurance import endurance_lifetime_passes, rewrite_count
from .reram.models import MappingPolicy
from .reram.quantization import POST_MVM, PRE_COMPUTE, dequantization_count, level_usage, quantize_block
from .reram.timing import reram_energy
from .systolic.cycles import kernel_energy
from .systolic.shape_sweep import shape_sweep
from .utils import __version__
from .utils.errors import ConfigError
from .utils.logger import StructuredLogger
from .workload.kernels import enumerate_kernels
from .workload.models import PrecisionPlan, TransformerConfig
from .workload.presets import list_datasets

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

FULL_PRECISION_BITS = 16


@dataclass
class EnergyBreakdown:
    """1入力が全層を通過するときのエネルギー (J)"""
    reram: float
    systolic: float
    noc: float

    @property
    def total(self) -> float:
        return self.reram + self.systolic + self.noc

    def share(self, part: str) -> float:
        return 100.0 * getattr(self, part) / self.total if self.total else 0.0


@dataclass
class DesignPoint:
    """ワークロード × トポロジ 1組の評価結果"""
    workload: TransformerConfig
    topology: Topology
    schedule: PipelineSchedule
    timing: PipelineTiming
    noc: NocEvaluation
    energy: EnergyBreakdown

    @property
    def reram_tiles(self) -> int:
        return sum(stage.tiles for stage in self.schedule.reram_stages)

    @property
    def reram_crossbars(self) -> int:
        return sum(stage.crossbars for stage in self.schedule.reram_stages)


class ExperimentRunner:
    """実験の実行を制御するメインクラス"""

    def __init__(self, config: ExperimentConfig, max_workers: int = 4):
        self.config = config
        self.max_workers = max_workers
        self.structured_logger = StructuredLogger(__name__)

    def run(self) -> Report:
        """実験種別に応じた処理を実行"""
        handlers: Dict[ExperimentKind, Callable[[], Report]] = {
            ExperimentKind.SIMULATE: self.run_simulate,
            ExperimentKind.SHAPE_SWEEP: self.run_sweep,
            ExperimentKind.QUANT_SWEEP: self.run_sweep,
            ExperimentKind.NOC_COMPARE: self.run_noc_compare,
            ExperimentKind.COST_COMPARE: self.run_cost_compare,
        }
        experiment_id = self.config.experiment_id
        logger.info(f"Starting experiment {experiment_id}...")
        start_time = time.time()
        success = False

        try:
            report = handlers[self.config.experiment]()
            success = True
            return report
        except Exception as e:
            logger.error(f"Experiment {experiment_id} failed: {str(e)}")
            self.structured_logger.error(
                'experiment failed',
                experiment_id=experiment_id,
                error_type=type(e).__name__,
                error=str(e),
            )
            raise
        finally:
            execution_time = time.time() - start_time
            logger.info(f"Experiment {experiment_id} completed in {execution_time:.2f} seconds")
            self.structured_logger.info(
                'experiment finished',
                experiment_id=experiment_id,
                config_hash=self.config.config_hash,
                success=success,
                elapsed_seconds=round(execution_time, 3),
            )

    def _new_report(self) -> Report:
        return Report(
            experiment=self.config.experiment.value,
            metadata=ReportMetadata(
                experiment_id=self.config.experiment_id,
                config_hash=self.config.config_hash,
                tool_version=__version__,
                seed=self.config.seed,
                timestamp=datetime.now(pytz.utc).isoformat(),
            ),
        )

    def _run_concurrently(self, items: Sequence[T], func: Callable[[T], R],
                          describe: Callable[[T], str] = str) -> List[R]:
        """
        各点を並列に評価し、入力順に並べて返す
        """
        results: List[Optional[R]] = [None] * len(items)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_index = {executor.submit(func, item): index for index, item in enumerate(items)}

            for future in as_completed(future_to_index):
                index = future_to_index[future]
                try:
                    results[index] = future.result()
                except Exception as e:
                    logger.error(f"Error evaluating {describe(items[index])}: {str(e)}")
                    raise
        return [result for result in results if result is not None]

    def _topology(self, kind: TopologyKind) -> Topology:
        hw = self.config.hardware
        return build_topology(kind, params=self.config.noc, tiers=hw.tiers, grid=hw.grid)

    def evaluate_design(self, workload: TransformerConfig, topo: Topology) -> DesignPoint:
        """
        パイプライン構築 → トラフィック生成 → NoC 評価 → エネルギー集計
        """
        hw = self.config.hardware
        noc_params = self.config.noc
        schedule = build_pipeline(workload, hw, comm_model=stage_comm_model(topo, noc_params))
        timing = pipeline_timing(schedule, workload.num_layers, self.config.batch)

        placement = vertical_placement(workload.num_layers, topo, noc_params)
        evaluation = evaluate_noc(topo, gen_traffic(schedule, workload, placement), noc_params)

        layers = workload.num_layers
        reram = sum(
            reram_energy(stage.tiles, stage.compute_delay, hw.reram, stage.dequant_enabled)
            for stage in schedule.reram_stages
        )
        # L2 は ReRAM ステージ上でもシストリックの要素演算として数える
        systolic = sum(
            kernel_energy(kernel, hw.systolic)
            for stage in schedule.stages
            for kernel in stage.kernels
            if stage.resource == Resource.SYSTOLIC or not kernel.is_matmul
        )
        # NoC 評価は常駐ウィンドウ分のトラフィック
        noc = evaluation.total_energy * layers / placement.window
        energy = EnergyBreakdown(
            reram=reram * layers * self.config.batch,
            systolic=systolic * layers * self.config.batch,
            noc=noc * self.config.batch,
        )
        logger.debug(
            f"{workload.name} [{workload.precision.display_name}] on {topo.kind_tag.value}: "
            f"stage time {timing.stage_time:.6g} s, energy {energy.total:.6g} J"
        )
        return DesignPoint(
            workload=workload,
            topology=topo,
            schedule=schedule,
            timing=timing,
            noc=evaluation,
            energy=energy,
        )

    def run_simulate(self) -> Report:
        """
        全パイプラインの評価 (ステージ遅延、演算・エネルギー比率、スループット、レイテンシ)
        """
        cfg = self.config
        workload = cfg.workload
        if cfg.experiment != ExperimentKind.SIMULATE:
            raise ConfigError(f"run_simulate cannot run a {cfg.experiment.value} experiment", field='experiment')

        report = self._new_report()
        topo = self._topology(cfg.noc.topology)
        point = self.evaluate_design(workload, topo)

        for key, value in workload.to_dict().items():
            if isinstance(value, int):
                report.add('workload', workload.name, key, value, '')

        for stage in point.schedule.stages:
            report.add('stages', stage.id.value, 'compute_delay', stage.compute_delay, 's')
            report.add('stages', stage.id.value, 'comm_delay', stage.comm_delay, 's')
            report.add('stages', stage.id.value, 'total_delay', stage.total_delay, 's')
            if stage.resource == Resource.RERAM:
                report.add('stages', stage.id.value, 'crossbars', stage.crossbars, 'crossbars')
                report.add('stages', stage.id.value, 'tiles', stage.tiles, 'tiles')
                report.add('stages', stage.id.value, 'cores', stage.cores, 'cores')
                report.add('stages', stage.id.value, 'duplication', stage.duplication, 'copies')

        split = partition(enumerate_kernels(workload))
        report.add('ops', Resource.RERAM.value, 'ops', split.mm_reram, 'ops')
        report.add('ops', Resource.SYSTOLIC.value, 'ops', split.mm_systolic, 'ops')
        report.add('ops', Resource.RERAM.value, 'share', split.reram_share_pct, '%')
        report.add('ops', Resource.SYSTOLIC.value, 'share', 100.0 - split.reram_share_pct, '%')

        share = compute_share(workload)
        report.add('compute_share', 'ReRAM/Systolic', 'exact_ratio', share['exact_ratio'], 'x')
        report.add('compute_share', 'ReRAM/Systolic', 'approx_ratio', share['approx_ratio'], 'x')
        report.add('compute_share', 'ReRAM/Systolic', 'reram_share', share['reram_share_pct'], '%')

        energy = point.energy
        for item, part in ((Resource.RERAM.value, 'reram'), (Resource.SYSTOLIC.value, 'systolic'), ('NoC', 'noc')):
            report.add('energy', item, 'energy', getattr(energy, part), 'J')
            report.add('energy', item, 'share', energy.share(part), '%')
        report.add('energy', 'total', 'energy', energy.total, 'J')

        timing = point.timing
        report.add('performance', 'pipeline', 'stage_time', timing.stage_time, 's')
        report.add('performance', 'pipeline', 'throughput', timing.throughput, '1/s')
        report.add('performance', 'pipeline', 'end_to_end_latency', timing.end_to_end_latency, 's')
        report.add('performance', 'pipeline', 'sequential_latency', timing.sequential_latency, 's')
        report.add('performance', 'pipeline', 'depth', timing.depth, 'stages')
        report.add('performance', 'pipeline', 'dram_load_delay', point.schedule.dram_load_delay, 's')

        self._add_noc_rows(report, point.noc)

        for allocation in allocation_table(workload, cfg.hardware.reram):
            report.add('allocation', allocation.matrix, 'weight_bits', allocation.weight_bits, 'bit')
            report.add('allocation', allocation.matrix, 'crossbars', allocation.crossbars, 'crossbars')
            report.add('allocation', allocation.matrix, 'tiles', allocation.tiles, 'tiles')
            report.add('allocation', allocation.matrix, 'cores', allocation.cores, 'cores')

        rewrites = rewrite_count(workload, MappingPolicy.ALL_ON_RERAM, tile=cfg.hardware.reram)
        report.add('endurance', MappingPolicy.ALL_ON_RERAM.value, 'rewrites', rewrites, 'row writes')
        if rewrites:
            report.add('endurance', MappingPolicy.ALL_ON_RERAM.value, 'lifetime_passes',
                       endurance_lifetime_passes(rewrites, cfg.hardware.reram.endurance_writes), 'passes')
        report.add('endurance', MappingPolicy.ATLEUS_HETEROGENEOUS.value, 'rewrites',
                   rewrite_count(workload, MappingPolicy.ATLEUS_HETEROGENEOUS), 'row writes')

        for dataset in list_datasets():
            report.add('datasets', dataset.name, 'samples', dataset.samples, 'samples')

        report.charts.extend([
            ChartSpec('stage_delays', 'Per-stage delay', 'stages', ('compute_delay', 'comm_delay'), 's'),
            ChartSpec('ops_breakdown', 'Operation share', 'ops', ('share',), '%'),
            ChartSpec('energy_breakdown', 'Energy share', 'energy', ('share',), '%'),
        ])
        logger.info(
            f"Simulated {workload.name}: throughput {timing.throughput:.6g}/s, "
            f"ReRAM op share {split.reram_share_pct:.2f}%, ReRAM energy share {energy.share('reram'):.2f}%"
        )
        return report

    def _add_noc_rows(self, report: Report, evaluation: NocEvaluation):
        item = evaluation.topology.value
        report.add('noc', item, 'energy', evaluation.total_energy, 'J')
        report.add('noc', item, 'delay', evaluation.total_delay, 's')
        report.add('noc', item, 'edp', evaluation.edp, 'J*s')
        report.add('noc', item, 'area', evaluation.noc_area_mm2, 'mm2')
        report.add('noc', item, 'hops', evaluation.total_hops, 'hops')

    def run_sweep(self) -> Report:
        """シストリック形状 / 量子化精度のスイープ"""
        if self.config.experiment == ExperimentKind.SHAPE_SWEEP:
            return self._run_shape_sweep()
        if self.config.experiment == ExperimentKind.QUANT_SWEEP:
            return self._run_quant_sweep()
        raise ConfigError(f"run_sweep cannot run a {self.config.experiment.value} experiment", field='experiment')

    def _run_shape_sweep(self) -> Report:
        cfg = self.config
        hw = cfg.hardware
        workload = cfg.workload
        if not cfg.sweep.shapes:
            raise ConfigError("Sweep axis 'shapes' is empty", field='sweep.shapes')

        reram_delay = max(stage.compute_delay for stage in build_reram_stages(workload, hw).values())
        load = dram_transfer_time(workload.lora_param_bytes, hw)
        candidates = [replace(hw.systolic, rows=rows, cols=cols) for rows, cols in cfg.sweep.shapes]
        ranked = shape_sweep(
            stage_kernels(workload)[StageId.S2],
            candidates,
            reram_delay,
            extra_delay=lambda compute: overlapped_delay(compute, load, hw.lora_load_overlap),
            rank_by=cfg.sweep.rank_by,
        )

        report = self._new_report()
        report.add('shape_sweep', 'ReRAM', 'stage_delay', reram_delay, 's')
        for row in sorted(ranked, key=lambda r: cfg.sweep.shapes.index((r.config.rows, r.config.cols))):
            report.add('shape_sweep', row.label, 'pes', row.pes, 'PEs')
            report.add('shape_sweep', row.label, 'normalized_delay', row.cumulative_delay, 'x')
            report.add('shape_sweep', row.label, 'mean_utilization', row.mean_utilization, 'ratio')
            report.add('shape_sweep', row.label, 'feasible', row.feasible, '')
            report.add('shape_sweep', row.label, 'rank', row.rank, '')
            for kernel, delay in row.kernel_delays.items():
                report.add('shape_sweep_kernels', row.label, kernel, delay, 'x')

        report.charts.append(ChartSpec(
            'shape_sweep', f"Systolic shapes on {workload.name}", 'shape_sweep',
            ('normalized_delay', 'mean_utilization'), 'normalized to ReRAM stage',
        ))
        best = ranked[0]
        logger.info(f"Shape sweep on {workload.name}: best {best.label} (feasible={best.feasible})")
        return report

    def _quant_point(self, plan: PrecisionPlan) -> DesignPoint:
        workload = replace(self.config.workload, precision=plan)
        return self.evaluate_design(workload, self._topology(self.config.noc.topology))

    def _run_quant_sweep(self) -> Report:
        cfg = self.config
        tile = cfg.hardware.reram
        if not cfg.sweep.precisions:
            raise ConfigError("Sweep axis 'precisions' is empty", field='sweep.precisions')

        activation_bits = cfg.workload.precision.activation_bits
        plans = [PrecisionPlan.parse(name, activation_bits=activation_bits) for name in cfg.sweep.precisions]
        baseline = PrecisionPlan(activation_bits=activation_bits)
        evaluated = plans if baseline in plans else [baseline] + plans
        points = self._run_concurrently(evaluated, self._quant_point, describe=lambda p: p.display_name)
        by_plan = dict(zip(evaluated, points))
        base_energy = by_plan[baseline].energy.total

        report = self._new_report()
        bits_axis: List[float] = []
        energy_axis: List[float] = []
        for plan in plans:
            point = by_plan[plan]
            item = plan.display_name
            table = allocation_table(point.workload, tile)
            bits_normalized = (
                sum(a.rows * a.cols * a.weight_bits for a in table)
                / sum(a.rows * a.cols * FULL_PRECISION_BITS for a in table)
            )
            quantized = [a for a in table if a.weight_bits < FULL_PRECISION_BITS]
            normalized = point.energy.total / base_energy
            bits_axis.append(bits_normalized)
            energy_axis.append(normalized)

            report.add('quant', item, 'energy', point.energy.total, 'J')
            report.add('quant', item, 'normalized_energy', normalized, 'x')
            report.add('quant', item, 'reram_energy', point.energy.reram, 'J')
            report.add('quant', item, 'noc_energy', point.energy.noc, 'J')
            report.add('quant', item, 'bits_normalized', bits_normalized, 'x')
            report.add('quant', item, 'crossbars', point.reram_crossbars, 'crossbars')
            report.add('quant', item, 'tiles', point.reram_tiles, 'tiles')
            report.add('quant', item, 'stage_time', point.timing.stage_time, 's')
            report.add('quant', item, 'dequant_post_mvm', sum(
                dequantization_count(a.rows, a.cols, a.weight_bits, tile, POST_MVM) for a in quantized), 'ops')
            report.add('quant', item, 'dequant_pre_compute', sum(
                dequantization_count(a.rows, a.cols, a.weight_bits, tile, PRE_COMPUTE) for a in quantized), 'ops')

        if len(set(bits_axis)) >= 2:
            alpha, beta = np.polyfit(bits_axis, energy_axis, 1)
            report.add('quant_fit', 'energy_vs_bits', 'alpha', float(alpha), 'x')
            report.add('quant_fit', 'energy_vs_bits', 'beta', float(beta), 'x')
        else:
            logger.debug("Quantization sweep has fewer than two bit widths; trend fit skipped")

        weight_bits = sorted({bits for plan in plans for bits in (plan.mha_bits, plan.ff_bits)})
        for bits, usage in zip(weight_bits, self._level_usage(weight_bits)):
            report.add('level_usage', f"{bits}-bit", 'fraction', usage, 'ratio')

        report.charts.append(ChartSpec(
            'quant_energy', 'Energy by precision plan', 'quant', ('normalized_energy', 'bits_normalized'),
            'normalized to 16-bit',
        ))
        logger.info(f"Quantization sweep over {len(plans)} plans on {cfg.workload.name} finished")
        return report

    def _level_usage(self, weight_bits: Sequence[int]) -> List[float]:
        """
        ガウス重みのクロスバーブロックで使われる整数レベルの割合 (シード固定)
        """
        tile = self.config.hardware.reram
        rng = np.random.default_rng(self.config.seed)
        usages = []
        for bits in weight_bits:
            cols = tile.xbar_cols // cells_per_weight(bits, tile)
            blocks = [
                level_usage(quantize_block(rng.standard_normal((tile.xbar_rows, cols)), bits))
                for _ in range(self.config.sweep.level_usage_blocks)
            ]
            usages.append(float(np.mean(blocks)))
        return usages

    def _noc_point(self, kind: TopologyKind) -> Dict[str, Any]:
        cfg = self.config
        topo = self._topology(kind)
        return {
            'topology': topo,
            'point': self.evaluate_design(cfg.workload, topo),
            'stack': stack_cost_for_topology(topo, cfg.noc, cfg.hardware, cfg.cost),
        }

    def run_noc_compare(self) -> Report:
        """
        トポロジ比較 (EDP / 面積 / コストを基準トポロジで正規化)
        """
        cfg = self.config
        kinds = list(cfg.noc_compare)
        if not kinds:
            raise ConfigError("No topologies to compare", field='noc.compare')
        if cfg.noc_baseline not in kinds:
            raise ConfigError(f"Baseline {cfg.noc_baseline.value} is not among the compared topologies",
                              field='noc.baseline')

        results = self._run_concurrently(kinds, self._noc_point, describe=lambda k: k.value)
        by_kind = dict(zip(kinds, results))
        base = by_kind[cfg.noc_baseline]['point'].noc
        costs = cost_summary({k.value: r['stack'] for k, r in by_kind.items()}, cfg.noc_baseline.value)

        report = self._new_report()
        port_counts = set()
        for kind in kinds:
            topo = by_kind[kind]['topology']
            evaluation = by_kind[kind]['point'].noc
            self._add_noc_rows(report, evaluation)
            report.add('noc', kind.value, 'mean_ports', mean_ports(topo), 'ports')
            report.add('noc', kind.value, 'cost_3d', by_kind[kind]['stack'].cost_3d, 'wafer cost')
            report.add('noc', kind.value, 'normalized_edp', evaluation.edp / base.edp, 'x')
            report.add('noc', kind.value, 'normalized_area', evaluation.noc_area_mm2 / base.noc_area_mm2, 'x')
            report.add('noc', kind.value, 'normalized_cost', costs[kind.value], 'x')
            histogram = port_histogram(topo)
            port_counts.update(histogram)
            for ports, routers in histogram.items():
                report.add('noc_ports', kind.value, f"{ports}_ports", routers, 'routers')

        report.charts.extend([
            ChartSpec('noc_normalized', f"Normalized to {cfg.noc_baseline.value}", 'noc',
                      ('normalized_edp', 'normalized_area', 'normalized_cost'), 'x'),
            ChartSpec('noc_ports', 'Router port distribution', 'noc_ports',
                      tuple(f"{ports}_ports" for ports in sorted(port_counts)), 'routers'),
        ])
        logger.info(f"Compared {len(kinds)} NoC topologies against {cfg.noc_baseline.value}")
        return report

    def run_cost_compare(self) -> Report:
        """2D 単一ダイと 3D スタックのコスト比較、トポロジごとの tier コスト"""
        cfg = self.config
        tier_area = cfg.cost_tier_area_mm2
        tiers = cfg.cost_tiers
        report = self._new_report()

        for variant in (EQ7_LITERAL, EQ7_TEXTBOOK):
            params = replace(cfg.cost, eq7_variant=variant)
            comparison = compare_2d_3d(params, tier_area_mm2=tier_area, tiers=tiers)
            report.add('cost_2d_3d', variant, 'cost_2d', comparison.cost_2d, 'wafer cost')
            report.add('cost_2d_3d', variant, 'cost_3d', comparison.cost_3d, 'wafer cost')
            report.add('cost_2d_3d', variant, 'ratio', comparison.ratio, 'x')
            stacked = compare_2d_3d(params, tier_area_mm2=tier_area, tiers=tiers, include_stacking=True)
            report.add('cost_2d_3d', variant, 'ratio_with_stacking', stacked.ratio, 'x')

        for area in (tier_area, tier_area * tiers):
            item = f"{area:g} mm2"
            report.add('die', item, 'dies_per_wafer', dies_per_wafer(area, cfg.cost), 'dies')
            report.add('die', item, 'yield', die_yield(area, cfg.cost), 'ratio')
            report.add('die', item, 'die_cost', die_cost(area, cfg.cost), 'wafer cost')

        stacks = {}
        for kind in cfg.noc_compare:
            stack = stack_cost_for_topology(self._topology(kind), cfg.noc, cfg.hardware, cfg.cost)
            stacks[kind.value] = stack
            for tier, (die, cost) in enumerate(zip(stack.dies, stack.tier_costs)):
                item = f"{kind.value}/tier{tier}"
                report.add('tier_cost', item, 'die_area', die_area(die), 'mm2')
                report.add('tier_cost', item, 'die_cost', cost, 'wafer cost')
        if stacks and cfg.noc_baseline.value in stacks:
            for name, ratio in cost_summary(stacks, cfg.noc_baseline.value).items():
                report.add('stack_cost', name, 'cost_3d', stacks[name].cost_3d, 'wafer cost')
                report.add('stack_cost', name, 'normalized_cost', ratio, 'x')

        report.charts.append(ChartSpec('cost_2d_3d', '2D vs 3D die cost', 'cost_2d_3d',
                                       ('cost_2d', 'cost_3d'), 'wafer cost'))
        logger.info(f"Cost comparison for {tiers} x {tier_area:g} mm2 finished")
        return report


def run_experiment(config: ExperimentConfig, max_workers: int = 4) -> Report:
    return ExperimentRunner(config, max_workers=max_workers).run()
