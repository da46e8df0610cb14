# tests/test_shape_sweep.py
from dataclasses import replace

import pytest

from src.mapping.models import StageId
from src.mapping.pipeline import build_reram_stages, dram_transfer_time, overlapped_delay, stage_kernels
from src.systolic.models import SystolicConfig
from src.systolic.shape_sweep import RANK_BY_DELAY, RANK_BY_UTILIZATION, shape_sweep
from src.utils.errors import ConfigError
from src.workload.models import KernelClass, KernelId, KernelInstance, Product

SHAPES = [(32, 32), (64, 32), (128, 32), (64, 64), (128, 16), (256, 16)]


@pytest.fixture
def bert_sweep_inputs(bert, hw):
    reram_delay = max(stage.compute_delay for stage in build_reram_stages(bert, hw).values())
    load = dram_transfer_time(bert.lora_param_bytes, hw)
    candidates = [replace(hw.systolic, rows=r, cols=c) for r, c in SHAPES]
    extra = lambda compute: overlapped_delay(compute, load, hw.lora_load_overlap)  # noqa: E731
    return stage_kernels(bert)[StageId.S2], candidates, reram_delay, extra


def test_bert_reram_stage_delay(bert, hw):
    # 512 ベクトル × 16 ビット + 4 段 @ 12.5 MHz
    stages = build_reram_stages(bert, hw)
    assert stages[StageId.S1].compute_delay == pytest.approx(655.68e-6)


def test_bert_shape_sweep_feasibility(bert_sweep_inputs):
    kernels, candidates, reram_delay, extra = bert_sweep_inputs
    rows = {row.label: row for row in shape_sweep(kernels, candidates, reram_delay, extra_delay=extra)}

    for row in rows.values():
        if row.pes in (1024, 2048):
            assert not row.feasible, row.label
    assert any(row.feasible for row in rows.values() if row.pes == 4096)
    assert rows["128x32"].feasible
    assert rows["64x64"].feasible
    assert not rows["256x16"].feasible
    assert rows["128x32"].cumulative_delay == pytest.approx(476080 / 800e6 / 655.68e-6, rel=1e-6)
    assert rows["64x32"].cumulative_delay == pytest.approx(1.171, abs=1e-3)


def test_bert_shape_sweep_ranks_128x32_first(bert_sweep_inputs):
    kernels, candidates, reram_delay, extra = bert_sweep_inputs
    ranked = shape_sweep(kernels, candidates, reram_delay, extra_delay=extra, rank_by=RANK_BY_UTILIZATION)
    assert ranked[0].label == "128x32"
    assert ranked[0].rank == 1
    assert ranked[0].mean_utilization > ranked[1].mean_utilization
    four_k = [row for row in ranked if row.pes == 4096]
    assert four_k[0].label == "128x32"


def test_rank_by_delay(bert_sweep_inputs):
    kernels, candidates, reram_delay, extra = bert_sweep_inputs
    ranked = shape_sweep(kernels, candidates, reram_delay, extra_delay=extra, rank_by=RANK_BY_DELAY)
    assert ranked[0].label == "64x64"
    assert [row.rank for row in ranked] == list(range(1, len(SHAPES) + 1))


def test_default_ranking_is_by_delay(bert_sweep_inputs):
    kernels, candidates, reram_delay, extra = bert_sweep_inputs
    by_default = shape_sweep(kernels, candidates, reram_delay, extra_delay=extra)
    by_delay = shape_sweep(kernels, candidates, reram_delay, extra_delay=extra, rank_by=RANK_BY_DELAY)
    assert [row.label for row in by_default] == [row.label for row in by_delay]


def _square_kernel(size):
    return KernelInstance(
        id=KernelId.MHA2, layer_index=0, operand_dims=(size, size, size), macs=size ** 3,
        kernel_class=KernelClass.DYNAMIC_MM, products=(Product(size, size, size),),
    )


def test_square_kernel_prefers_square_array():
    # 正方カーネルでは長方形アレイの利点がない
    candidates = [SystolicConfig(rows=r, cols=c) for r, c in SHAPES]
    ranked = shape_sweep([_square_kernel(4096)], candidates, reram_stage_delay=1.0)
    assert all(row.feasible for row in ranked)
    assert ranked[0].label == "64x64"
    rows = {row.label: row for row in ranked}
    assert rows["64x64"].cumulative_delay < rows["128x32"].cumulative_delay < rows["256x16"].cumulative_delay

    pair = shape_sweep([_square_kernel(4096)], [SystolicConfig(128, 32), SystolicConfig(64, 64)], reram_stage_delay=1.0)
    assert [row.label for row in pair] == ["64x64", "128x32"]

    # 利用率順では PE 数の少ない 32x32 が先頭になる
    by_utilization = shape_sweep([_square_kernel(4096)], candidates, reram_stage_delay=1.0,
                                 rank_by=RANK_BY_UTILIZATION)
    assert by_utilization[0].label == "32x32"


def test_degenerate_single_kernel():
    kernel = KernelInstance(
        id=KernelId.MHA2, layer_index=0, operand_dims=(1, 1, 1), macs=1,
        kernel_class=KernelClass.DYNAMIC_MM, products=(Product(1, 1, 1),),
    )
    candidates = [SystolicConfig(rows=2, cols=2), SystolicConfig(rows=1, cols=1)]
    ranked = shape_sweep([kernel], candidates, reram_stage_delay=1.0, rank_by=RANK_BY_UTILIZATION)
    assert all(row.feasible for row in ranked)
    assert ranked[0].label == "1x1"
    assert ranked[0].mean_utilization == pytest.approx(0.5)


def test_kernel_delays_keyed_by_label(bert_sweep_inputs):
    kernels, candidates, reram_delay, extra = bert_sweep_inputs
    row = shape_sweep(kernels, candidates[:1], reram_delay, extra_delay=extra)[0]
    assert set(row.kernel_delays) == {"MHA2", "MHA3", "L1", "LoRA_Fwd:W_Q", "LoRA_Fwd:W_V",
                                      "LoRA_Bwd:W_Q", "LoRA_Bwd:W_V"}


def test_sweep_validation():
    cfg = SystolicConfig(rows=4, cols=4)
    with pytest.raises(ConfigError):
        shape_sweep([], [], reram_stage_delay=1.0)
    with pytest.raises(ConfigError):
        shape_sweep([], [cfg, SystolicConfig(rows=4, cols=4, clock_hz=1e9)], reram_stage_delay=1.0)
    with pytest.raises(ConfigError):
        shape_sweep([], [cfg], reram_stage_delay=0.0)
    with pytest.raises(ConfigError):
        shape_sweep([], [cfg], reram_stage_delay=1.0, rank_by="area")
