"""
Сквозная проверка на синтетике: фьюжн источников с взаимодополняющими
выпадениями против каждого источника по отдельности.
"""

import pytest

from src.metrics import TaskSetting
from src.pipeline import sweep_eval
from src.synth import complementary_presets, default_scenario, degrade, render_scenario


# Ложные срабатывания в стороне от полос агентов (|x| <= 2.85 м)
FP_AREA = (4.0, 4.0, 6.0, 14.0)


@pytest.mark.parametrize("seed", range(10))
def test_fusion_trades_false_positives_for_coverage(seed):
    sequence = render_scenario(default_scenario(seed=seed))
    gt = sequence.gt_tracks
    sources = {cfg.source_id: degrade(gt, cfg, area=FP_AREA) for cfg in complementary_presets(4, block=3, seed=seed)}

    rows = sweep_eval(sources, sequence.annotations, settings=(TaskSetting.ALL,))
    singles = rows[rows["size"] == 1]
    fused = rows[rows["size"] == 4].iloc[0]

    assert len(singles) == 4
    assert fused["FN"] < singles["FN"].min()
    assert fused["MT"] >= singles["MT"].max()
    assert fused["FP"] >= singles["FP"].max()
