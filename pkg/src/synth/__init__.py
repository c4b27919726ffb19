"""
Модуль синтетических данных: сценарии, рендер глубины и эталона,
деградация эталона в выход детекторов.
"""

from .scenario import (
    SynthError,
    AgentOutsideFrustum,
    Agent,
    SynthScenario,
    default_intrinsics,
    default_scenario,
    dump_scenario,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .renderer import RenderedFrame, SynthSequence, camera_rays, check_frustum, render_frame, render_scenario
from .degrader import DegraderConfig, complementary_presets, degrade, degrade_detections
from .export import write_bundle

__all__ = [
    "SynthError",
    "AgentOutsideFrustum",
    "Agent",
    "SynthScenario",
    "default_intrinsics",
    "default_scenario",
    "dump_scenario",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "RenderedFrame",
    "SynthSequence",
    "camera_rays",
    "check_frustum",
    "render_frame",
    "render_scenario",
    "DegraderConfig",
    "complementary_presets",
    "degrade",
    "degrade_detections",
    "write_bundle",
]
