"""Python bindings for the uavmec solver.

Configs are plain dicts using the same keys as the JSON config files.
"""
import json as _json

from . import _uavmec
from ._uavmec import ConfigError, SolveError, lambert_w0, baseline_names

__all__ = ["ConfigError", "SolveError", "lambert_w0", "baseline_names", "config", "solve",
           "run_baseline", "check_feasibility"]


def _dump(cfg):
    return "" if cfg is None else _json.dumps(cfg)


def config(overrides=None):
    """Reference scenario with overrides applied, fully expanded."""
    return _json.loads(_uavmec.config_json(_dump(overrides)))


def solve(cfg=None, max_outer=None):
    return _uavmec.run(_dump(cfg), "proposed", max_outer)


def run_baseline(kind, cfg=None, max_outer=None):
    return _uavmec.run(_dump(cfg), kind, max_outer)


def check_feasibility(cfg, run):
    """(tec, violations) of a run's arrays re-checked against cfg."""
    return _uavmec.check_feasibility(_dump(cfg), run.local, run.ue_offload, run.uav_compute,
                                     run.uav_offload, run.ue_link, run.uav_link, run.trajectory)
