"""Swarm-based multiuser detection for DS-CDMA uplinks."""

import json

from ._core import (
    ConfigError,
    Constellation,
    __version__,
    min_trials,
    population_size,
    scenario_names,
    sigmoid,
    sub_ber_bpsk,
    sub_ser,
    sub_ser_mgf,
)
from . import _core


def scenario(name="", **overrides):
    """Built-in scenario `name` with nested overrides, as a dict."""
    return json.loads(_core.scenario_json(name, json.dumps(overrides) if overrides else ""))


def run(name="", jobs=1, shards=0, **overrides):
    """Run a scenario and return per-point error statistics."""
    report = _core.run_scenario(name, json.dumps(overrides) if overrides else "", jobs, shards)
    report["scenario"] = json.loads(report["scenario"])
    return report


__all__ = [
    "ConfigError",
    "Constellation",
    "__version__",
    "min_trials",
    "population_size",
    "run",
    "scenario",
    "scenario_names",
    "sigmoid",
    "sub_ber_bpsk",
    "sub_ser",
    "sub_ser_mgf",
]
