"""Python bindings for the zkmixer simulator."""

import json
from fractions import Fraction

from ._zkmixer import (
    Session,
    ZkMixerError,
    commitment,
    hash2,
    list_scenarios,
    merkle_root,
    scenario_source,
)
from . import _zkmixer

__all__ = [
    "Session",
    "ZkMixerError",
    "commitment",
    "compute_delay",
    "gas_report",
    "hash2",
    "list_scenarios",
    "merkle_root",
    "random_scenario",
    "run_scenario",
    "scenario_source",
]


def compute_delay(shape, count, average, min_delay, max_delay=None):
    """Lock time for `count` deposits against a moving `average` (int or Fraction)."""
    avg = Fraction(average)
    kwargs = {} if max_delay is None else {"max_delay": max_delay}
    return _zkmixer.compute_delay(shape, count, avg.numerator, min_delay, avg.denominator, **kwargs)


def run_scenario(scenario, seed=None):
    """Run a bundled scenario name, a file path, or inline JSON text; returns the report dict."""
    if isinstance(scenario, dict):
        scenario = json.dumps(scenario)
    return json.loads(_zkmixer.run_scenario_json(scenario, seed))


def random_scenario(seed):
    return json.loads(_zkmixer.random_scenario_json(seed))


def gas_report():
    return json.loads(_zkmixer.gas_report_json())
