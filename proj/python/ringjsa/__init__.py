"""Ring-resonator biphoton JSA simulation and reconstruction.

Configs are plain dicts with the same keys as the CLI's JSON files; missing
keys take the reference-device defaults.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    NumericalError,
    fidelity_complex,
    fidelity_intensity,
    fit_fringe_point,
    read_jsa,
    schmidt_number,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "campaign_truth",
    "default_config",
    "dense_truth",
    "fidelity_complex",
    "fidelity_intensity",
    "field_enhancement",
    "fit_fringe_point",
    "read_jsa",
    "reconstruct",
    "report",
    "schmidt_number",
    "simulate",
    "synthesize",
    "through_transfer",
]


def _text(config):
    return "" if config is None else json.dumps(config)


def default_config():
    return json.loads(_core.default_config())


def field_enhancement(omega, band="signal", config=None):
    return _core.field_enhancement(list(omega), band, _text(config))


def through_transfer(omega, band="signal", config=None):
    return _core.through_transfer(list(omega), band, _text(config))


def campaign_truth(config=None):
    return _core.campaign_truth(_text(config))


def dense_truth(config=None):
    return _core.dense_truth(_text(config))


def simulate(out_dir, config=None):
    return json.loads(_core.simulate(_text(config), str(out_dir)))


def synthesize(truth_dir, out_dir, config=None):
    return json.loads(_core.synthesize(_text(config), str(truth_dir), str(out_dir)))


def reconstruct(measurement_dir, out_dir):
    return json.loads(_core.reconstruct(str(measurement_dir), str(out_dir)))


def report(result_dir, truth_dir=None, trials=200, seed=42):
    return json.loads(_core.report(str(result_dir), "" if truth_dir is None else str(truth_dir), trials, seed))
