"""Robust world-model learning with an auto-tuned adversary.

Thin python facade over the compiled `_lira` core: environments, disturbance
generators, robust-score statistics, and the train/eval harness.
"""

from ._lira import (
    Env,
    NoiseGen,
    aggregate_models,
    combined_metric,
    default_config,
    evaluate,
    iqm,
    train,
)

__all__ = [
    "Env",
    "NoiseGen",
    "aggregate_models",
    "combined_metric",
    "default_config",
    "evaluate",
    "iqm",
    "train",
]
