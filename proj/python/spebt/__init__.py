"""Radar odometry and position-aided beam tracking."""

from ._spebt import (
    ConfigError,
    IoError,
    NumericError,
    config_hash,
    default_config,
    evaluate_poses,
    monte_carlo,
    run,
    simulate_trajectory,
    track,
)

__all__ = [
    "ConfigError",
    "IoError",
    "NumericError",
    "config_hash",
    "default_config",
    "evaluate_poses",
    "monte_carlo",
    "run",
    "simulate_trajectory",
    "track",
]
