"""Sensing-assisted beamforming for a UAV serving moving ground objects."""

from .config import SimConfig, load_config, parse_config
from .sim import McSummary, SlotRecord, run_monte_carlo, run_scheme

__all__ = ["SimConfig", "load_config", "parse_config", "McSummary", "SlotRecord",
           "run_monte_carlo", "run_scheme"]
__version__ = "0.1.0"
