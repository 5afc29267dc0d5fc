"""Effective capacity of a multichannel cognitive radio link under
buffer-QoS and average-interference constraints, with a Monte Carlo
cross-check of every analytic quantity."""
from ._backend import BACKEND
from .fading import Nakagami, Rayleigh, make_model
from .optimizer import (
    EffCapResult,
    PowerPolicy,
    SystemParams,
    baseline_params,
    effective_capacity,
    optimal_effective_capacity,
    solve_lambda,
)
from .sensing import SensingParams, SensingPerformance, detector_performance
from .simulator import estimate_effective_capacity_mc, simulate_frames, simulate_queue

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EffCapResult",
    "Nakagami",
    "PowerPolicy",
    "Rayleigh",
    "SensingParams",
    "SensingPerformance",
    "SystemParams",
    "baseline_params",
    "detector_performance",
    "effective_capacity",
    "estimate_effective_capacity_mc",
    "make_model",
    "optimal_effective_capacity",
    "simulate_frames",
    "simulate_queue",
    "solve_lambda",
]
