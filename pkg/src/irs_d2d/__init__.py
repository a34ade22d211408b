"""Min-max computing-delay optimization for IRS-assisted D2D cooperative
computing: closed-form task assignment, convex power/bandwidth allocation,
and SDR-based passive beamforming inside an alternating loop."""

from .baselines import full_offload, local_only, partial_no_irs
from .optimizer import SolveResult, SolverOptions, initialize, run
from .system_model import (ChannelRealization, ConstraintViolation, DelayReport,
                           InfeasibleError, PhaseProfile, SystemConfig,
                           effective_gain, effective_gains, generate_channel,
                           local_delay, offload_delay, rate, total_delay)
from .task_assignment import Allocation, lp_oracle, optimal_assignment

__version__ = "0.1.0"

__all__ = [
    "Allocation", "ChannelRealization", "ConstraintViolation", "DelayReport",
    "InfeasibleError", "PhaseProfile", "SolveResult", "SolverOptions",
    "SystemConfig", "effective_gain", "effective_gains", "full_offload",
    "generate_channel", "initialize", "local_delay", "local_only",
    "lp_oracle", "offload_delay", "optimal_assignment", "partial_no_irs",
    "rate", "run", "total_delay",
]
