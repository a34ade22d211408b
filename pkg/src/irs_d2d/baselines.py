"""Benchmark schemes the proposed method is compared against."""

from __future__ import annotations

import numpy as np

from .optimizer import SolveResult, SolverOptions, run
from .system_model import ChannelRealization, DelayReport, SystemConfig
from .task_assignment import Allocation


def partial_no_irs(config: SystemConfig, ch: ChannelRealization,
                   options: SolverOptions = SolverOptions(), trial: int = 0) -> SolveResult:
    """Partial offloading over direct links only: reflected path nulled,
    beamforming block skipped."""
    return run(config, ch.without_irs(), options, trial, irs_opt=False)


def full_offload(config: SystemConfig, ch: ChannelRealization,
                 options: SolverOptions = SolverOptions(), trial: int = 0,
                 use_irs: bool = True) -> SolveResult:
    """All bits offloaded (D_0 = 0); task split over helpers only. The IRS
    stays in the loop by default; use_irs=False drops it."""
    if not use_irs:
        ch = ch.without_irs()
    return run(config, ch, options, trial, irs_opt=use_irs, include_local=False)


def local_only(config: SystemConfig) -> DelayReport:
    """Everything computed at the source: T = C*D/f_0, channel-independent."""
    t = config.C * config.D / config.f[0]
    delays = np.zeros(config.K + 1)
    delays[0] = t
    return DelayReport(per_node_delay=delays, bottleneck=t, trace=[t])


def random_phase(config: SystemConfig, ch: ChannelRealization,
                 options: SolverOptions = SolverOptions(), trial: int = 0) -> SolveResult:
    """Extra (non-paper) baseline: random fixed phases, no beamforming."""
    opts = SolverOptions(epsilon=options.epsilon, max_iter=options.max_iter,
                         num_samples=options.num_samples,
                         phase_tol_rel=options.phase_tol_rel, init_phase="random")
    return run(config, ch, opts, trial, irs_opt=False)


def equal_split(config: SystemConfig, ch: ChannelRealization,
                options: SolverOptions = SolverOptions(), trial: int = 0) -> SolveResult:
    """Extra (non-paper) baseline: uniform task split held fixed."""
    return run(config, ch, options, trial, fixed_assignment=True)


def local_only_alloc(config: SystemConfig) -> Allocation:
    d = np.zeros(config.K + 1)
    d[0] = config.D
    return Allocation(d=d, b=np.zeros(config.K), p=np.zeros(config.K))
