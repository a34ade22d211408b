"""Closed-form optimal task split plus a bisection oracle for verification.

With rates fixed, the task-assignment subproblem is a min-max LP whose
optimum equalizes the active per-node delays. The closed form uses the
per-node throughputs x_0 = f_0/C and x_k = 1/(1/R_k + C/f_k); helpers with
zero rate get x_k = 0 so they receive no bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system_model import SystemConfig


@dataclass(frozen=True)
class Allocation:
    """Task split d (length K+1, index 0 local), bandwidth fractions b and
    transmit powers p (length K)."""

    d: np.ndarray
    b: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        b = np.asarray(self.b, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if d.shape[0] != b.shape[0] + 1 or b.shape != p.shape:
            raise ValueError("allocation vector lengths inconsistent")
        for a in (d, b, p):
            a.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "p", p)

    def validate(self, config: SystemConfig, tol: float = 1e-9):
        if abs(self.d.sum() - config.D) > tol * config.D:
            raise ValueError("sum(d) != D")
        if (self.d < -tol * config.D).any():
            raise ValueError("negative task bits")
        if self.b.sum() > 1 + tol or (self.b < -tol).any():
            raise ValueError("bandwidth fractions invalid")
        if self.p.sum() > config.Pmax * (1 + tol) or (self.p < -tol * config.Pmax).any():
            raise ValueError("powers invalid")


def _throughputs(rates: np.ndarray, config: SystemConfig, include_local: bool) -> np.ndarray:
    """x_0 = f_0/C, x_k = 1/(1/R_k + C/f_k); x_k = 0 for zero-rate helpers."""
    rates = np.asarray(rates, dtype=float)
    if rates.shape[0] != config.K:
        raise ValueError("need one rate per helper")
    if (rates < 0).any():
        raise ValueError("rates must be >= 0")
    x = np.zeros(config.K + 1)
    if include_local:
        x[0] = config.f[0] / config.C
    pos = rates > 0
    fk = np.asarray(config.f[1:])
    x[1:][pos] = 1.0 / (1.0 / rates[pos] + config.C / fk[pos])
    return x


def optimal_assignment(rates, config: SystemConfig, include_local: bool = True) -> np.ndarray:
    """Closed-form optimal task split D_k = x_k D / sum(x).

    include_local=False drops x_0 (forced full offloading). The last
    positive component absorbs the floating-point residue so that
    sum(d) == D exactly.
    """
    x = _throughputs(rates, config, include_local)
    total = x.sum()
    if total <= 0:
        raise ValueError("no node can make progress (all throughputs zero)")
    d = x * (config.D / total)
    # exact-sum repair on the largest component
    j = int(np.argmax(d))
    d[j] += config.D - d.sum()
    return d


def lp_oracle(rates, config: SystemConfig, include_local: bool = True,
              tolerance: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Bisection on the bottleneck t: candidate t is feasible iff the total
    schedulable bits t*sum(x) cover D. Independent check of the closed form."""
    x = _throughputs(rates, config, include_local)
    total = x.sum()
    if total <= 0:
        raise ValueError("no node can make progress (all throughputs zero)")
    lo = 0.0
    hi = config.D / max(x[x > 0].min(), 1e-300)  # single slowest node does it all
    it = 0
    while hi - lo > tolerance * hi:
        it += 1
        if it > max_iter:
            raise RuntimeError("lp_oracle bisection did not converge")
        mid = 0.5 * (lo + hi)
        if mid * total >= config.D:
            hi = mid
        else:
            lo = mid
    d = x * hi
    d *= config.D / d.sum()
    j = int(np.argmax(d))
    d[j] += config.D - d.sum()
    return d
