"""Convex transmit-power / bandwidth-fraction subproblem.

For a fixed task split and fixed phases the subproblem is convex: the rate
is the perspective of a concave function, so the minimum bottleneck t is
found by bisection on t, where each candidate t reduces to minimizing total
transmit power over the bandwidth simplex.

The inner minimum is characterized by equal marginal power reductions
-dp_k/db_k = nu across active helpers. With p(b) = c*b*(e^{u} - 1),
u = a*ln2/b, the stationarity condition e^u (u-1) = nu/c - 1 inverts in
closed form through the Lambert W function, and the common multiplier nu
is pinned down by sum(b_k) = 1 with a scalar root find.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import lambertw

from .system_model import SystemConfig

_LN2 = math.log(2.0)
_EXP_CAP = 700.0  # exp() overflow guard; beyond this power is effectively inf


@dataclass
class ResourceSolution:
    b: np.ndarray
    p: np.ndarray
    t: float
    inner_iterations: int = 0
    hint_infeasible: bool = False


def required_rate(Dk: float, t: float, k: int, config: SystemConfig) -> float:
    """Minimum rate making helper k finish within t: Dk/(t - Dk*C/f_k)."""
    if Dk < 0:
        raise ValueError("Dk must be >= 0")
    if Dk == 0.0:
        return 0.0
    denom = t - Dk * config.C / config.f[k]
    if denom <= 0:
        raise ValueError(f"t={t} leaves no time for transmission to helper {k}")
    return Dk / denom


def min_power(b: float, rho: float, gain: float, config: SystemConfig) -> float:
    """Unique power achieving rate rho at bandwidth fraction b (inverse of
    the rate formula). Returns inf when the requirement is unreachable."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if rho == 0.0:
        return 0.0
    if b <= 0:
        return math.inf
    if gain <= 0:
        return math.inf
    w = b * config.B
    expo = _LN2 * rho / w
    if expo > _EXP_CAP:
        return math.inf
    return math.expm1(expo) * w * config.N0 / gain


def _bandwidth_at_multiplier(nu: float, a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Per-helper bandwidth where -dp/db equals nu (Lambert W inversion)."""
    arg = (nu / c - 1.0) / math.e
    arg = np.maximum(arg, -1.0 / math.e)
    u = 1.0 + np.real(lambertw(arg))
    u = np.maximum(u, 1e-300)
    return a * _LN2 / u


def _power_at(b: np.ndarray, a: np.ndarray, c: np.ndarray) -> np.ndarray:
    expo = np.minimum(_LN2 * a / np.maximum(b, 1e-300), _EXP_CAP)
    return c * b * np.expm1(expo)


def feasible_at(t: float, d, gains, config: SystemConfig):
    """Minimize total transmit power at bottleneck target t.

    Returns (feasible, b, p, total_power, evals); feasible iff the minimum
    total power is within Pmax. Helpers with d_k = 0 get b_k = p_k = 0.
    """
    d = np.asarray(d, dtype=float)
    gains = np.asarray(gains, dtype=float)
    K = config.K
    b = np.zeros(K)
    p = np.zeros(K)
    active = np.where(d[1:] > 0)[0]
    if t < config.C * d[0] / config.f[0] - 1e-15:
        return False, b, p, math.inf, 0
    if active.size == 0:
        return True, b, p, 0.0, 0
    if (gains[active] <= 0).any():
        return False, b, p, math.inf, 0
    if any(t <= d[1 + k] * config.C / config.f[1 + k] for k in active):
        return False, b, p, math.inf, 0

    rho = np.array([required_rate(d[1 + k], t, 1 + k, config) for k in active])
    a = rho / config.B
    c = config.B * config.N0 / gains[active]

    if active.size == 1:
        b_act = np.array([1.0])
        evals = 1
    else:
        evals = 0

        def excess(nu):
            nonlocal evals
            evals += 1
            return _bandwidth_at_multiplier(nu, a, c).sum() - 1.0

        # bracket the multiplier: bandwidth shrinks as nu grows
        nu0 = float(np.median(c))
        lo = hi = nu0
        for _ in range(200):
            if excess(lo) > 0:
                break
            lo /= 8.0
        for _ in range(200):
            if excess(hi) < 0:
                break
            hi *= 8.0
        nu = brentq(excess, lo, hi, rtol=1e-14, maxiter=300)
        b_act = _bandwidth_at_multiplier(nu, a, c)
        b_act = b_act / b_act.sum()  # absorb residual rounding

    p_act = _power_at(b_act, a, c)
    b[active] = b_act
    p[active] = p_act
    total = float(p_act.sum())
    return bool(total <= config.Pmax), b, p, total, evals


def solve_power_bandwidth(d, gains, config: SystemConfig, t_hint: float,
                          b_hint=None, p_hint=None, tol_t: float = 1e-6,
                          max_iter: int = 200) -> ResourceSolution:
    """Bisection on t over [t_lo, t_hint] with per-candidate power checks.

    t_hint must be a feasible bottleneck (normally the previous iterate);
    if it is not, the hint allocation is returned unchanged with a flag so
    the alternating loop stays monotone.
    """
    d = np.asarray(d, dtype=float)
    gains = np.asarray(gains, dtype=float)
    t_lo = config.C * d[0] / config.f[0]
    for k in range(1, config.K + 1):
        if d[k] > 0:
            t_lo = max(t_lo, d[k] * config.C / config.f[k])
    inner = 0

    ok, b, p, _, ev = feasible_at(t_hint, d, gains, config)
    inner += ev
    if not ok:
        K = config.K
        return ResourceSolution(
            b=np.array(b_hint, float) if b_hint is not None else np.zeros(K),
            p=np.array(p_hint, float) if p_hint is not None else np.zeros(K),
            t=float(t_hint), inner_iterations=inner, hint_infeasible=True)

    lo, hi = t_lo, float(t_hint)
    best = (b, p)
    it = 0
    while hi - lo > tol_t and it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        ok, b, p, _, ev = feasible_at(mid, d, gains, config)
        inner += ev
        if ok:
            hi = mid
            best = (b, p)
        else:
            lo = mid
    return ResourceSolution(b=best[0], p=best[1], t=hi, inner_iterations=inner)
