"""IRS phase optimization via lifted channels, SDP bisection and rank-one
recovery.

The composite amplitude g_k^H diag(e^{j theta}) h_r + h_{d,k} is linear in
the extended unit-modulus vector v = (e^{j theta_1}, ..., e^{j theta_N}, 1),
so each helper contributes one rank-one Hermitian matrix H_k and the gain
constraint becomes Tr(H_k V) >= tau_k(t) after lifting V = v v^H and
dropping the rank-one requirement. The minimum feasible t is located by
bisection over SDP feasibility checks; a unit-modulus profile is recovered
by Gaussian randomization and only accepted when it does not degrade the
bottleneck (the alternating loop relies on that monotonicity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .power_bandwidth import min_power, required_rate
from .sdp import MaxSlackSolver, gaussian_randomize
from .system_model import ChannelRealization, PhaseProfile, SystemConfig, delays_from_gains


@dataclass(frozen=True)
class LiftedChannel:
    """Per-helper lifted channel: h (length N+1) with H = h h^H, so that
    |h^H v| reproduces the composite amplitude for v = (e^{j theta}, 1)."""

    h: np.ndarray
    H: np.ndarray


def lift(ch: ChannelRealization) -> list[LiftedChannel]:
    """Build the lifted channel rows and rank-one constraint matrices."""
    out = []
    for k in range(ch.K):
        row = np.concatenate([np.conj(ch.g[k]) * ch.h_r, [ch.h_d[k]]])
        H = np.outer(row.conj(), row)
        out.append(LiftedChannel(h=row.conj(), H=H))
    return out


def _lifted_rows(ch: ChannelRealization) -> np.ndarray:
    """(K, N+1) matrix of rows r_k with |r_k @ v|^2 = composite gain."""
    return np.hstack([np.conj(ch.g) * ch.h_r[None, :], ch.h_d[:, None]])


def gain_thresholds(alloc, t: float, config: SystemConfig, active) -> np.ndarray:
    """Gain tau_k needed so helper k can still meet bottleneck t at its
    current bandwidth/power (exact inversion of the rate formula)."""
    tau = np.empty(len(active))
    for i, k in enumerate(active):
        rho = required_rate(alloc.d[k], t, k, config)
        tau[i] = min_power(alloc.b[k - 1], rho, 1.0, config) / alloc.p[k - 1]
    return tau


def optimize_phase(alloc, ch: ChannelRealization, config: SystemConfig,
                   current: PhaseProfile, t_cur: float, *,
                   num_samples: int = 1000, tol_rel: float = 1e-3,
                   max_bisect: int = 40, rng=None):
    """One beamforming block: returns (PhaseProfile, bottleneck).

    Bisection on t over [t_lo, t_cur]; each candidate t is converted into
    per-helper gain thresholds and checked by the SDP feasibility engine.
    The recovered profile is kept only if it improves on t_cur, otherwise
    `current` is returned unchanged (non-degradation safeguard).
    """
    rng = rng if rng is not None else np.random.default_rng()
    active = [k for k in range(1, config.K + 1) if alloc.d[k] > 0]
    if not active:
        return current, t_cur
    for k in active:
        if alloc.b[k - 1] <= 0 or alloc.p[k - 1] <= 0:
            raise ValueError(f"helper {k} has task bits but no bandwidth/power")

    rows = _lifted_rows(ch)
    Hs = [np.outer(rows[k - 1].conj(), rows[k - 1]) for k in active]
    tau0 = gain_thresholds(alloc, t_cur, config, active)
    s0 = float(np.max(tau0))
    if not math.isfinite(s0) or s0 <= 0:
        return current, t_cur
    Hs_n = [H / s0 for H in Hs]

    t_lo = config.C * alloc.d[0] / config.f[0]
    for k in active:
        t_lo = max(t_lo, alloc.d[k] * config.C / config.f[k])

    solver = MaxSlackSolver(Hs_n, tau0 / s0)
    ok, V_best, _ = solver.solve()
    if not ok:
        # relaxation should contain the current rank-one point; numerical
        # failure here means no improvement is certifiable
        return current, t_cur

    lo, hi = t_lo, t_cur
    tol = tol_rel * t_cur
    for _ in range(max_bisect):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        tau = gain_thresholds(alloc, mid, config, active)
        if not np.isfinite(tau).all():
            lo = mid
            continue
        solver.update_thresholds(tau / s0)
        ok, V, _ = solver.solve()
        if ok:
            hi, V_best = mid, V
        else:
            lo = mid

    # Rank-one recovery, scored by the bottleneck a candidate achieves at
    # the fixed allocation. At a Proposition-1-equalized allocation that
    # bottleneck is pinned by the local node, so improving candidates tie;
    # ties are broken by the bottleneck the candidate enables once the task
    # split is re-equalized at its rates, which is what the next iteration
    # of the alternating loop will realize.
    d, b, p = alloc.d, alloc.b, alloc.p
    f = np.asarray(config.f)
    x0 = f[0] / config.C if d[0] > 0 else 0.0
    t_local = config.C * d[0] / config.f[0]
    w = np.maximum(b, 0.0) * config.B
    pw = np.maximum(p, 0.0)

    def candidate_score(cands: np.ndarray) -> np.ndarray:
        gains_c = np.abs(cands @ rows.T) ** 2  # (m, K)
        with np.errstate(divide="ignore", invalid="ignore"):
            snr = np.where(w > 0, pw * gains_c / np.where(w > 0, w, 1.0) / config.N0, 0.0)
            R = w * np.log2(1.0 + snr)
            T = np.where(d[1:] > 0, d[1:] / R + d[1:] * config.C / f[1:], 0.0)
            x = np.where(R > 0, 1.0 / (1.0 / np.where(R > 0, R, 1.0) + config.C / f[1:]), 0.0)
            t_eq = config.D / (x0 + x.sum(axis=1))
        bn = np.maximum(np.nan_to_num(T, nan=math.inf).max(axis=1), t_local)
        bn_min = bn.min()
        tie = bn <= bn_min * (1 + 1e-9)
        return np.where(tie, -t_eq, -1e30 - np.minimum(bn, 1e30))

    v = gaussian_randomize(V_best, num_samples, candidate_score, rng=rng, batch=True)
    theta = np.mod(np.angle(v[:-1]) - np.angle(v[-1]), 2.0 * np.pi)
    cand = PhaseProfile(theta)
    gains = np.abs(rows @ np.concatenate([np.exp(1j * cand.theta), [1.0]])) ** 2
    t_new = float(np.max(delays_from_gains(d, b, p, gains, config)))
    if t_new > t_cur:
        return current, t_cur
    return cand, t_new
