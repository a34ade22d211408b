"""Dense Hermitian SDP feasibility engine and Gaussian randomization.

Solves: find V >= 0, diag(V) = 1, Tr(H_k V) >= tau_k for all k, for a
small set of Hermitian PSD matrices H_k. Internally the engine maximizes
the minimum slack s = min_k (Tr(H_k V) - tau_k) and works on the dual

    min  sum(y) - tau.lam   s.t.  Diag(y) - sum_k lam_k H_k >= 0,
                                  sum(lam) = 1, lam >= 0,

followed by a log-det barrier path with damped Newton steps. The primal
iterate mu * S^{-1} sits on the central path with (near) unit diagonal;
after an exact diagonal rescale it serves as a feasibility certificate
that is checked directly, independent of solver internals. Any dual
feasible point upper-bounds the optimal slack, which gives early
infeasibility certificates during the outer bisections upstream.

Complex arithmetic is kept native (no real embedding); problems are tiny
(dim up to ~128) and dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class LiftedBeam:
    """Relaxed beamforming matrix V ((N+1) x (N+1) Hermitian, unit diag)."""

    V: np.ndarray

    def validate(self, Hs=None, thresholds=None, slack_tol: float = 1e-7):
        V = self.V
        n = V.shape[0]
        if V.shape != (n, n):
            raise ValueError("V must be square")
        if np.max(np.abs(V - V.conj().T)) > 1e-10:
            raise ValueError("V is not Hermitian")
        if np.max(np.abs(np.diag(V).real - 1.0)) > 1e-8 or np.max(np.abs(np.diag(V).imag)) > 1e-8:
            raise ValueError("diag(V) != 1")
        w = np.linalg.eigvalsh((V + V.conj().T) / 2)
        if w.min() < -1e-8:
            raise ValueError(f"V not PSD (min eig {w.min():.3e})")
        if Hs is not None:
            for k, (H, tau) in enumerate(zip(Hs, thresholds)):
                slack = float(np.real(np.trace(H @ V))) - tau
                if slack < -slack_tol * max(1.0, tau):
                    raise ValueError(f"constraint {k} slack {slack:.3e} below tolerance")

    def slacks(self, Hs, thresholds) -> np.ndarray:
        return np.array([float(np.real(np.trace(H @ self.V))) - tau
                         for H, tau in zip(Hs, np.asarray(thresholds, float))])


def _check_inputs(Hs, thresholds):
    Hs = [np.asarray(H, dtype=complex) for H in Hs]
    tau = np.asarray(thresholds, dtype=float)
    if len(Hs) != tau.shape[0]:
        raise ValueError("one threshold per constraint matrix required")
    n = Hs[0].shape[0]
    for H in Hs:
        if H.shape != (n, n):
            raise ValueError("constraint matrices must share one square shape")
        if np.max(np.abs(H - H.conj().T)) > 1e-9 * max(1.0, np.abs(H).max()):
            raise ValueError("constraint matrix not Hermitian")
    if (tau < 0).any():
        raise ValueError("thresholds must be >= 0")
    return Hs, tau, n


def _logdet_chol(S):
    """(cholesky ok, logdet); None when S is not positive definite."""
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return None
    return 2.0 * float(np.sum(np.log(np.real(np.diag(L)))))


class MaxSlackSolver:
    """Barrier path-following on the dual of the max-min-slack SDP."""

    def __init__(self, Hs, thresholds, slack_tol=1e-7, infeas_margin=1e-6,
                 mu_min=1e-11, newton_tol=1e-9, max_newton=60):
        self.Hs_orig, self.tau_orig, self.n = _check_inputs(Hs, thresholds)
        self.K = len(self.Hs_orig)
        self.slack_tol = slack_tol
        self.infeas_margin = infeas_margin
        self.mu_min = mu_min
        self.newton_tol = newton_tol
        self.max_newton = max_newton
        # scale so matrix entries are O(1); V is scale-free
        self.scale = max(max(np.linalg.norm(H) for H in self.Hs_orig),
                         float(self.tau_orig.max(initial=0.0)) / self.n, 1e-300)
        self.Hs = [H / self.scale for H in self.Hs_orig]
        self.tau = self.tau_orig / self.scale
        self.warm = None  # (y, lam) from a previous solve on same shapes

    def update_thresholds(self, thresholds):
        """Swap thresholds, keeping matrices, scaling and warm start; the
        dual feasible set does not depend on the thresholds."""
        tau = np.asarray(thresholds, dtype=float)
        if tau.shape[0] != self.K or (tau < 0).any():
            raise ValueError("bad thresholds")
        self.tau_orig = tau
        self.tau = tau / self.scale

    # --- dual barrier pieces ---
    def _S(self, y, lam):
        M = sum(l * H for l, H in zip(lam, self.Hs))
        S = -M
        S[np.diag_indices(self.n)] += y
        return S

    def _f(self, y, lam, mu):
        S = self._S(y, lam)
        ld = _logdet_chol(S)
        if ld is None or (self.K > 1 and (lam <= 0).any()):
            return math.inf
        val = float(y.sum() - self.tau @ lam) - mu * ld
        if self.K > 1:
            val -= mu * float(np.log(lam).sum())
        return val

    def _newton_step(self, y, lam, mu):
        n, K = self.n, self.K
        S = self._S(y, lam)
        W = np.linalg.inv(S)
        W = (W + W.conj().T) / 2
        WH = [W @ H for H in self.Hs]
        g_y = 1.0 - mu * np.real(np.diag(W))
        H_yy = mu * (np.abs(W) ** 2)
        if K == 1:
            try:
                dy = np.linalg.solve(H_yy, -g_y)
            except np.linalg.LinAlgError:
                dy = np.linalg.solve(H_yy + 1e-12 * np.eye(n), -g_y)
            dec = float(-g_y @ dy)
            return dy, np.zeros(1), g_y, np.zeros(1), dec
        g_l = np.array([-self.tau[k] + mu * np.real(np.trace(WH[k])) - mu / lam[k]
                        for k in range(K)])
        H_yl = np.empty((n, K))
        for k in range(K):
            H_yl[:, k] = -mu * np.real(np.diag(WH[k] @ W))
        H_ll = np.empty((K, K))
        for j in range(K):
            for k in range(j, K):
                H_ll[j, k] = H_ll[k, j] = mu * float(np.real(np.sum(WH[j] * WH[k].T)))
        H_ll[np.diag_indices(K)] += mu / lam ** 2
        # bordered KKT system for the simplex equality sum(lam) = 1
        A = np.zeros((n + K + 1, n + K + 1))
        A[:n, :n] = H_yy
        A[:n, n:n + K] = H_yl
        A[n:n + K, :n] = H_yl.T
        A[n:n + K, n:n + K] = H_ll
        A[n:n + K, -1] = 1.0
        A[-1, n:n + K] = 1.0
        rhs = np.concatenate([-g_y, -g_l, [0.0]])
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            A[np.diag_indices(n + K)] += 1e-12
            sol = np.linalg.solve(A, rhs)
        dy, dl = sol[:n], sol[n:n + K]
        dec = float(-(g_y @ dy + g_l @ dl))
        return dy, dl, g_y, g_l, dec

    def _center(self, y, lam, mu):
        for _ in range(self.max_newton):
            dy, dl, g_y, g_l, dec = self._newton_step(y, lam, mu)
            if dec / 2 < self.newton_tol:
                break
            f0 = self._f(y, lam, mu)
            slope = float(g_y @ dy + (g_l @ dl if self.K > 1 else 0.0))
            step = 1.0
            for _ in range(60):
                y1, lam1 = y + step * dy, lam + step * dl
                if self._f(y1, lam1, mu) <= f0 + 0.25 * step * slope:
                    break
                step *= 0.5
            else:
                break
            y, lam = y + step * dy, lam + step * dl
        return y, lam

    def _certificate(self, y, lam, mu):
        """Primal candidate mu*S^{-1}, rescaled to an exact unit diagonal."""
        S = self._S(y, lam)
        W = np.linalg.inv(S)
        V = mu * (W + W.conj().T) / 2
        dg = np.real(np.diag(V)).copy()
        dg[dg <= 0] = 1.0
        r = 1.0 / np.sqrt(dg)
        V = V * np.outer(r, r)
        V[np.diag_indices(self.n)] = 1.0
        return V

    def _slacks_orig(self, V) -> np.ndarray:
        return np.array([float(np.real(np.sum(H.conj() * V))) - t
                         for H, t in zip(self.Hs_orig, self.tau_orig)])

    def _passes(self, slacks) -> bool:
        return bool((slacks >= -self.slack_tol * np.maximum(1.0, self.tau_orig)).all())

    def solve(self):
        """Returns (feasible, V, slacks). V is always the best certificate
        found, also on infeasible instances (slack-maximizing surrogate)."""
        n, K = self.n, self.K
        if self.warm is not None:
            y, lam = self.warm
            mu = 1e-2
            if _logdet_chol(self._S(y, lam)) is None or (K > 1 and (lam <= 0).any()):
                self.warm = None
        if self.warm is None:
            lam = np.full(K, 1.0 / K)
            M = sum(l * H for l, H in zip(lam, self.Hs))
            top = float(np.linalg.eigvalsh(M).max()) if K else 0.0
            y = np.full(n, top + 1.0)
            mu = 1.0

        best_V, best_min = None, -math.inf
        while True:
            y, lam = self._center(y, lam, mu)
            V = self._certificate(y, lam, mu)
            slacks = self._slacks_orig(V)
            if slacks.min() > best_min:
                best_V, best_min, best_slacks = V, slacks.min(), slacks
            dual_bound = (float(y.sum() - self.tau @ lam)) * self.scale
            if self._passes(slacks):
                self.warm = (y, lam)
                return True, V, slacks
            if dual_bound < -self.infeas_margin * max(1.0, float(self.tau_orig.max(initial=0.0))):
                self.warm = (y, lam)
                return False, best_V, best_slacks
            if mu <= self.mu_min:
                self.warm = (y, lam)
                return self._passes(best_slacks), best_V, best_slacks
            mu = max(mu * 0.08, self.mu_min)


def solve_feasibility(Hs, thresholds, slack_tol: float = 1e-7,
                      infeas_margin: float = 1e-6, solver: MaxSlackSolver | None = None):
    """Find V >= 0 with unit diagonal and Tr(H_k V) >= tau_k (within
    slack_tol * max(1, tau_k)), or return None when infeasible.

    A pre-built MaxSlackSolver may be passed to reuse its warm start across
    repeated solves that differ only in thresholds.
    """
    if solver is None:
        solver = MaxSlackSolver(Hs, thresholds, slack_tol=slack_tol,
                                infeas_margin=infeas_margin)
    ok, V, _ = solver.solve()
    return LiftedBeam(V=V) if ok else None


def gaussian_randomize(V, num_samples: int, score, rng=None, batch: bool = False):
    """Recover a unit-modulus vector from a relaxed V.

    Draws num_samples vectors from CN(0, V) (via Hermitian eigenfactors with
    eigenvalues floored at 0), projects each entrywise to unit modulus
    (zeros map to 1), always adds the phase projection of the leading
    eigenvector, and returns the candidate with the highest score. With
    batch=True, score receives an (m, dim) array and returns m scores.
    """
    if isinstance(V, LiftedBeam):
        V = V.V
    V = np.asarray(V, dtype=complex)
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    n = V.shape[0]
    w, U = np.linalg.eigh((V + V.conj().T) / 2)
    w = np.maximum(w, 0.0)
    L = U * np.sqrt(w)
    Z = (rng.standard_normal((n, num_samples)) + 1j * rng.standard_normal((n, num_samples))) / math.sqrt(2)
    cand = (L @ Z).T
    lead = U[:, -1].copy()
    cand = np.vstack([cand, lead[None, :]])
    mag = np.abs(cand)
    out = np.where(mag > 0, cand / np.where(mag > 0, mag, 1.0), 1.0 + 0j)
    if batch:
        scores = np.asarray(score(out), dtype=float)
    else:
        scores = np.array([float(score(v)) for v in out])
    return out[int(np.argmax(scores))]
