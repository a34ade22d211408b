"""Scenario constants, fading channel generation, and rate/delay evaluation.

Everything downstream (task split, power/bandwidth allocation, phase
beamforming, baselines) consumes the config and evaluators defined here.
Helper nodes are indexed 1..K in the public API; index 0 is the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

INF_DELAY = math.inf

# Default scenario: source at origin, IRS at (0,5), two helpers,
# direct link to helper 2 fully blocked.
_DEFAULTS = dict(
    K=2,
    N=32,
    B=0.5e6,            # Hz
    N0=1e-16,           # W/Hz
    Pmax=1.0,           # W
    D=1e6,              # bits
    C=1000.0,           # CPU cycles per bit
    f=(1e9, 1.2e9, 1.5e9),
    source=(0.0, 0.0),
    irs=(0.0, 5.0),
    helpers=((1.0, 5.0), (2.0, 4.0)),
    C0=1e-3,            # -30 dB reference path loss at 1 m
    alpha=3.0,
    blocked=frozenset({2}),
    seed=0,
)


class ConstraintViolation(ValueError):
    """An allocation violates one of the problem constraints."""

    def __init__(self, constraint_id: str, message: str):
        self.constraint_id = constraint_id
        super().__init__(f"[{constraint_id}] {message}")


class InfeasibleError(RuntimeError):
    """Raised when a scheme has no feasible solution (e.g. forced full
    offloading with every channel gain zero)."""


@dataclass(frozen=True)
class SystemConfig:
    """All scenario constants, SI units throughout."""

    K: int = _DEFAULTS["K"]
    N: int = _DEFAULTS["N"]
    B: float = _DEFAULTS["B"]
    N0: float = _DEFAULTS["N0"]
    Pmax: float = _DEFAULTS["Pmax"]
    D: float = _DEFAULTS["D"]
    C: float = _DEFAULTS["C"]
    f: tuple = _DEFAULTS["f"]                # CPU freqs, index 0 = source
    source: tuple = _DEFAULTS["source"]
    irs: tuple = _DEFAULTS["irs"]
    helpers: tuple = _DEFAULTS["helpers"]
    C0: float = _DEFAULTS["C0"]
    alpha: float = _DEFAULTS["alpha"]
    blocked: frozenset = _DEFAULTS["blocked"]
    seed: int = _DEFAULTS["seed"]

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        for name in ("B", "N0", "Pmax", "D", "C"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        object.__setattr__(self, "f", tuple(float(x) for x in self.f))
        if len(self.f) != self.K + 1:
            raise ValueError(f"f must have K+1={self.K + 1} entries")
        if any(fl <= 0 for fl in self.f):
            raise ValueError("all CPU frequencies must be > 0")
        object.__setattr__(self, "helpers", tuple(tuple(map(float, h)) for h in self.helpers))
        if len(self.helpers) != self.K:
            raise ValueError(f"helpers must have K={self.K} positions")
        object.__setattr__(self, "source", tuple(map(float, self.source)))
        object.__setattr__(self, "irs", tuple(map(float, self.irs)))
        object.__setattr__(self, "blocked", frozenset(int(k) for k in self.blocked))
        if not self.blocked <= set(range(1, self.K + 1)):
            raise ValueError("blocked must be a subset of {1..K}")

    def replace(self, **kw) -> "SystemConfig":
        cur = {k: getattr(self, k) for k in _DEFAULTS}
        cur.update(kw)
        return SystemConfig(**cur)

    # --- geometry ---
    def dist_source_irs(self) -> float:
        return math.dist(self.source, self.irs)

    def dist_irs_helper(self, k: int) -> float:
        return math.dist(self.irs, self.helpers[k - 1])

    def dist_source_helper(self, k: int) -> float:
        return math.dist(self.source, self.helpers[k - 1])

    def path_gain(self, d: float) -> float:
        """Large-scale power gain C0 * d^-alpha."""
        return self.C0 * d ** (-self.alpha)

    @classmethod
    def from_yaml(cls, path) -> "SystemConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "SystemConfig":
        raw = dict(raw)
        if "C0_dB" in raw:
            raw["C0"] = 10.0 ** (float(raw.pop("C0_dB")) / 10.0)
        known = set(_DEFAULTS)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        # YAML renders scientific notation like 0.5e6 as a string; coerce
        for key in ("B", "N0", "Pmax", "D", "C", "C0", "alpha"):
            if key in raw:
                raw[key] = float(raw[key])
        for key in ("K", "N", "seed"):
            if key in raw:
                raw[key] = int(raw[key])
        if "f" in raw:
            raw["f"] = tuple(float(x) for x in raw["f"])
        merged = {**_DEFAULTS, **raw}
        merged["blocked"] = frozenset(merged["blocked"])
        return cls(**merged)


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw: h_r (source->IRS, length N), g (K x N, IRS->helper
    rows), h_d (length K, direct source->helper)."""

    h_r: np.ndarray
    g: np.ndarray
    h_d: np.ndarray

    def __post_init__(self):
        h_r = np.asarray(self.h_r, dtype=complex)
        g = np.asarray(self.g, dtype=complex)
        h_d = np.asarray(self.h_d, dtype=complex)
        if h_r.ndim != 1 or g.ndim != 2 or h_d.ndim != 1:
            raise ValueError("bad channel array shapes")
        if g.shape != (h_d.shape[0], h_r.shape[0]):
            raise ValueError("channel dimensions inconsistent")
        for a in (h_r, g, h_d):
            a.setflags(write=False)
        object.__setattr__(self, "h_r", h_r)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h_d", h_d)

    @property
    def N(self) -> int:
        return self.h_r.shape[0]

    @property
    def K(self) -> int:
        return self.h_d.shape[0]

    def without_irs(self) -> "ChannelRealization":
        """Same direct links, reflected path nulled (no-IRS baseline)."""
        return ChannelRealization(np.zeros_like(self.h_r), np.zeros_like(self.g), self.h_d)


@dataclass(frozen=True)
class PhaseProfile:
    """IRS phase shifts theta (radians), amplitudes fixed to 1."""

    theta: np.ndarray

    def __post_init__(self):
        th = np.mod(np.asarray(self.theta, dtype=float), 2.0 * np.pi)
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)

    @property
    def N(self) -> int:
        return self.theta.shape[0]

    def reflection(self) -> np.ndarray:
        """Diagonal entries of the reflection matrix, e^{j theta_n}."""
        return np.exp(1j * self.theta)

    @classmethod
    def zeros(cls, N: int) -> "PhaseProfile":
        return cls(np.zeros(N))


@dataclass
class DelayReport:
    """Per-node delays, the bottleneck, and the iteration trace."""

    per_node_delay: np.ndarray
    bottleneck: float
    trace: list = field(default_factory=list)
    converged: bool = True
    fallback: bool = False

    @property
    def iterations(self) -> int:
        return max(0, len(self.trace) - 1)

    def validate(self):
        finite = np.asarray(self.per_node_delay, dtype=float)
        peak = float(np.max(finite))
        if not math.isclose(self.bottleneck, peak, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError("bottleneck does not match max per-node delay")
        for a, b in zip(self.trace, self.trace[1:]):
            if b > a * (1 + 1e-9) + 1e-15:
                raise ValueError("trace is not non-increasing")


def _link_rng(config: SystemConfig, trial: int, link: int) -> np.random.Generator:
    # Independent stream per (seed, trial, link) so draws are order-free.
    return np.random.default_rng(np.random.SeedSequence((config.seed, trial, link)))


def _cn(rng: np.random.Generator, size) -> np.ndarray:
    """Circularly-symmetric complex Gaussian with unit mean power."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


def generate_channel(config: SystemConfig, trial: int = 0) -> ChannelRealization:
    """Sample one Rayleigh-fading realization of all links.

    Each coefficient is sqrt(C0 d^-alpha) * z with z ~ CN(0, 1); blocked
    direct links are zeroed afterwards. Deterministic under (seed, trial).
    """
    N, K = config.N, config.K
    h_r = math.sqrt(config.path_gain(config.dist_source_irs())) * _cn(_link_rng(config, trial, 0), N)
    h_d = np.empty(K, dtype=complex)
    g = np.empty((K, N), dtype=complex)
    for k in range(1, K + 1):
        h_d[k - 1] = math.sqrt(config.path_gain(config.dist_source_helper(k))) * _cn(
            _link_rng(config, trial, 1 + 2 * (k - 1)), ())
        g[k - 1] = math.sqrt(config.path_gain(config.dist_irs_helper(k))) * _cn(
            _link_rng(config, trial, 2 + 2 * (k - 1)), N)
    for k in config.blocked:
        h_d[k - 1] = 0.0
    return ChannelRealization(h_r, g, h_d)


def effective_gain(ch: ChannelRealization, phase: PhaseProfile, k: int) -> float:
    """Composite power gain |g_k^H diag(e^{j theta}) h_r + h_{d,k}|^2."""
    if not 1 <= k <= ch.K:
        raise ValueError(f"helper index {k} out of range 1..{ch.K}")
    amp = np.conj(ch.g[k - 1]) @ (phase.reflection() * ch.h_r) + ch.h_d[k - 1]
    return float(np.abs(amp) ** 2)


def effective_gains(ch: ChannelRealization, phase: PhaseProfile) -> np.ndarray:
    """Composite power gains for all K helpers at once."""
    amps = np.conj(ch.g) @ (phase.reflection() * ch.h_r) + ch.h_d
    return np.abs(amps) ** 2


def rate(b: float, p: float, gain: float, config: SystemConfig) -> float:
    """FDMA rate b*B*log2(1 + p*gain/(b*B*N0)); 0 at b=0 or p=0 by continuity."""
    if b < 0 or b > 1 + 1e-12:
        raise ValueError("bandwidth fraction must be in [0, 1]")
    if p < 0:
        raise ValueError("power must be >= 0")
    if b == 0.0 or p == 0.0 or gain == 0.0:
        return 0.0
    w = b * config.B
    return w * math.log2(1.0 + p * gain / (w * config.N0))


def local_delay(D0: float, config: SystemConfig) -> float:
    """Local computing delay C*D0/f_0."""
    if D0 < 0:
        raise ValueError("D0 must be >= 0")
    return config.C * D0 / config.f[0]


def offload_delay(Dk: float, Rk: float, k: int, config: SystemConfig) -> float:
    """Helper-k delay Dk/Rk + Dk*C/f_k; INF_DELAY if Dk > 0 with no rate."""
    if Dk < 0:
        raise ValueError("Dk must be >= 0")
    if Dk == 0.0:
        return 0.0
    if Rk <= 0.0:
        return INF_DELAY
    return Dk / Rk + Dk * config.C / config.f[k]


def delays_from_gains(d, b, p, gains, config: SystemConfig) -> np.ndarray:
    """Per-node delays for an allocation at given composite power gains."""
    d = np.asarray(d, float)
    delays = np.empty(config.K + 1)
    delays[0] = local_delay(max(d[0], 0.0), config)
    for k in range(1, config.K + 1):
        rk = rate(min(max(b[k - 1], 0.0), 1.0), max(p[k - 1], 0.0), gains[k - 1], config)
        delays[k] = offload_delay(max(d[k], 0.0), rk, k, config)
    return delays


def total_delay(alloc, phase: PhaseProfile, ch: ChannelRealization,
                config: SystemConfig, trace=None) -> DelayReport:
    """Evaluate every node delay for an allocation; the single min-max
    objective evaluator shared by all blocks and baselines.

    Constraint checks (tolerance 1e-9 relative) raise ConstraintViolation
    with the violated constraint id.
    """
    d, b, p = np.asarray(alloc.d, float), np.asarray(alloc.b, float), np.asarray(alloc.p, float)
    tol = 1e-9
    if abs(d.sum() - config.D) > tol * config.D:
        raise ConstraintViolation("5b", f"sum(d)={d.sum()} != D={config.D}")
    if b.sum() > 1 + tol:
        raise ConstraintViolation("5c", f"sum(b)={b.sum()} > 1")
    if p.sum() > config.Pmax * (1 + tol):
        raise ConstraintViolation("5d", f"sum(p)={p.sum()} > Pmax={config.Pmax}")
    if (d < -tol * config.D).any() or (b < -tol).any() or (p < -tol * config.Pmax).any():
        raise ConstraintViolation("5f", "negative allocation entry")

    gains = effective_gains(ch, phase)
    delays = delays_from_gains(d, b, p, gains, config)
    return DelayReport(per_node_delay=delays, bottleneck=float(np.max(delays)),
                       trace=list(trace) if trace is not None else [])
