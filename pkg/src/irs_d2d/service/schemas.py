"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..harness import SCHEMES, SWEEP_VARIABLES
from ..system_model import SystemConfig


class ConfigModel(BaseModel):
    """Scenario parameters; unset fields fall back to the default scenario."""

    K: Optional[int] = None
    N: Optional[int] = None
    B: Optional[float] = None
    N0: Optional[float] = None
    Pmax: Optional[float] = None
    D: Optional[float] = None
    C: Optional[float] = None
    f: Optional[list[float]] = None
    source: Optional[list[float]] = None
    irs: Optional[list[float]] = None
    helpers: Optional[list[list[float]]] = None
    C0: Optional[float] = None
    C0_dB: Optional[float] = None
    alpha: Optional[float] = None
    blocked: Optional[list[int]] = None
    seed: Optional[int] = None

    def to_config(self) -> SystemConfig:
        raw = {k: v for k, v in self.model_dump().items() if v is not None}
        return SystemConfig.from_dict(raw)


class SolverOptionsModel(BaseModel):
    epsilon: float = 1e-4
    max_iter: int = Field(50, ge=1)
    num_samples: int = Field(1000, ge=1)
    phase_tol_rel: float = 1e-3
    init_phase: str = "zeros"


class RunRequest(BaseModel):
    config: ConfigModel = ConfigModel()
    scheme: str = "proposed"
    trial: int = 0
    options: SolverOptionsModel = SolverOptionsModel()

    def validate_scheme(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


class RunResponse(BaseModel):
    scheme: str
    delay_s: float
    per_node_delay_s: list[float]
    trace: list[float]
    iterations: int
    converged: bool
    fallback: bool
    text: str


class SweepRequest(BaseModel):
    config: ConfigModel = ConfigModel()
    variable: str
    values: list[float]
    trials: int = Field(50, ge=1)
    schemes: list[str] = ["proposed", "partial_no_irs", "full_offload", "local_only"]
    options: SolverOptionsModel = SolverOptionsModel()

    def validate_spec(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"variable must be one of {SWEEP_VARIABLES}")


class SweepResponse(BaseModel):
    columns: list[str]
    rows: list[dict[str, str]]
    csv: str
    summary: dict[str, dict[str, float]]
