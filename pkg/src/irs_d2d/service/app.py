"""FastAPI service wrapping the solver library.

Endpoints:
  GET  /health        liveness probe
  POST /run           one solve, full trace
  POST /sweep         full experiment grid; client persists the CSV
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException

from ..harness import (CSV_COLUMNS, SweepSpec, rows_to_csv, run_single,
                       solve_scheme, summarize, sweep_rows)
from ..optimizer import SolverOptions
from ..system_model import InfeasibleError
from .schemas import RunRequest, RunResponse, SweepRequest, SweepResponse

app = FastAPI(title="irs-d2d", description="Min-max delay optimization for "
              "IRS-assisted D2D cooperative computing")


def _options(m) -> SolverOptions:
    return SolverOptions(epsilon=m.epsilon, max_iter=m.max_iter,
                         num_samples=m.num_samples,
                         phase_tol_rel=m.phase_tol_rel, init_phase=m.init_phase)


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/run", response_model=RunResponse)
def run_endpoint(req: RunRequest) -> RunResponse:
    try:
        req.validate_scheme()
        config = req.config.to_config()
        opts = _options(req.options)
        report = solve_scheme(config, req.scheme, req.trial, opts)
        text = run_single(config, req.scheme, req.trial, opts)
    except (ValueError, InfeasibleError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return RunResponse(
        scheme=req.scheme,
        delay_s=float(report.bottleneck),
        per_node_delay_s=[float(x) for x in report.per_node_delay],
        trace=[float(x) for x in report.trace],
        iterations=report.iterations,
        converged=bool(report.converged),
        fallback=bool(report.fallback),
        text=text,
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep_endpoint(req: SweepRequest) -> SweepResponse:
    try:
        req.validate_spec()
        config = req.config.to_config()
        spec = SweepSpec(variable=req.variable, values=tuple(req.values),
                         trials=req.trials, schemes=tuple(req.schemes))
        rows = sweep_rows(config, spec, _options(req.options))
    except (ValueError, InfeasibleError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    summary = {
        f"{scheme}@{value}": {"mean": s["mean"], "sem": s["sem"], "count": float(s["count"])}
        for (scheme, value), s in sorted(summarize(rows).items())
        if math.isfinite(s["mean"])
    }
    return SweepResponse(columns=list(CSV_COLUMNS), rows=rows,
                         csv=rows_to_csv(rows), summary=summary)
