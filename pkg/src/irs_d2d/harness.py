"""Experiment runner: parameter sweeps, Monte-Carlo averaging, CSV output.

Rows are generated in a deterministic order (value-major, then scheme,
then trial) and serialized with fixed formatting, so re-running a sweep
reproduces the CSV byte for byte.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .optimizer import SolverOptions, run
from .system_model import InfeasibleError, SystemConfig, generate_channel

SWEEP_VARIABLES = ("bandwidth", "task_bits", "irs_elements", "iterations")
SCHEMES = ("proposed", "partial_no_irs", "full_offload", "local_only",
           "random_phase", "equal_split")

CSV_COLUMNS = ("scheme", "sweep_variable", "sweep_value", "seed", "trial",
               "N", "B", "D", "C", "Pmax", "delay_s", "iterations",
               "converged", "fallback", "trace")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    trials: int = 50
    schemes: tuple = ("proposed", "partial_no_irs", "full_offload", "local_only")

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"variable must be one of {SWEEP_VARIABLES}")
        vals = tuple(float(v) for v in self.values)
        if not vals or any(v <= 0 for v in vals):
            raise ValueError("values must be non-empty and positive")
        object.__setattr__(self, "values", vals)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        schemes = tuple(self.schemes)
        unknown = set(schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        object.__setattr__(self, "schemes", schemes)


def apply_sweep_value(config: SystemConfig, variable: str, value: float) -> SystemConfig:
    if variable == "bandwidth":
        return config.replace(B=value)
    if variable == "task_bits":
        return config.replace(D=value)
    if variable in ("irs_elements", "iterations"):
        # "iterations" sweeps the element count too; the per-iteration
        # trace column is what the convergence figure consumes
        return config.replace(N=int(value))
    raise ValueError(variable)


def solve_scheme(config: SystemConfig, scheme: str, trial: int,
                 options: SolverOptions = SolverOptions()):
    """One solve; returns a DelayReport (fallback flag included)."""
    if scheme == "local_only":
        return baselines.local_only(config)
    ch = generate_channel(config, trial)
    if scheme == "proposed":
        return run(config, ch, options, trial).report
    if scheme == "partial_no_irs":
        return baselines.partial_no_irs(config, ch, options, trial).report
    if scheme == "full_offload":
        return baselines.full_offload(config, ch, options, trial).report
    if scheme == "random_phase":
        return baselines.random_phase(config, ch, options, trial).report
    if scheme == "equal_split":
        return baselines.equal_split(config, ch, options, trial).report
    raise ValueError(f"unknown scheme {scheme!r}")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.9e}"
    return str(x)


def _row(config, scheme, variable, value, trial, report) -> dict:
    return {
        "scheme": scheme,
        "sweep_variable": variable,
        "sweep_value": _fmt(float(value)),
        "seed": str(config.seed),
        "trial": str(trial),
        "N": str(config.N),
        "B": _fmt(config.B),
        "D": _fmt(config.D),
        "C": _fmt(config.C),
        "Pmax": _fmt(config.Pmax),
        "delay_s": _fmt(float(report.bottleneck)),
        "iterations": str(report.iterations),
        "converged": _fmt(bool(report.converged)),
        "fallback": _fmt(bool(report.fallback)),
        "trace": ";".join(f"{t:.9e}" for t in report.trace),
    }


def sweep_rows(config: SystemConfig, spec: SweepSpec,
               options: SolverOptions = SolverOptions()) -> list[dict]:
    rows = []
    for value in spec.values:
        cfg = apply_sweep_value(config, spec.variable, value)
        for scheme in spec.schemes:
            for trial in range(spec.trials):
                try:
                    report = solve_scheme(cfg, scheme, trial, options)
                except InfeasibleError:
                    report = None
                if report is None:
                    row = _row(cfg, scheme, spec.variable, value, trial,
                               _InfeasibleReport())
                else:
                    row = _row(cfg, scheme, spec.variable, value, trial, report)
                rows.append(row)
    return rows


class _InfeasibleReport:
    bottleneck = math.inf
    iterations = 0
    converged = False
    fallback = True
    trace = ()


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def summarize(rows: list[dict]) -> dict:
    """Per (scheme, sweep value) mean delay and standard error."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["scheme"], r["sweep_value"]), []).append(float(r["delay_s"]))
    out = {}
    for key, vals in groups.items():
        a = np.asarray(vals)
        sem = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
        out[key] = {"mean": float(a.mean()), "sem": sem, "count": int(a.size)}
    return out


def run_sweep(config: SystemConfig, spec: SweepSpec, out: str,
              options: SolverOptions = SolverOptions()) -> dict:
    """Run the full grid and write the CSV (plus a .summary.csv next to it)."""
    rows = sweep_rows(config, spec, options)
    try:
        with open(out, "w") as fh:
            fh.write(rows_to_csv(rows))
        summary = summarize(rows)
        with open(str(out) + ".summary.csv", "w") as fh:
            fh.write("scheme,sweep_value,mean_delay_s,sem,count\n")
            for (scheme, value), s in sorted(summary.items()):
                fh.write(f"{scheme},{value},{s['mean']:.9e},{s['sem']:.9e},{s['count']}\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {out}: {exc}") from exc
    return {"rows": len(rows), "out": str(out),
            "values": list(spec.values), "schemes": list(spec.schemes)}


def run_single(config: SystemConfig, scheme: str, trial: int = 0,
               options: SolverOptions = SolverOptions()) -> str:
    """One solve, formatted as structured text with the full trace."""
    report = solve_scheme(config, scheme, trial, options)
    lines = [
        f"scheme: {scheme}",
        f"seed: {config.seed}  trial: {trial}",
        f"N: {config.N}  B: {config.B:.6g} Hz  D: {config.D:.6g} bits  "
        f"C: {config.C:.6g} cycles/bit  Pmax: {config.Pmax:.6g} W",
        f"bottleneck_delay_s: {report.bottleneck:.9e}",
        "per_node_delay_s: " + " ".join(f"{x:.9e}" for x in report.per_node_delay),
        f"iterations: {report.iterations}  converged: {report.converged}  "
        f"fallback: {report.fallback}",
        "trace: " + " ".join(f"{x:.9e}" for x in report.trace),
    ]
    return "\n".join(lines) + "\n"
