"""Three figure analogs driven purely by the sweep CSV.

  bandwidth    mean delay vs system bandwidth, one line per scheme
  task_size    mean delay vs task size, one line per scheme
  convergence  mean iteration trace, one line per IRS element count

The CSV schema is the harness output: scheme, sweep_variable, sweep_value,
seed, trial, N, B, D, C, Pmax, delay_s, iterations, converged, fallback,
trace (semicolon-joined bottleneck per iteration). Plotting never mutates
the input; identical CSV yields identical data series.
"""

from __future__ import annotations

import argparse

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURES = ("bandwidth", "task_size", "convergence")

REQUIRED_COLUMNS = ("scheme", "sweep_variable", "sweep_value", "delay_s",
                    "N", "trace")

_LABELS = {
    "proposed": "Proposed",
    "partial_no_irs": "Partial offloading w/o IRS",
    "full_offload": "Full offloading",
    "local_only": "Local computing only",
    "random_phase": "Random phases",
    "equal_split": "Equal task split",
}


def load_rows(csv_path) -> pd.DataFrame:
    df = pd.read_csv(csv_path, dtype={"trace": str}, keep_default_na=False)
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"CSV is missing required columns: {missing}")
    return df


def _select(df: pd.DataFrame, variable: str) -> pd.DataFrame:
    sel = df[df["sweep_variable"] == variable]
    if sel.empty:
        raise ValueError(f"no rows with sweep_variable={variable!r} in the CSV")
    return sel


def _mean_curves(sel: pd.DataFrame):
    """Per-scheme (x, mean delay) curves, x ascending, infeasible rows kept
    out of the means."""
    sel = sel[np.isfinite(sel["delay_s"].astype(float))]
    curves = {}
    for scheme, grp in sel.groupby("scheme", sort=True):
        means = grp.groupby(grp["sweep_value"].astype(float))["delay_s"] \
                   .mean().sort_index()
        curves[scheme] = (means.index.to_numpy(), means.to_numpy())
    return curves


def _draw_means(ax, sel, x_scale, xlabel):
    for scheme, (x, y) in _mean_curves(sel).items():
        ax.plot(x * x_scale, y, marker="o",
                label=_LABELS.get(scheme, scheme))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("Total computing delay (s)")
    ax.grid(True, alpha=0.3)
    ax.legend()


def _figure_bandwidth(df: pd.DataFrame):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    _draw_means(ax, _select(df, "bandwidth"), 1e-6, "System bandwidth (MHz)")
    ax.set_title("Delay vs bandwidth")
    return fig


def _figure_task_size(df: pd.DataFrame):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    _draw_means(ax, _select(df, "task_bits"), 1e-6, "Task size (Mbit)")
    ax.set_title("Delay vs task size")
    return fig


def _figure_convergence(df: pd.DataFrame):
    """Mean bottleneck per iteration, one line per element count N; traces
    that stop early are held at their converged value."""
    sel = _select(df, "iterations")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for n, grp in sel.groupby(sel["N"].astype(int), sort=True):
        traces = [np.array([float(v) for v in s.split(";")])
                  for s in grp["trace"] if s]
        if not traces:
            raise ValueError(f"no traces recorded for N={n}")
        width = max(len(t) for t in traces)
        padded = np.stack([np.concatenate([t, np.full(width - len(t), t[-1])])
                           for t in traces])
        mean = padded.mean(axis=0)
        ax.plot(np.arange(width), mean, marker="s", label=f"N = {n}")
    ax.set_xlabel("Iteration")
    ax.set_ylabel("Total computing delay (s)")
    ax.set_title("Convergence of the alternating optimization")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


_BUILDERS = {
    "bandwidth": _figure_bandwidth,
    "task_size": _figure_task_size,
    "convergence": _figure_convergence,
}


def plot(csv_path, figure: str, out_image=None):
    """Render one figure from the sweep CSV; returns the matplotlib Figure
    (saved to out_image when given)."""
    if figure not in FIGURES:
        raise ValueError(f"figure must be one of {FIGURES}")
    df = load_rows(csv_path)
    fig = _BUILDERS[figure](df)
    if out_image is not None:
        fig.savefig(out_image, dpi=150, bbox_inches="tight")
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render delay figures from a sweep CSV.")
    parser.add_argument("--csv", required=True, help="harness sweep CSV")
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    args = parser.parse_args(argv)
    try:
        plot(args.csv, args.figure, args.out)
    except (ValueError, OSError) as exc:
        parser.exit(1, f"error: {exc}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
