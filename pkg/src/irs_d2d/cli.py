"""Command-line client for the solver service.

The CLI is a thin HTTP client. By default it mounts the FastAPI app
in-process (no server needed); pass --server to talk to a running
`uvicorn irs_d2d.service:app` instance instead.
"""

from __future__ import annotations

import sys

import click
import httpx
import yaml


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import app
    return TestClient(app)


def _load_config(path: str | None, seed: int | None) -> dict:
    raw = {}
    if path:
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
    if seed is not None:
        raw["seed"] = seed
    return raw


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


_shared = [
    click.option("--config", "config_path", type=click.Path(exists=True),
                 help="YAML scenario file (see configs/default.yaml)."),
    click.option("--seed", type=int, default=None, help="Override the RNG seed."),
    click.option("--epsilon", type=float, default=1e-4, show_default=True,
                 help="Relative convergence threshold."),
    click.option("--max-iter", type=int, default=50, show_default=True),
    click.option("--samples", type=int, default=1000, show_default=True,
                 help="Gaussian randomization candidates."),
    click.option("--server", default=None,
                 help="Base URL of a running service (default: in-process)."),
    click.option("--out", type=click.Path(), default=None,
                 help="Output file (default: stdout)."),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Delay optimization for IRS-assisted D2D cooperative computing."""


@main.command("run")
@shared_options
@click.option("--scheme", default="proposed", show_default=True)
@click.option("--trial", type=int, default=0, show_default=True,
              help="Fading-draw index under the configured seed.")
def run_cmd(config_path, seed, epsilon, max_iter, samples, server, out, scheme, trial):
    """Solve one channel realization and print the iteration trace."""
    payload = {
        "config": _load_config(config_path, seed),
        "scheme": scheme,
        "trial": trial,
        "options": {"epsilon": epsilon, "max_iter": max_iter, "num_samples": samples},
    }
    with _client(server) as client:
        data = _post(client, "/run", payload)
    if out:
        with open(out, "w") as fh:
            fh.write(data["text"])
    else:
        sys.stdout.write(data["text"])


@main.command("sweep")
@shared_options
@click.option("--sweep", "sweep_arg", required=True,
              help="Sweep grid, e.g. bandwidth=1e5,2e5,5e5.")
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--schemes", default="proposed,partial_no_irs,full_offload,local_only",
              show_default=True, help="Comma-separated scheme list.")
def sweep_cmd(config_path, seed, epsilon, max_iter, samples, server, out,
              sweep_arg, trials, schemes):
    """Run a parameter sweep and write the per-run CSV."""
    if "=" not in sweep_arg:
        raise click.ClickException("--sweep expects <variable>=<comma list>")
    variable, _, values = sweep_arg.partition("=")
    try:
        vals = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise click.ClickException(f"bad sweep values: {values!r}")
    payload = {
        "config": _load_config(config_path, seed),
        "variable": variable.strip(),
        "values": vals,
        "trials": trials,
        "schemes": [s.strip() for s in schemes.split(",") if s.strip()],
        "options": {"epsilon": epsilon, "max_iter": max_iter, "num_samples": samples},
    }
    with _client(server) as client:
        data = _post(client, "/sweep", payload)
    if out:
        with open(out, "w") as fh:
            fh.write(data["csv"])
        click.echo(f"wrote {len(data['rows'])} rows to {out}")
    else:
        sys.stdout.write(data["csv"])
    for key, s in data["summary"].items():
        click.echo(f"{key}: mean={s['mean']:.6e} sem={s['sem']:.3e} n={int(s['count'])}",
                   err=True)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host, port):
    """Start the HTTP service."""
    import uvicorn
    uvicorn.run("irs_d2d.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
