import warnings

import pytest
from click.testing import CliRunner

with warnings.catch_warnings():
    warnings.simplefilter("ignore", DeprecationWarning)
    from fastapi.testclient import TestClient

from irs_d2d.cli import main
from irs_d2d.harness import CSV_COLUMNS
from irs_d2d.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


class TestService:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_run_local_only(self, client):
        resp = client.post("/run", json={"scheme": "local_only"})
        assert resp.status_code == 200
        data = resp.json()
        assert data["delay_s"] == pytest.approx(1.0)
        assert "bottleneck_delay_s" in data["text"]

    def test_run_proposed(self, client):
        resp = client.post("/run", json={
            "scheme": "proposed", "trial": 0,
            "options": {"num_samples": 100},
        })
        assert resp.status_code == 200
        data = resp.json()
        assert data["converged"]
        trace = data["trace"]
        for a, b in zip(trace, trace[1:]):
            assert b <= a * (1 + 1e-9)
        assert data["delay_s"] < 1.0

    def test_run_with_config_override(self, client):
        resp = client.post("/run", json={
            "scheme": "local_only",
            "config": {"D": 2e6},
        })
        assert resp.json()["delay_s"] == pytest.approx(2.0)

    def test_run_rejects_unknown_scheme(self, client):
        resp = client.post("/run", json={"scheme": "bogus"})
        assert resp.status_code == 422

    def test_run_rejects_bad_config(self, client):
        resp = client.post("/run", json={"config": {"K": 0}})
        assert resp.status_code == 422

    def test_sweep(self, client):
        resp = client.post("/sweep", json={
            "variable": "bandwidth", "values": [5e5], "trials": 1,
            "schemes": ["local_only", "proposed"],
            "options": {"num_samples": 100},
        })
        assert resp.status_code == 200
        data = resp.json()
        assert data["columns"] == list(CSV_COLUMNS)
        assert len(data["rows"]) == 2
        assert data["csv"].splitlines()[0] == ",".join(CSV_COLUMNS)
        assert any(key.startswith("proposed@") for key in data["summary"])

    def test_sweep_rejects_bad_variable(self, client):
        resp = client.post("/sweep", json={"variable": "nope", "values": [1.0]})
        assert resp.status_code == 422


class TestCli:
    def test_run_local_only(self):
        result = CliRunner().invoke(main, ["run", "--scheme", "local_only"])
        assert result.exit_code == 0, result.output
        assert "bottleneck_delay_s: 1.000000000e+00" in result.output

    def test_run_with_yaml_config(self, tmp_path):
        cfg = tmp_path / "scenario.yaml"
        cfg.write_text("D: 2.0e6\n")
        result = CliRunner().invoke(
            main, ["run", "--scheme", "local_only", "--config", str(cfg)])
        assert result.exit_code == 0, result.output
        assert "bottleneck_delay_s: 2.000000000e+00" in result.output

    def test_run_out_file(self, tmp_path):
        out = tmp_path / "run.txt"
        result = CliRunner().invoke(
            main, ["run", "--scheme", "local_only", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "bottleneck_delay_s" in out.read_text()

    def test_run_unknown_scheme_fails(self):
        result = CliRunner().invoke(main, ["run", "--scheme", "bogus"])
        assert result.exit_code != 0

    def test_sweep_writes_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        result = CliRunner().invoke(main, [
            "sweep", "--sweep", "bandwidth=5e5", "--trials", "1",
            "--schemes", "local_only", "--samples", "100", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2

    def test_sweep_bad_argument(self):
        result = CliRunner().invoke(main, ["sweep", "--sweep", "bandwidth"])
        assert result.exit_code != 0
