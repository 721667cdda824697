"""Remote-transport check: real uvicorn server, CLI as HTTP client."""

import subprocess
import sys
import time

import httpx
import pytest

from mpcmine.synth import synth_log, to_csv

PORT = 8931


@pytest.fixture(scope="module")
def server():
    proc = subprocess.Popen(
        [sys.executable, "-m", "uvicorn", "mpcmine.service.app:app",
         "--host", "127.0.0.1", "--port", str(PORT), "--log-level", "error"],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    base = f"http://127.0.0.1:{PORT}"
    try:
        for _ in range(80):
            try:
                if httpx.get(f"{base}/health", timeout=0.5).status_code == 200:
                    break
            except httpx.HTTPError:
                time.sleep(0.25)
        else:
            pytest.skip("could not start a local uvicorn server")
        yield base
    finally:
        proc.terminate()
        proc.wait()


def test_cli_against_running_server(server, tmp_path):
    log = tmp_path / "log.csv"
    log.write_text(to_csv(synth_log(seed=60, traces=6, max_len=4, activities=4)))
    out = subprocess.run(
        [sys.executable, "-m", "mpcmine.cli", "run", "--log", str(log),
         "--server", server, "--query", "topk-handoffs", "--k", "2", "--seed", "1"],
        capture_output=True, text=True, timeout=120)
    assert out.returncode == 0, out.stderr
    assert '"query": "topk-handoffs"' in out.stdout


def test_session_round_trip_over_tcp(server):
    log_csv = to_csv(synth_log(seed=61, traces=5, max_len=4, activities=4))
    with httpx.Client(base_url=server, timeout=None) as client:
        sid = client.post("/sessions", json={"log_csv": log_csv}).json()["session_id"]
        first = client.post(f"/sessions/{sid}/query",
                            json={"query": {"query": "topk-handoffs", "k": 1}})
        assert first.status_code == 200
        ledger = client.get(f"/sessions/{sid}/ledger").json()
        assert ledger["reveals"] == 2
        assert client.delete(f"/sessions/{sid}").status_code == 200
