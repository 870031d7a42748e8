import json

import pytest

from qpart.cli import run_command
from qpart.qasm import load_qasm

from .conftest import DATA


@pytest.fixture
def rand16(tmp_path):
    path = tmp_path / "r16.qasm"
    assert run_command(["randgen", "--qubits", "16", "--cx", "200", "--seed", "5", "--out", str(path)]) == 0
    return path


def test_randgen(rand16):
    c = load_qasm(rand16)
    assert c.num_qubits == 16 and c.cx_count == 200


def test_plan_writes_report(rand16, tmp_path, capsys):
    out = tmp_path / "plan.json"
    argv = ["plan", "--qasm", str(rand16), "--qpus", "8,8", "--mab", "10", "--seed", "42",
            "--profile", "test", "--generations", "3", "--out", str(out)]
    assert run_command(argv) == 0
    doc = json.loads(out.read_text())
    assert doc["total"] == doc["gate_teleports"] + doc["qubit_teleports"]
    assert doc["total"] <= doc["baseline"]
    assert doc["partitioner"] == "kl" and doc["params"]["max_blocks"] == 10
    assert "total Bell pairs" in capsys.readouterr().out
    first = out.read_text()
    assert run_command(argv) == 0
    assert out.read_text() == first


def test_plan_no_cx(tmp_path, capsys):
    q = tmp_path / "h.qasm"
    q.write_text("OPENQASM 2.0;\nqreg q[4];\nh q;\n")
    assert run_command(["plan", "--qasm", str(q), "--qpus", "2,2", "--profile", "test"]) == 0
    assert "total Bell pairs: 0" in capsys.readouterr().out


def test_missing_file(capsys):
    assert run_command(["plan", "--qasm", "/no/such.qasm", "--qpus", "8,8"]) == 1
    assert "error" in capsys.readouterr().err


def test_capacity_error(rand16, capsys):
    assert run_command(["plan", "--qasm", str(rand16), "--qpus", "4,4"]) == 1
    assert "capacit" in capsys.readouterr().err


def test_usage_errors():
    assert run_command([]) == 1
    assert run_command(["plan"]) == 1
    assert run_command(["frobnicate"]) == 1


def test_kl_requires_two_equal(rand16):
    assert run_command(["partition", "--qasm", str(rand16), "--qpus", "10,8", "--partitioner", "kl"]) == 1
    assert run_command(["partition", "--qasm", str(rand16), "--qpus", "10,8"]) == 0


def test_partition_output(tmp_path):
    out = tmp_path / "p.json"
    assert run_command(["partition", "--qasm", str(DATA / "fixture20.qasm"), "--qpus", "3,3",
                        "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["allocation"]) == 5 and doc["partitioner"] == "kl"


def test_unsupported_gate_is_input_error(tmp_path):
    q = tmp_path / "t.qasm"
    q.write_text("qreg q[3]; ccx q[0],q[1],q[2];")
    assert run_command(["partition", "--qasm", str(q), "--qpus", "2,2"]) == 1


def test_seed_env_fallback(rand16, tmp_path, monkeypatch):
    monkeypatch.setenv("QPART_SEED", "42")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["plan", "--qasm", str(rand16), "--qpus", "8,8", "--profile", "test", "--generations", "2"]
    assert run_command(base + ["--out", str(a)]) == 0
    monkeypatch.delenv("QPART_SEED")
    assert run_command(base + ["--seed", "42", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_config_then_flags(rand16, tmp_path):
    cfg = tmp_path / "ga.toml"
    cfg.write_text('profile = "test"\ngenerations = 2\nmax_blocks = 4\n')
    out = tmp_path / "p.json"
    assert run_command(["plan", "--qasm", str(rand16), "--qpus", "8,8", "--config", str(cfg),
                        "--mab", "6", "--out", str(out)]) == 0
    params = json.loads(out.read_text())["params"]
    assert params["generations"] == 2 and params["max_blocks"] == 6


def test_bench_deterministic(tmp_path, capsys):
    cfg = tmp_path / "spec.toml"
    cfg.write_text(
        'seed = 7\nrepetitions = 2\nmab = [3, 6]\nqpus = [4, 4]\n'
        '[random]\nnum_qubits = [8]\ncx = [60]\n'
        '[ga]\nprofile = "test"\ngenerations = 2\npopulation_size = 6\ninit_mutations = 20\n'
    )
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_command(["bench", "--config", str(cfg), "--out", str(a)]) == 0
    assert run_command(["bench", "--config", str(cfg), "--out", str(b), "--jsonl", str(tmp_path / "b.jsonl")]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5
    assert "mean improvement" in capsys.readouterr().out
