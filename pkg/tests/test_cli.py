import json
import os

import pytest
from click.testing import CliRunner

from scripts.cli import main
from scripts.models import ChainTrace, LinearCode


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_json(tmp_path):
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)
    return _write


def data(data_dir, name):
    return os.path.join(data_dir, name)


def test_bound_p1(runner, data_dir):
    result = runner.invoke(main, ["bound", "--in", data(data_dir, "p1.json")])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["lb_longest_chain"] == 4
    assert report["lb_algorithmic"] == 5
    assert report["ub_construction"] == 5
    assert report["beta_confirmed"] == 5
    assert report["structure"]["tag"] == "prop1_triple"


def test_bound_is_deterministic(runner, data_dir):
    args = ["bound", "--in", data(data_dir, "p2.json")]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)["beta_confirmed"] == 4


def test_bound_skips_algorithmic_bound_past_work_budget(runner, write_json, tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("solver:\n  max_work: 1\n")
    path = write_json("perfect.json", {"m": 9, "absent": [
        [1], [1, 2, 3, 4], [1, 5, 6], [1, 7, 8, 9],
        [1, 2, 3, 4, 5, 6], [1, 2, 3, 4, 7, 8, 9], [1, 5, 6, 7, 8, 9],
    ]})
    result = runner.invoke(main, ["--config", str(config), "bound", "--in", path])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["lb_algorithmic"] is None
    assert report["beta_confirmed"] == 6


def test_trace_past_work_budget_exits_2(runner, data_dir, tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("solver:\n  max_work: 1\n")
    result = runner.invoke(main, ["--config", str(config), "trace", "--in", data(data_dir, "p1.json")])
    assert result.exit_code == 2
    assert "cap exceeded" in result.output


def test_bound_writes_out(runner, data_dir, tmp_path):
    out = tmp_path / "reports" / "p2.json"
    result = runner.invoke(main, ["bound", "--in", data(data_dir, "p2.json"), "--out", str(out)])
    assert result.exit_code == 0
    assert json.loads(out.read_text()) == json.loads(result.stdout)


def test_verify_p2(runner, data_dir):
    result = runner.invoke(main, [
        "verify", "--in", data(data_dir, "p2.json"), "--code", data(data_dir, "p2_code.json"),
    ])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["ok"] is True
    assert payload["length"] == 4
    assert len(payload["decoding"]) == 2 ** 5 - 1 - 4


def test_verify_failing_code(runner, data_dir, write_json):
    code = write_json("bad.json", {"q": 2, "rows": [[1, 1, 1, 1, 1]]})
    result = runner.invoke(main, ["verify", "--in", data(data_dir, "p2.json"), "--code", code])
    assert result.exit_code == 1


def test_missing_file_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["classify", "--in", str(tmp_path / "nope.json")])
    assert result.exit_code == 2
    assert "file not found" in result.output


@pytest.mark.parametrize("payload", [
    '{"m": 3, "absent": [[1, 2, 3]]}',
    '{"m": 3, "absent": [[1], [1]]}',
    '{"m": 3, "absent": [[4]]}',
    'not json',
])
def test_schema_errors_exit_2(runner, write_json, payload):
    path = write_json("inst.json", payload)
    result = runner.invoke(main, ["bound", "--in", path])
    assert result.exit_code == 2
    assert "schema violation" in result.output


def test_code_schema_error_exits_2(runner, data_dir, write_json):
    code = write_json("code.json", {"q": 2, "rows": [[1, 0]]})
    result = runner.invoke(main, ["verify", "--in", data(data_dir, "p2.json"), "--code", code])
    assert result.exit_code == 2


def test_oracle_cap_exits_2(runner, data_dir, monkeypatch):
    monkeypatch.delenv("PIC_MAX_M", raising=False)
    result = runner.invoke(main, ["oracle", "--in", data(data_dir, "p1.json")])
    assert result.exit_code == 2
    assert "cap exceeded" in result.output


def test_oracle_p2(runner, data_dir):
    result = runner.invoke(main, ["oracle", "--in", data(data_dir, "p2.json")])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["min_linear_length"] == 4
    assert "brute_force_L_star" not in payload


def test_oracle_small_instance_adds_brute_force(runner, write_json):
    path = write_json("perfect.json", {"m": 4, "absent": [[], [1, 2], [3, 4]]})
    result = runner.invoke(main, ["oracle", "--in", path])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["min_linear_length"] == 2
    assert payload["brute_force_L_star"] == 2


def test_classify(runner, write_json):
    path = write_json("trunc.json", {"m": 3, "absent": [[], [1], [2], [3]]})
    result = runner.invoke(main, ["classify", "--in", path])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["tag"] == "truncated_nested"
    assert payload["T"] == 1
    assert payload["partition"] == [[], [1], [2], [3]]


def test_construct_then_verify(runner, data_dir, tmp_path):
    out = str(tmp_path / "p1_code.json")
    result = runner.invoke(main, ["construct", "--in", data(data_dir, "p1.json"), "--out", out])
    assert result.exit_code == 0, result.output
    with open(out, encoding="utf-8") as fh:
        code = LinearCode.from_dict(json.load(fh))
    assert len(code) == 5
    result = runner.invoke(main, ["verify", "--in", data(data_dir, "p1.json"), "--code", out])
    assert result.exit_code == 0


def test_construct_rejects_bad_q(runner, data_dir):
    result = runner.invoke(main, ["construct", "--in", data(data_dir, "p1.json"), "--q", "four"])
    assert result.exit_code == 2


def test_trace_emits_certificate(runner, data_dir, tmp_path):
    trace_path = str(tmp_path / "trace.json")
    result = runner.invoke(main, [
        "trace", "--in", data(data_dir, "p1.json"), "--emit-trace", trace_path,
    ])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["acyclic"] is True
    assert payload["L_star"] == 1
    with open(trace_path, encoding="utf-8") as fh:
        trace = ChainTrace.from_dict(json.load(fh))
    assert trace.order == payload["order"]
    assert trace.skipped == payload["skipped"]


def test_trace_with_code(runner, data_dir):
    result = runner.invoke(main, [
        "trace", "--in", data(data_dir, "p2.json"),
        "--code", data(data_dir, "p2_code.json"), "--policy", "option1",
    ])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["L_star"] is None
    assert payload["acyclic"] is True


def test_sweep_m3(runner, tmp_path):
    out = str(tmp_path / "sweep_m3.csv")
    result = runner.invoke(main, ["sweep", "--m", "3", "--max-absent", "2", "--q", "2", "--out", out])
    assert result.exit_code == 0, result.output
    assert "0 disagreements" in result.stdout
    assert os.path.exists(out)
    assert os.path.exists(str(tmp_path / "sweep_m3.json"))


def test_sweep_cap_exits_2(runner, tmp_path):
    result = runner.invoke(main, [
        "sweep", "--m", "7", "--max-absent", "1", "--out", str(tmp_path / "s.csv"),
    ])
    assert result.exit_code == 2
