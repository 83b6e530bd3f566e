from __future__ import annotations

import json
import subprocess
import sys

import pytest

from adcs.cli import (
    EXIT_CAP,
    EXIT_CONFIG,
    EXIT_OK,
    ExperimentConfig,
    execute,
    main,
    sweep,
    sweep_cells,
)


def _run(tmp_path, *argv) -> tuple[int, dict | None]:
    out = tmp_path / "summary.json"
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_rmc_small_clique(tmp_path):
    code, doc = _run(tmp_path, "run", "--protocol", "rmc", "--n", "3", "--ell", "1")
    assert code == EXIT_OK and doc["success"]
    assert doc["result"]["outputs"] == [3, 3, 3]
    assert doc["result"]["audit"]["ok"]
    assert [v for _, v in doc["result"]["estimate_path"]][-1] == "done"


def test_all_to_all_pair(tmp_path):
    code, doc = _run(tmp_path, "run", "--protocol", "all2all", "--n", "2", "--messages", "0,1")
    assert code == EXIT_OK and doc["result"]["outputs"][0] == doc["ground_truth"]


def test_multiplicity_and_broadcast(tmp_path):
    code, doc = _run(tmp_path, "run", "--protocol", "multiplicity", "--n", "4",
                     "--schedule", "static-path", "--messages", "10,0,10,11", "--target", "10")
    assert code == EXIT_OK and doc["result"]["outputs"] == [2] * 4
    code, doc = _run(tmp_path, "run", "--protocol", "broadcast", "--n", "4",
                     "--schedule", "static-path", "--sources", "3")
    assert code == EXIT_OK and doc["result"]["outputs"] == [True] * 4


def test_round_cap_exit_code(tmp_path):
    code, doc = _run(tmp_path, "run", "--n", "3", "--cap", "10")
    assert code == EXIT_CAP and doc is None


@pytest.mark.parametrize("argv", [["--ell", "3"], ["--i-min", "0"], ["--i-min", "5"],
                                  ["--mode", "reduced", "--reduce", "1,2"]])
def test_config_errors(tmp_path, argv):
    code, _ = _run(tmp_path, "run", "--n", "3", *argv)
    assert code == EXIT_CONFIG


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "colour": "red"}))
    assert _run(tmp_path, "run", "--config", str(cfg))[0] == EXIT_CONFIG


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"protocol": "multiplicity", "n": 5, "messages": ["1"] * 5}))
    code, doc = _run(tmp_path, "run", "--config", str(cfg), "--n", "3",
                     "--messages", "1,0,1")
    assert code == EXIT_OK and doc["config"]["n"] == 3 and doc["ground_truth"] == 2


def test_schedule_file_and_analyze(tmp_path):
    sched = tmp_path / "s.txt"
    sched.write_text("n=3 T=2\nt=0: 0-1\nt=1: 1-2\n")
    code, doc = _run(tmp_path, "analyze", "--schedule-file", str(sched))
    assert code == EXIT_OK
    assert doc["i_min"] == "1" and len(doc["windows"]) == 1
    sched.write_text("n=3 T=2\nt=0: 0-1,1-2\nt=1: 0-2\n")
    code, doc = _run(tmp_path, "run", "--schedule-file", str(sched), "--n", "3", "--T", "2",
                     "--protocol", "broadcast")
    assert code == EXIT_OK and doc["success"]


def test_disconnected_schedule_file_is_config_error(tmp_path):
    sched = tmp_path / "s.txt"
    sched.write_text("n=3 T=1\nt=0: 0-1\n")
    code, _ = _run(tmp_path, "run", "--schedule-file", str(sched), "--n", "3")
    assert code == EXIT_CONFIG


def test_summary_reproduces_byte_for_byte(tmp_path):
    first = tmp_path / "a.json"
    assert main(["run", "--n", "3", "--ell", "2", "--mode", "reduced",
                 "--schedule", "matching-alternation", "--out", str(first)]) == EXIT_OK
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(json.loads(first.read_text())["config"]))
    second = tmp_path / "b.json"
    assert main(["run", "--config", str(cfg), "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_trace_file_is_json_lines(tmp_path):
    trace = tmp_path / "t.jsonl"
    code, doc = _run(tmp_path, "run", "--n", "2", "--mode", "reduced", "--trace", str(trace))
    lines = trace.read_text().splitlines()
    assert code == EXIT_OK
    assert len(lines) == 2 * doc["result"]["rounds"]
    assert json.loads(lines[0])["round"] == 0


def test_empty_sweep(tmp_path):
    code, doc = _run(tmp_path, "sweep", "--n", "2", "--ell", "5")
    assert code == EXIT_OK and doc["total"] == 0 and doc["matrix"] == {}


def test_sweep_records_failing_cell_and_continues(tmp_path):
    code, doc = _run(tmp_path, "sweep", "--n", "3", "--ell", "2", "--T", "1",
                     "--schedules", "static-path,static-clique", "--mode", "reduced",
                     "--reduce", "8,2000,4")
    assert code == EXIT_OK and doc["reduced"]
    row = doc["matrix"]["n=3"]
    assert row["ell=2,T=1,static-path#0"] == "error"
    assert row["ell=2,T=1,static-clique#0"] == "pass"
    assert doc["passed"] == 1 and doc["total"] == 2


def test_sweep_in_process_matches_cells():
    cells = sweep_cells("rmc", [2], "all", [1], ["static-clique"], [1], "reduced")
    report = sweep(cells)
    assert report["passed"] == report["total"] == 1


def test_execute_embeds_public_config():
    doc = execute(ExperimentConfig(n=2, mode="reduced"))
    assert "trace" not in doc["config"] and doc["reduced"]


def test_module_entry_point_verify():
    proc = subprocess.run([sys.executable, "-m", "adcs", "verify"], capture_output=True,
                          text=True, timeout=600)
    assert proc.returncode == 0, proc.stdout + proc.stderr
