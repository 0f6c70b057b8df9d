from __future__ import annotations

import json
from pathlib import Path

import pytest

from colearn.cli import main


def simulate(out: Path, workers: int = 1, participants: int = 4, seed: int = 99) -> None:
    code = main(
        [
            "simulate",
            "--participants",
            str(participants),
            "--seed",
            str(seed),
            "--caregiver",
            "two-route",
            "--out",
            str(out),
            "--workers",
            str(workers),
        ]
    )
    assert code == 0


def test_simulate_writes_expected_files(tmp_path: Path) -> None:
    out = tmp_path / "run"
    simulate(out)
    files = sorted(out.glob("*.jsonl"))
    assert len(files) == 16  # 4 participants x 4 conditions
    first = files[0].read_text(encoding="utf-8").splitlines()
    assert len(first) == 26  # manifest + 25 trials
    manifest = json.loads(first[0])
    assert manifest["schema_version"] == 1
    assert manifest["mode"] == "headless"


def test_worker_counts_do_not_change_output(tmp_path: Path) -> None:
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    simulate(serial, workers=1)
    simulate(parallel, workers=3)
    serial_files = sorted(p.name for p in serial.glob("*.jsonl"))
    parallel_files = sorted(p.name for p in parallel.glob("*.jsonl"))
    assert serial_files == parallel_files
    for name in serial_files:
        assert (serial / name).read_bytes() == (parallel / name).read_bytes()


def test_replay_subcommand_exit_codes(tmp_path: Path) -> None:
    out = tmp_path / "run"
    simulate(out, participants=1)
    path = next(iter(out.glob("*.jsonl")))
    assert main(["replay", "--transcript", str(path)]) == 0
    lines = path.read_text(encoding="utf-8").splitlines()
    record = json.loads(lines[5])
    record["reward"] = -record["reward"]
    lines[5] = json.dumps(record, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert main(["replay", "--transcript", str(path)]) == 1


def test_analyze_table_and_csv(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    out = tmp_path / "run"
    simulate(out, participants=8)
    assert main(["analyze", "--in", str(out), "--seed", "3", "--permutations", "2000"]) == 0
    table = capsys.readouterr().out
    assert "Condition" in table and "R (SD)" in table and "Block 3 (18-25)" in table
    assert table.count("p ") >= 1 or " p " in table

    assert main(["analyze", "--in", str(out), "--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    assert csv_text.splitlines()[0] == "condition,block,mean_reward,sd,delta_r,n"
    assert len(csv_text.splitlines()) == 13  # header + 4 conditions x 3 blocks


def test_analyze_missing_directory_errors(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        main(["analyze", "--in", str(tmp_path / "nope")])
