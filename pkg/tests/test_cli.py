import csv
import io
import json

import pytest

from macroforge.cli.bench import BENCH_COLUMNS
from macroforge.cli.main import cli_main
from macroforge.planner.core.action_graph import trace_program
from macroforge.planner.domains.hanoi import HanoiConfig, gen_hanoi, hanoi_subtow_program
from macroforge.planner.models.plan import SuccinctPlan
from macroforge.planner.utils.serialization import dump_plan


@pytest.fixture
def hanoi3_file(tmp_path):
    path = tmp_path / "hanoi3.json"
    assert cli_main(["gen", "hanoi", "--disks", "3", "--out", str(path)]) == 0
    return path


def test_gen_writes_instance_json(capsys):
    assert cli_main(["gen", "blocksworld", "--blocks", "3", "--seed", "4"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["domain"] == "blocksworld"
    assert document["name"] == "blocksworld-3-seed4"


def test_solve_expand_validate(hanoi3_file, tmp_path, capsys):
    plan = tmp_path / "plan.json"
    argv = ["solve", "--instance", str(hanoi3_file), "--width", "7", "--filter", "consistent"]
    assert cli_main([*argv, "--out", str(plan)]) == 0
    assert cli_main(["expand", "--plan", str(plan), "--count-only"]) == 0
    assert capsys.readouterr().out == "7\n"
    assert cli_main(["expand", "--plan", str(plan)]) == 0
    steps = capsys.readouterr().out.split()
    assert len(steps) == 7 and all(step.startswith("move-") for step in steps)
    argv = ["validate", "--instance", str(hanoi3_file), "--plan", str(plan), "--strict"]
    assert cli_main(argv) == 0
    assert capsys.readouterr().out == "valid\n"


def test_instance_from_stdin(hanoi3_file, monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(hanoi3_file.read_text()))
    assert cli_main(["solve", "--width", "7", "--filter", "consistent"]) == 0
    assert json.loads(capsys.readouterr().out)["format"] == "macroforge-plan/1"


def test_baseline_gives_up_on_four_disks(tmp_path, capsys):
    path = tmp_path / "hanoi4.json"
    cli_main(["gen", "hanoi", "--disks", "4", "--out", str(path)])
    argv = ["solve", "--instance", str(path), "--width", "7", "--filter", "consistent"]
    assert cli_main([*argv, "--mode", "baseline"]) == 2
    assert capsys.readouterr().out == "?\n"


def test_ball_cap_exit_code(hanoi3_file):
    argv = ["solve", "--instance", str(hanoi3_file), "--width", "7", "--ball-cap", "2"]
    assert cli_main(argv) == 3


def test_macros_command(tmp_path, capsys):
    path = tmp_path / "hanoi2.json"
    cli_main(["gen", "hanoi", "--disks", "2", "--out", str(path)])
    argv = ["macros", "--instance", str(path), "--width", "7", "--filter", "consistent"]
    assert cli_main(argv) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["format"] == "macroforge-macros/1"
    assert len(document["edges"]) == 9 * 8
    state = json.dumps({"on-d1": "p2", "on-d2": "p1", "clear-d1": "T", "clear-d2": "T",
                        "clear-p1": "F", "clear-p2": "F", "clear-p3": "T"})
    assert cli_main([*argv, "--state", state, "--strict-scan"]) == 0
    assert len(json.loads(capsys.readouterr().out)["edges"]) == 9 * 8


def test_expand_ten_disk_tower_macro(tmp_path, capsys):
    instance = gen_hanoi(HanoiConfig(ndisks=10))
    states, commands = hanoi_subtow_program(instance, 10)
    trace = trace_program(commands, states, instance.actions)
    top = trace.produced[-1].action
    plan = SuccinctPlan(library=trace.graph.library.restricted_to([top]), top=[top])
    path = tmp_path / "plan.json"
    path.write_text(dump_plan(plan, instance))
    assert cli_main(["expand", "--plan", str(path), "--count-only"]) == 0
    assert capsys.readouterr().out == "1023\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve"],
        ["solve", "--width", "seven"],
        ["gen", "hanoi"],
        ["frobnicate"],
    ],
)
def test_flag_errors_exit_with_one(argv):
    with pytest.raises(SystemExit) as info:
        cli_main(argv)
    assert info.value.code == 1


def test_bad_input_exits_with_one(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"variables": []')
    assert cli_main(["solve", "--instance", str(broken), "--width", "1"]) == 1
    assert cli_main(["solve", "--instance", str(tmp_path / "missing.json"), "--width", "1"]) == 1
    assert cli_main(["gen", "hanoi", "--disks", "0"]) == 1
    assert cli_main(["solve", "--instance", str(broken), "--width", "0"]) == 1


def test_bench_writes_csv(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(
        json.dumps(
            {
                "seed": 1,
                "cells": [
                    {"domain": "hanoi", "size": 2, "mode": "macro", "width": 7},
                    {"domain": "hanoi", "size": 2, "mode": "baseline", "width": 7},
                    {"domain": "blocksworld", "size": 3, "width": 10, "instances": 2},
                ],
            }
        )
    )
    out = tmp_path / "bench.csv"

    def rows():
        assert cli_main(["bench", "--suite", str(suite), "--out", str(out)]) == 0
        with out.open() as f:
            reader = csv.DictReader(f)
            assert reader.fieldnames == BENCH_COLUMNS
            return [{k: v for k, v in row.items() if k != "wall_ms"} for row in reader]

    first = rows()
    assert len(first) == 4
    assert [row["instance"] for row in first] == [
        "hanoi-2",
        "hanoi-2",
        "blocksworld-3-seed1",
        "blocksworld-3-seed2",
    ]
    assert first[0]["expanded_length"] == "3"
    assert all(row["outcome"] == "solved" for row in first)
    assert rows() == first
