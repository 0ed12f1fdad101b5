from __future__ import annotations

import json
import subprocess
import sys

from mlirgraft.cli import main

from helpers import FIXTURES, fixture_text


def test_mutate_command(capsys):
    code = main(["mutate", "--donor", str(FIXTURES / "donor.mlir"),
                 "--recipient", str(FIXTURES / "recipient.mlir"), "--seed", "1"])
    assert code == 0
    assert capsys.readouterr().out == fixture_text("grafted.mlir")


def test_mutate_explain(capsys):
    main(["mutate", "--donor", str(FIXTURES / "donor.mlir"),
          "--recipient", str(FIXTURES / "recipient.mlir"), "--seed", "1", "--explain"])
    out = capsys.readouterr().out
    for line in ("// A -> %arg0", "// B -> %0", "// C -> i4", "// D -> %1"):
        assert line in out


def test_mutate_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.mlir"
    bad.write_text("comb.add %x")
    code = main(["mutate", "--donor", str(bad), "--recipient", str(bad)])
    assert code == 1 and "error:" in capsys.readouterr().err


def test_analyze(capsys):
    assert main(["analyze", "--corpus", str(FIXTURES), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert ["comb", "sv"] in data["control_pairs"]


def test_analyze_empty(tmp_path, capsys):
    assert main(["analyze", "--corpus", str(tmp_path)]) == 1


def test_fuzz(tmp_path, capsys):
    code = main(["fuzz", "--iters", "30", "--seed", "3", "--out", str(tmp_path),
                 "--k", "2", "--l", "1", "--r", "1", "--pass-selection", "random"])
    assert code == 0
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["iterations"] == 30 and data["config"]["k"] == 2
    assert "invocations" in capsys.readouterr().out


def test_fuzz_with_pass_file_and_seeds(tmp_path):
    passes = tmp_path / "passes.txt"
    passes.write_text("cse\ncanonicalize\ttop-down=false\n")
    code = main(["fuzz", "--seeds", str(FIXTURES), "--passes", str(passes), "--p", "1",
                 "--iters", "20", "--no-parameterization"])
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mlirgraft", "analyze", "--corpus", str(FIXTURES)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "control pairs" in proc.stdout
