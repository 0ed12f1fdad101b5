from __future__ import annotations

import pytest

from mlirgraft.targets import (
    OUTPUT_CAP, Category, RawResult, SpawnError, classify_outcome, pipeline_flags, run_target,
)

from stubs import NOISY, SLEEPER, abort_stub, write_stub


def _raw(status, stderr="", timed_out=False):
    return RawResult(status, "", stderr, 0.0, timed_out)


@pytest.mark.parametrize("raw,category", [
    (_raw(0), Category.VALID),
    (_raw(1, "error: 'tosa.logical_or' op result #0 must be tensor of 1-bit signless integer values"),
     Category.DIALECT_SPECIFIC),
    (_raw(1, "error: no such option exists"), Category.INVALID_OPTIONS),
    (_raw(1, "error: use of undeclared SSA value name '%c1'"), Category.GENERAL_MLIR),
    (_raw(1, "error: redefinition of SSA value '%0'"), Category.GENERAL_MLIR),
    (_raw(1, "error: reference to undefined symbol '@f'"), Category.GENERAL_MLIR),
    (_raw(-6), Category.CRASH),
    (_raw(None, timed_out=True), Category.CRASH),
    (_raw(1, "no such option exists\nuse of undeclared SSA value"), Category.INVALID_OPTIONS),
])
def test_classification(raw, category):
    assert classify_outcome(raw).category is category


def test_outcome_records_pipeline():
    out = classify_outcome(_raw(0), [("cse", None), ("inline", "max-iterations=2")], "x.mlir")
    assert out.pass_pipeline == ("--cse", "--inline=max-iterations=2")
    assert out.test_case_path == "x.mlir"


def test_pipeline_flags():
    assert pipeline_flags([]) == []
    assert pipeline_flags([("a", None), ("b", "o=1")]) == ["--a", "--b=o=1"]


def test_missing_binary():
    with pytest.raises(SpawnError):
        run_target("/nonexistent/opt-tool", [], "")


def test_timeout(tmp_path):
    raw = run_target(write_stub(tmp_path, "sleeper", SLEEPER), [], "", timeout=0.5)
    assert raw.timed_out and raw.exit_status is None
    assert classify_outcome(raw).category is Category.CRASH


def test_abort(tmp_path):
    target = abort_stub(tmp_path, b"MAGIC")
    raw = run_target(target, [], '"t.MAGIC"() : () -> ()\n')
    assert raw.exit_status is not None and raw.exit_status < 0
    assert classify_outcome(raw).category is Category.CRASH
    assert run_target(target, [], '"t.ok"() : () -> ()\n').exit_status == 0


def test_output_is_capped(tmp_path):
    raw = run_target(write_stub(tmp_path, "noisy", NOISY), [], "")
    assert raw.exit_status == 1 and len(raw.stderr) == OUTPUT_CAP
