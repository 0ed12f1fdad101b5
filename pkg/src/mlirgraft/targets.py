"""Invoking an opt-style target and classifying what came back."""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from enum import Enum

from .reference import reference_validate

BUILTIN_REFERENCE = "builtin:reference"
OUTPUT_CAP = 64 * 1024


class Category(str, Enum):
    VALID = "Valid"
    DIALECT_SPECIFIC = "DialectSpecific"
    GENERAL_MLIR = "GeneralMLIR"
    INVALID_OPTIONS = "InvalidOptions"
    CRASH = "Crash"


class SpawnError(OSError):
    pass


@dataclass(frozen=True)
class RawResult:
    exit_status: int | None  # negative: killed by that signal; None: timed out
    stdout: str
    stderr: str
    duration: float
    timed_out: bool = False


@dataclass(frozen=True)
class FuzzOutcome:
    category: Category
    exit_status: int | None
    diagnostic_text: str
    test_case_path: str | None = None
    pass_pipeline: tuple[str, ...] = ()


def pipeline_flags(pipeline) -> list[str]:
    """``[("cse", None), ("inline", "max-iterations=2")]`` -> ``--cse --inline=max-iterations=2``."""
    return [f"--{name}" if opt is None else f"--{name}={opt}" for name, opt in pipeline]


def _cap(data: bytes) -> str:
    return data[:OUTPUT_CAP].decode("utf-8", errors="replace")


def run_target(target: str, pipeline, text: str, timeout: float = 10.0) -> RawResult:
    flags = pipeline_flags(pipeline)
    start = time.perf_counter()
    if target == BUILTIN_REFERENCE:
        verdict = reference_validate(text, flags)
        return RawResult(verdict.exit_code, "", verdict.stderr, time.perf_counter() - start)
    argv = shlex.split(target)
    fd, path = tempfile.mkstemp(suffix=".mlir")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        try:
            proc = subprocess.run(argv + flags + [path], capture_output=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise SpawnError(f"cannot spawn target {argv[0]!r}: {exc}") from exc
        except PermissionError as exc:
            raise SpawnError(f"cannot execute target {argv[0]!r}: {exc}") from exc
        except subprocess.TimeoutExpired as exc:
            return RawResult(None, _cap(exc.stdout or b""), _cap(exc.stderr or b""),
                             time.perf_counter() - start, timed_out=True)
        return RawResult(proc.returncode, _cap(proc.stdout), _cap(proc.stderr),
                         time.perf_counter() - start)
    finally:
        os.unlink(path)


INVALID_OPTION_PATTERNS = [re.compile(r"no such option", re.I)]
GENERAL_PATTERNS = [re.compile(p) for p in (
    r"use of undeclared SSA value",
    r"redefinition of SSA value",
    r"undefined symbol",
    r"expects different type than prior uses",
    r"expected \d+ operand types but had \d+",
    r"results but was provided \d+ to bind",
    r"syntax error",
)]


def classify_outcome(raw: RawResult, pipeline=(), test_case_path=None) -> FuzzOutcome:
    status = raw.exit_status
    if raw.timed_out or status is None or status < 0:
        cat = Category.CRASH
    elif status == 0:
        cat = Category.VALID
    elif any(p.search(raw.stderr) for p in INVALID_OPTION_PATTERNS):
        cat = Category.INVALID_OPTIONS
    elif any(p.search(raw.stderr) for p in GENERAL_PATTERNS):
        cat = Category.GENERAL_MLIR
    else:
        cat = Category.DIALECT_SPECIFIC
    return FuzzOutcome(cat, status, raw.stderr, test_case_path, tuple(pipeline_flags(pipeline)))
