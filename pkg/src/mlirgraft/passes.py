"""Pass tables: one pass per line, optional tab-separated legal options."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class PassSpec:
    name: str
    options: tuple[str, ...] = ()


def parse_pass_table(text: str) -> list[PassSpec]:
    passes = []
    for line in text.splitlines():
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        name, *opts = [f.strip() for f in line.split("\t")]
        passes.append(PassSpec(name, tuple(o for o in opts if o)))
    return passes


def load_pass_file(path) -> list[PassSpec]:
    return parse_pass_table(Path(path).read_text())


def default_passes() -> list[PassSpec]:
    return parse_pass_table(resources.files("mlirgraft").joinpath("passes.txt").read_text())


def option_pool(passes) -> list[str]:
    return sorted({o for p in passes for o in p.options})
