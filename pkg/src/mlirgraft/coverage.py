"""Dialect coverage and control/data dialect-pair coverage."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .constraints import def_use_events, op_blocks, op_name
from .syntax import SyntaxNode, SyntaxTree


def dialect_of(name: str) -> str:
    name = name.strip('"')
    return name.split(".", 1)[0]


class DialectPair(NamedTuple):
    first: str
    second: str
    dependence: str  # "control" | "data"

    @classmethod
    def of(cls, a: str, b: str, dependence: str) -> DialectPair:
        lo, hi = sorted((a, b))
        return cls(lo, hi, dependence)


def _op_dialect(op: SyntaxNode) -> str:
    return dialect_of(op_name(op))


def _ops(tree: SyntaxTree) -> list[SyntaxNode]:
    return [n for n in tree.root.iter_preorder() if n.rule == "operation" and not n.hole]


def dialects(tree: SyntaxTree) -> set[str]:
    return {_op_dialect(op) for op in _ops(tree)}


def control_dialect_pairs(tree: SyntaxTree) -> set[DialectPair]:
    """Pairs (A, B) where B is nested at any region depth inside A."""
    pairs = set()
    for outer in _ops(tree):
        da = _op_dialect(outer)
        for _, block in op_blocks(outer):
            for inner in block.iter_preorder():
                if inner.rule == "operation" and not inner.hole:
                    db = _op_dialect(inner)
                    if db != da:
                        pairs.add(DialectPair.of(da, db, "control"))
    return pairs


def data_dialect_pairs(tree: SyntaxTree) -> set[DialectPair]:
    """Pairs (A, B) where B consumes a result of A. Block arguments add none."""
    pairs = set()
    for ev in def_use_events(tree):
        if ev.kind != "use" or ev.use.definition is None or ev.use.definition.op is None:
            continue
        da, db = _op_dialect(ev.use.definition.op), _op_dialect(ev.use.op)
        if da != db:
            pairs.add(DialectPair.of(da, db, "data"))
    return pairs


@dataclass(frozen=True)
class CoverageReport:
    dialects: frozenset[str] = field(default_factory=frozenset)
    control_pairs: frozenset[DialectPair] = field(default_factory=frozenset)
    data_pairs: frozenset[DialectPair] = field(default_factory=frozenset)

    @classmethod
    def of(cls, tree: SyntaxTree) -> CoverageReport:
        """Per-test-case view."""
        return cls(frozenset(dialects(tree)), frozenset(control_dialect_pairs(tree)),
                   frozenset(data_dialect_pairs(tree)))

    def merge(self, other: CoverageReport) -> CoverageReport:
        return CoverageReport(self.dialects | other.dialects,
                              self.control_pairs | other.control_pairs,
                              self.data_pairs | other.data_pairs)

    def counts(self) -> dict[str, int]:
        return {"dialects": len(self.dialects), "control": len(self.control_pairs),
                "data": len(self.data_pairs)}

    def to_json(self) -> dict:
        return {
            "dialects": sorted(self.dialects),
            "control_pairs": sorted([p.first, p.second] for p in self.control_pairs),
            "data_pairs": sorted([p.first, p.second] for p in self.data_pairs),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        c = self.counts()
        lines = [f"dialects {c['dialects']}: {' '.join(sorted(self.dialects))}",
                 f"control pairs {c['control']}"]
        lines += [f"  ({p.first}, {p.second})" for p in sorted(self.control_pairs)]
        lines.append(f"data pairs {c['data']}")
        lines += [f"  ({p.first}, {p.second})" for p in sorted(self.data_pairs)]
        return "\n".join(lines) + "\n"


def accumulate(report: CoverageReport, tree: SyntaxTree) -> CoverageReport:
    return report.merge(CoverageReport.of(tree))
