"""Scope-aware def-use analysis shared by the generic constraint checker,
the dialect-pair coverage and the reference target."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .syntax import SyntaxNode, SyntaxTree, parse, print_tree


def def_name(lexeme: str) -> str:
    """``%x:2`` defines ``%x``."""
    return lexeme.split(":", 1)[0]


def use_name(lexeme: str) -> str:
    """``%x#1`` refers to ``%x``."""
    return lexeme.split("#", 1)[0]


def children_by_rule(op: SyntaxNode) -> dict[str, SyntaxNode]:
    return {c.rule: c for c in op.children}


def op_name(op: SyntaxNode) -> str:
    return children_by_rule(op)["op-name"].children[0].text.strip('"')


def op_blocks(op: SyntaxNode) -> Iterator[tuple[SyntaxNode, SyntaxNode]]:
    """(region, block) pairs of an operation, in order."""
    regions = children_by_rule(op).get("region-list")
    if regions is None:
        return
    for region in regions.children:
        for block in region.children:
            yield region, block


def block_ops(block: SyntaxNode) -> list[SyntaxNode]:
    return [c for c in block.children if c.rule == "operation"]


def block_args(block: SyntaxNode) -> list[SyntaxNode]:
    if block.children and block.children[0].rule == "block-label":
        return block.children[0].children[1:]
    return []


class Definition(NamedTuple):
    name: str
    node: SyntaxNode  # the defining terminal
    op: SyntaxNode | None  # defining operation; None for a block argument
    result_index: int  # position among the op's results / the block's args


class Use(NamedTuple):
    name: str
    node: SyntaxNode  # the value-id terminal
    op: SyntaxNode
    operand_index: int
    definition: Definition | None


class Event(NamedTuple):
    kind: str  # "use" | "redefinition"
    use: Use | None
    definition: Definition | None


def def_use_events(tree: SyntaxTree) -> Iterator[Event]:
    """Walk the program in textual order resolving every operand.

    Block arguments and results define values. A nested region sees the
    definitions visible just before its operation; within one region, later
    blocks also see the definitions of earlier blocks. Redefinition is
    reported when a name is defined twice in the same block.
    """
    yield from _walk_block(tree.root.children, [], {})


def _walk_block(ops, args, outer: dict[str, Definition]) -> Iterator[Event]:
    visible = dict(outer)
    local: dict[str, Definition] = {}
    for i, arg in enumerate(args):
        term = arg.children[0]
        d = Definition(def_name(term.text), term, None, i)
        yield from _define(d, local, visible)
    for op in ops:
        yield from _walk_op(op, local, visible)
    return visible


def _define(d: Definition, local, visible) -> Iterator[Event]:
    if d.name in local:
        yield Event("redefinition", None, d)
    local[d.name] = d
    visible[d.name] = d


def _walk_op(op: SyntaxNode, local, visible) -> Iterator[Event]:
    if op.hole:
        return
    parts = children_by_rule(op)
    for j, vu in enumerate(parts["operand-list"].children):
        if vu.hole or not vu.children:
            continue
        term = vu.children[0]
        name = use_name(term.text)
        yield Event("use", Use(name, term, op, j, visible.get(name)), None)
    snapshot = dict(visible)
    regions = parts.get("region-list")
    if regions is not None:
        for region in regions.children:
            seen = dict(snapshot)
            for block in region.children:
                if block.hole:
                    continue
                seen = yield from _walk_block(block_ops(block), block_args(block), seen)
    for i, term in enumerate(parts["result-list"].children):
        yield from _define(Definition(def_name(term.text), term, op, i), local, visible)


@dataclass(frozen=True)
class Violation:
    kind: str  # "UseBeforeDef" | "Redefinition"
    value_name: str
    position: tuple[int, int] | None = None

    def __str__(self):
        return f"{self.kind}({self.value_name})"


def _violations(tree: SyntaxTree) -> list[Violation]:
    out = []
    for ev in def_use_events(tree):
        if ev.kind == "use" and ev.use.definition is None:
            out.append(Violation("UseBeforeDef", ev.use.name, ev.use.node.span))
        elif ev.kind == "redefinition":
            out.append(Violation("Redefinition", ev.definition.name, ev.definition.node.span))
    return out


def check_generic_constraints(tree: SyntaxTree) -> list[Violation]:
    """Def-use and redefinition violations; empty means generically valid.

    Positions are spans into the canonical printed text of ``tree``.
    """
    return _violations(parse(print_tree(tree)))
