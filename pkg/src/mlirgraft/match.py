"""Locating mutation sites by k-ancestor / l,r-sibling matching, and
binding parameters to recipient tokens."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .syntax import QUANTIFIED, SyntaxNode, SyntaxTree, iter_bfs
from .synth import ParameterizedMutation


@dataclass(frozen=True)
class MatchConfig:
    k: int = 4
    l: int = 4
    r: int = 4

    def __post_init__(self):
        for name in ("k", "l", "r"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")


class Anchor:
    """A position in a tree: an existing node, or a gap in a child list.

    For a gap, ``index`` is the insertion index in ``parent.children``.
    """

    __slots__ = ("rule", "parent", "index", "node")

    def __init__(self, rule, parent, index, node=None):
        self.rule = rule
        self.parent = parent
        self.index = index
        self.node = node

    @classmethod
    def of_node(cls, node: SyntaxNode) -> Anchor:
        return cls(node.rule, node.parent, node.index, node)

    @classmethod
    def of_gap(cls, parent: SyntaxNode, index: int) -> Anchor:
        return cls(QUANTIFIED[parent.rule], parent, index)

    def ancestor(self, i: int) -> SyntaxNode | None:
        """i-th ancestor, i >= 1."""
        node = self.parent
        for _ in range(i - 1):
            if node is None:
                return None
            node = node.parent
        return node

    def left(self, i: int) -> SyntaxNode | None:
        if self.parent is None:
            return None
        j = self.index - i
        return self.parent.children[j] if j >= 0 else None

    def right(self, i: int) -> SyntaxNode | None:
        if self.parent is None:
            return None
        j = self.index + i if self.node is not None else self.index + i - 1
        kids = self.parent.children
        return kids[j] if j < len(kids) else None


@dataclass(frozen=True)
class MutationSite:
    kind: str  # "replace" | "insert"
    anchor: Anchor = field(compare=False, hash=False)
    key: tuple = ()

    @classmethod
    def replace(cls, node: SyntaxNode) -> MutationSite:
        return cls("replace", Anchor.of_node(node), ("replace", node.path()))

    @classmethod
    def insert(cls, parent: SyntaxNode, index: int) -> MutationSite:
        return cls("insert", Anchor.of_gap(parent, index), ("insert", parent.path(), index))

    @property
    def node(self) -> SyntaxNode | None:
        return self.anchor.node

    @property
    def parent(self) -> SyntaxNode | None:
        return self.anchor.parent

    @property
    def index(self) -> int | None:
        return self.anchor.index


def mismatch(context: Anchor, candidate: Anchor, cfg: MatchConfig) -> tuple[str, int] | None:
    """First failing comparison as (direction, step), or None on a match.

    Step 0 compares the anchors themselves. Running out of neighbours on
    both sides ends a direction successfully; on one side only, it fails.
    """
    if context.rule != candidate.rule:
        return ("self", 0)
    for direction, step, m in (("ancestor", Anchor.ancestor, cfg.k),
                               ("left", Anchor.left, cfg.l),
                               ("right", Anchor.right, cfg.r)):
        for i in range(1, m + 1):
            p, c = step(context, i), step(candidate, i)
            if p is None and c is None:
                break
            if p is None or c is None or p.rule != c.rule:
                return (direction, i)
    return None


def slot_indices(parent: SyntaxNode) -> range:
    if parent.rule not in QUANTIFIED:
        return range(0)
    n = len(parent.children)
    if parent.rule == "block-label":
        return range(1, n + 1)
    if parent.rule == "block" and parent.children and parent.children[0].rule == "block-label":
        return range(1, n + 1)
    return range(0, n + 1)


def enumerate_insertion_slots(tree: SyntaxTree) -> list[tuple[SyntaxNode, int]]:
    return [(node, i) for node in iter_bfs(tree.root) for i in slot_indices(node)]


def locate(pm: ParameterizedMutation, recipient: SyntaxTree,
           cfg: MatchConfig = MatchConfig()) -> Iterator[MutationSite]:
    """Lazily yield matching sites in breadth-first order.

    Each node is offered first as a replacement, then the gaps in its own
    child list (if quantified) as insertion points.
    """
    ctx = Anchor.of_node(pm.hole)
    rule = ctx.rule
    for node in iter_bfs(recipient.root):
        if node.rule == rule and mismatch(ctx, Anchor.of_node(node), cfg) is None:
            yield MutationSite.replace(node)
        if QUANTIFIED.get(node.rule) == rule:
            for i in slot_indices(node):
                if mismatch(ctx, Anchor.of_gap(node, i), cfg) is None:
                    yield MutationSite.insert(node, i)


# ---------------------------------------------------------------------------
# Parameter binding


@dataclass
class ParameterBinding:
    values: dict[str, str]
    kinds: dict[str, str]
    # recipient terminal path each value came from; None for donor fallback
    provenance: dict[str, tuple[int, ...] | None]
    candidates: dict[str, list[str]] = field(default_factory=dict)

    def __getitem__(self, pid: str) -> str:
        return self.values[pid]


def donor_binding(pm: ParameterizedMutation) -> ParameterBinding:
    return ParameterBinding(
        values=pm.donor_values(),
        kinds={p.id: p.kind for p in pm.params},
        provenance={p.id: None for p in pm.params},
        candidates={p.id: [] for p in pm.params},
    )


def _child_pairs(a: SyntaxNode, b: SyntaxNode):
    if a.rule == "operation":
        # operation children are keyed by rule; optional parts shift positions
        theirs = {c.rule: c for c in b.children}
        for c in a.children:
            d = theirs.get(c.rule)
            if d is not None:
                yield c, d
        return
    for c, d in zip(a.children, b.children):
        if c.rule == d.rule:
            yield c, d


def _neighbourhood(ctx: Anchor, cand: Anchor, cfg: MatchConfig):
    """Sibling pairs within the l/r window at the anchor level and at each of
    the first k-1 ancestor levels, nearest first."""
    for level in range(max(cfg.k, 1)):
        here, there = ctx, cand
        if level > 0:
            p, c = ctx.ancestor(level), cand.ancestor(level)
            if p is None or c is None or p.parent is None or c.parent is None:
                return
            here, there = Anchor.of_node(p), Anchor.of_node(c)
        for step, m in ((Anchor.left, cfg.l), (Anchor.right, cfg.r)):
            for i in range(1, m + 1):
                p, c = step(here, i), step(there, i)
                if p is None or c is None:
                    break
                if p.rule == c.rule:
                    yield p, c


def collect_candidates(pm: ParameterizedMutation, site: MutationSite,
                       cfg: MatchConfig) -> dict[str, list[tuple[str, SyntaxNode]]]:
    """Joint breadth-first traversal of context and recipient around the site.

    Returns, per parameter, the aligned recipient terminals in visit order.
    """
    found: dict[str, list[tuple[str, SyntaxNode]]] = {p.id: [] for p in pm.params}
    kinds = {p.id: p.kind for p in pm.params}
    queue = deque(_neighbourhood(Anchor.of_node(pm.hole), site.anchor, cfg))
    while queue:
        a, b = queue.popleft()
        if a.is_terminal:
            if a.param is not None and b.rule == kinds[a.param]:
                found[a.param].append((b.text, b))
            continue
        queue.extend(_child_pairs(a, b))
    return found


def bind_parameters(pm: ParameterizedMutation, recipient: SyntaxTree, site: MutationSite,
                    cfg: MatchConfig, rng: random.Random) -> ParameterBinding:
    """Choose, per parameter, one distinct aligned lexeme uniformly at random.

    Parameters with no aligned recipient token keep their donor value.
    """
    found = collect_candidates(pm, site, cfg)
    values, kinds, provenance, candidates = {}, {}, {}, {}
    for p in pm.params:
        distinct: dict[str, SyntaxNode] = {}
        for text, node in found[p.id]:
            distinct.setdefault(text, node)
        kinds[p.id] = p.kind
        candidates[p.id] = list(distinct)
        if distinct:
            text = rng.choice(candidates[p.id])
            values[p.id] = text
            provenance[p.id] = distinct[text].path()
        else:
            values[p.id] = p.donor_value
            provenance[p.id] = None
    return ParameterBinding(values, kinds, provenance, candidates)
