"""Synthesis of a parameterized mutation and its parameterized context."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .syntax import SyntaxNode, SyntaxTree, TokenKind, iter_bfs, print_node, print_tree

ELIGIBLE_RULES = frozenset({"operation", "region", "block", "value-use", "type", "attr-entry"})
PARAM_KINDS = frozenset({TokenKind.VALUE_ID.value, TokenKind.TYPE_TOKEN.value, TokenKind.INT_LIT.value})


class NoEligibleNode(ValueError):
    pass


@dataclass
class Parameter:
    id: str
    kind: str
    donor_value: str
    # ("mutation" | "context", child-index path from that side's root)
    occurrences: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)


@dataclass
class ParameterizedMutation:
    mutation_root: SyntaxNode
    context: SyntaxTree
    params: list[Parameter]
    hole_path: tuple[int, ...]

    @property
    def hole(self) -> SyntaxNode:
        return self.context.root.at(self.hole_path)

    def param(self, pid: str) -> Parameter:
        for p in self.params:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def donor_values(self) -> dict[str, str]:
        return {p.id: p.donor_value for p in self.params}

    def regraft(self) -> SyntaxTree:
        """Erase parameters and put the mutation back into the hole."""
        root = _erase(self.context.root.copy())
        sub = _erase(self.mutation_root.copy())
        if not self.hole_path:
            return SyntaxTree(sub, self.context.source, self.context.name)
        hole = root.at(self.hole_path)
        parent = hole.parent
        parent.children[hole.index] = sub
        sub.parent = parent
        return SyntaxTree(root, self.context.source, self.context.name)


def _erase(node: SyntaxNode) -> SyntaxNode:
    for n in node.iter_preorder():
        n.param = None
    return node


def param_name(i: int) -> str:
    """A, B, ..., Z, AA, AB, ..."""
    name = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        name = chr(ord("A") + rem) + name
    return name


def eligible_nodes(tree: SyntaxTree) -> list[SyntaxNode]:
    return [n for n in iter_bfs(tree.root) if n.rule in ELIGIBLE_RULES]


def select_mutation_subtree(donor: SyntaxTree, rng: random.Random) -> SyntaxNode:
    nodes = eligible_nodes(donor)
    if not nodes:
        raise NoEligibleNode(f"donor {donor.name or '<anonymous>'} has no eligible subtree")
    return rng.choice(nodes)


def bisect(donor: SyntaxTree, subtree: SyntaxNode) -> tuple[SyntaxTree, SyntaxNode]:
    """Split the donor at ``subtree``: a context with a hole, and a detached copy."""
    path = subtree.path()
    if donor.root.at(path) is not subtree:
        raise ValueError("subtree does not belong to donor")
    mutation = subtree.copy()
    hole = SyntaxNode(subtree.rule)
    hole.hole = True
    if not path:
        return SyntaxTree(hole, donor.source, donor.name), mutation
    root = donor.root.copy()
    target = root.at(path)
    parent = target.parent
    parent.children[target.index] = hole
    hole.parent = parent
    return SyntaxTree(root, donor.source, donor.name), mutation


def parameterize(context: SyntaxTree, mutation: SyntaxNode) -> ParameterizedMutation:
    """Abstract every value id, type or integer literal shared by both sides.

    Parameters are named in breadth-first order of their first occurrence in
    the context.
    """
    hole = next((n for n in context.root.iter_preorder() if n.hole), None)
    if hole is None:
        raise ValueError("context has no hole")
    hole_path = hole.path()

    mut_terms = [n for n in mutation.iter_preorder() if n.rule in PARAM_KINDS]
    shared = {n.text for n in mut_terms}
    ctx_terms = [n for n in iter_bfs(context.root) if n.rule in PARAM_KINDS and n.text in shared]

    params: dict[str, Parameter] = {}
    for node in ctx_terms:
        if node.text not in params:
            params[node.text] = Parameter(param_name(len(params)), node.rule, node.text)
    for node in ctx_terms:
        p = params[node.text]
        node.param = p.id
        p.occurrences.append(("context", node.path()))
    for node in mut_terms:
        p = params.get(node.text)
        if p is not None:
            node.param = p.id
            p.occurrences.append(("mutation", _path_from(mutation, node)))
    return ParameterizedMutation(mutation, context, list(params.values()), hole_path)


def _path_from(root: SyntaxNode, node: SyntaxNode) -> tuple[int, ...]:
    steps = []
    while node is not root:
        steps.append(node.index)
        node = node.parent
    return tuple(reversed(steps))


def synthesize(donor: SyntaxTree, rng: random.Random) -> ParameterizedMutation:
    subtree = select_mutation_subtree(donor, rng)
    context, mutation = bisect(donor, subtree)
    return parameterize(context, mutation)


def _render_params(node: SyntaxNode, index: dict[str, int]) -> SyntaxNode:
    dup = node.copy()
    for n in dup.iter_preorder():
        if n.param is not None:
            n.text = f"⟨P{index[n.param]}⟩"
    return dup


def dump(pm: ParameterizedMutation) -> str:
    """Debug rendering with parameters shown as ⟨P0⟩, ⟨P1⟩, ..."""
    index = {p.id: i for i, p in enumerate(pm.params)}
    ctx = SyntaxTree(_render_params(pm.context.root, index))
    lines = ["// context", print_tree(ctx).rstrip("\n") if ctx.root.rule == "module-body"
             else print_node(ctx.root), "// mutation",
             print_node(_render_params(pm.mutation_root, index))]
    lines.append("// parameters")
    for i, p in enumerate(pm.params):
        lines.append(f"P{i} = {p.id} {p.kind} {p.donor_value}")
    return "\n".join(lines) + "\n"
