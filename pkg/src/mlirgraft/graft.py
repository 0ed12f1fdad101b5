"""Concretizing a parameterized mutation and transplanting it into a recipient."""

from __future__ import annotations

from .match import MutationSite, ParameterBinding
from .syntax import QUANTIFIED, SyntaxNode, SyntaxTree, token_kind
from .synth import ParameterizedMutation


class IllegalGraft(ValueError):
    pass


def instantiate(pm: ParameterizedMutation, binding: ParameterBinding) -> SyntaxNode:
    """Detached copy of the mutation with every parameter substituted."""
    missing = [p.id for p in pm.params if p.id not in binding.values]
    if missing:
        raise KeyError(f"binding lacks parameters {missing}")
    out = pm.mutation_root.copy()
    for node in out.iter_preorder():
        if node.param is not None:
            text = binding.values[node.param]
            if token_kind(text).value != node.rule:
                raise ValueError(f"{text!r} is not a {node.rule} (parameter {node.param})")
            node.text = text
            node.param = None
    return out


def _check_region(region: SyntaxNode):
    # Only the entry block may be unlabeled, and it must not be empty;
    # anything else would not survive a print/parse round trip.
    for i, block in enumerate(region.children):
        labeled = bool(block.children) and block.children[0].rule == "block-label"
        if not labeled and (i > 0 or not block.children):
            raise IllegalGraft("unlabeled block must be a non-empty entry block")


def graft(recipient: SyntaxTree, site: MutationSite, concrete: SyntaxNode) -> SyntaxTree:
    """New tree with ``concrete`` substituted or inserted at ``site``.

    The recipient is left untouched.
    """
    if concrete.hole or any(n.param is not None or n.hole for n in concrete.iter_preorder()):
        raise IllegalGraft("graft content is not concrete")
    if site.kind == "replace":
        if concrete.rule != site.node.rule:
            raise IllegalGraft(f"cannot replace {site.node.rule} with {concrete.rule}")
        path = site.key[1]
        root = recipient.root.copy()
        if not path:
            return SyntaxTree(concrete.copy(), "", recipient.name)
        target = root.at(path)
        parent, i = target.parent, target.index
        new = concrete.copy()
        parent.children[i] = new
        new.parent = parent
    elif site.kind == "insert":
        _, parent_path, i = site.key
        expected = QUANTIFIED.get(site.parent.rule)
        if concrete.rule != expected:
            raise IllegalGraft(f"cannot insert {concrete.rule} into {site.parent.rule}")
        root = recipient.root.copy()
        parent = root.at(parent_path)
        new = concrete.copy()
        parent.children.insert(i, new)
        new.parent = parent
    else:
        raise ValueError(f"unknown site kind {site.kind!r}")
    if parent.rule == "region":
        _check_region(parent)
    return SyntaxTree(root, "", recipient.name)
