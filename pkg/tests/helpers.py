"""Shared fixtures: random program generator and a brute-force site oracle."""

from __future__ import annotations

import random
from pathlib import Path

from mlirgraft.syntax import QUANTIFIED, SyntaxTree, parse

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def fixture_tree(name: str) -> SyntaxTree:
    return parse(fixture_text(name))


_OPS = ["comb.add", "comb.sub", "hw.constant", "arith.addi", "sv.if", "scf.yield", "t.op"]
_TYPES = ["i1", "i2", "i4", "i32", "index", "!hw.array<2xi2>"]


def random_program(rng: random.Random, max_ops: int = 6, depth: int = 2) -> str:
    """A syntactically valid generic-form program; semantics are arbitrary."""
    counter = [0]
    lines: list[str] = []

    def emit_ops(n: int, indent: str, d: int, values: list[str]):
        for _ in range(n):
            name = rng.choice(_OPS)
            n_in = rng.randint(0, min(2, len(values))) if values else 0
            ins = [rng.choice(values) for _ in range(n_in)]
            n_out = rng.randint(0, 1)
            outs = []
            if n_out:
                outs = [f"%v{counter[0]}"]
                counter[0] += 1
            t_in = [rng.choice(_TYPES) for _ in ins]
            t_out = [rng.choice(_TYPES) for _ in outs]
            res = f"{', '.join(outs)} = " if outs else ""
            attrs = f" {{value = {rng.randint(-3, 3)} : {rng.choice(_TYPES)}}}" if rng.random() < 0.3 else ""
            ftype = f"({', '.join(t_in)}) -> " + (t_out[0] if len(t_out) == 1 else "()")
            if d > 0 and rng.random() < 0.3:
                lines.append(f'{indent}{res}"{name}"({", ".join(ins)}) ({{')
                n_blocks = rng.randint(0, 2)
                for b in range(n_blocks):
                    if b > 0 or rng.random() < 0.5:
                        args = [f"%a{counter[0] + j}" for j in range(rng.randint(0, 2))]
                        counter[0] += len(args)
                        sig = ", ".join(f"{a}: {rng.choice(_TYPES)}" for a in args)
                        lines.append(f"{indent}^bb{b}" + (f"({sig})" if args else "") + ":")
                        emit_ops(rng.randint(0, 2), indent + "  ", d - 1, values + args)
                    else:
                        emit_ops(rng.randint(1, 2), indent + "  ", d - 1, list(values))
                lines.append(f"{indent}}}){attrs} : {ftype}")
            else:
                lines.append(f'{indent}{res}"{name}"({", ".join(ins)}){attrs} : {ftype}')
            values.extend(outs)

    emit_ops(rng.randint(1, max_ops), "", depth, [])
    return "\n".join(lines) + "\n"


def random_tree(rng: random.Random, max_nodes: int = 50) -> SyntaxTree:
    while True:
        tree = parse(random_program(rng, max_ops=rng.randint(1, 4), depth=rng.randint(0, 2)))
        if len(tree) <= max_nodes:
            return tree


# Brute-force site oracle. It works only on a flat {path: (rule, n_children)}
# table, never on parent pointers or the matcher's anchor objects.


def path_table(root) -> dict[tuple[int, ...], tuple[str, int]]:
    table = {}
    stack = [((), root)]
    while stack:
        path, node = stack.pop()
        table[path] = (node.rule, len(node.children))
        for i, child in enumerate(node.children):
            stack.append((path + (i,), child))
    return table


def _rule(table, path):
    entry = table.get(path)
    return entry[0] if entry else None


def _neighbours(table, parent, idx, gap):
    """(ancestors, lefts, rights) as functions i -> rule or None."""
    virtual = parent + (idx,) if parent is not None else ()

    def anc(i):
        return _rule(table, virtual[: len(virtual) - i]) if i <= len(virtual) else None

    def left(i):
        if parent is None or idx - i < 0:
            return None
        return _rule(table, parent + (idx - i,))

    def right(i):
        if parent is None:
            return None
        j = idx + i - 1 if gap else idx + i
        return _rule(table, parent + (j,))

    return anc, left, right


def _agrees(ctx, cand, k, l, r):
    for fc, fd, m in zip(ctx, cand, (k, l, r)):
        for i in range(1, m + 1):
            a, b = fc(i), fd(i)
            if a is None and b is None:
                break
            if a != b:
                return False
    return True


def oracle_sites(context_root, hole_path, recipient_root, k, l, r) -> set:
    ctab, rtab = path_table(context_root), path_table(recipient_root)
    rule = ctab[hole_path][0]
    if hole_path:
        ctx = _neighbours(ctab, hole_path[:-1], hole_path[-1], False)
    else:
        ctx = _neighbours(ctab, None, 0, False)
    sites = set()
    for path, (prule, n) in rtab.items():
        if prule == rule:
            cand = _neighbours(rtab, path[:-1], path[-1], False) if path else _neighbours(rtab, None, 0, False)
            if _agrees(ctx, cand, k, l, r):
                sites.add(("replace", path))
        if QUANTIFIED.get(prule) == rule:
            first_labeled = n and _rule(rtab, path + (0,)) in ("block-label", "caret-id")
            for idx in range(1 if first_labeled else 0, n + 1):
                if _agrees(ctx, _neighbours(rtab, path, idx, True), k, l, r):
                    sites.add(("insert", path, idx))
    return sites
