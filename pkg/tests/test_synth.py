from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from mlirgraft.constraints import op_name
from mlirgraft.syntax import SyntaxNode, SyntaxTree, parse, print_node, print_tree, walk
from mlirgraft.synth import (
    ELIGIBLE_RULES, NoEligibleNode, bisect, dump, eligible_nodes, parameterize,
    select_mutation_subtree, synthesize,
)

from helpers import fixture_tree, random_program


def _op(tree, name):
    return next(o for o in tree.operations() if op_name(o) == name)


def _worked_example():
    donor = fixture_tree("donor.mlir")
    return donor, parameterize(*bisect(donor, _op(donor, "comb.add")))


def test_worked_example_parameters():
    _, pm = _worked_example()
    got = {p.id: (p.kind, p.donor_value) for p in pm.params}
    assert got == {"A": ("value-id", "%arg0"), "B": ("value-id", "%c1"),
                   "C": ("type-token", "i2"), "D": ("value-id", "%o1")}


def test_worked_example_covers_all_occurrences():
    donor, pm = _worked_example()
    for p in pm.params:
        expected = sum(1 for n in donor.root.iter_preorder() if n.is_terminal and n.text == p.donor_value)
        assert len(p.occurrences) == expected
        sides = {side for side, _ in p.occurrences}
        assert sides == {"mutation", "context"}
    # i2 occurs three times in the mutation and four times around it
    assert len(pm.param("C").occurrences) == 7


def test_mutation_text():
    _, pm = _worked_example()
    assert print_node(pm.mutation_root) == '%o1 = "comb.add"(%arg0, %c1) : (i2, i2) -> i2'
    text = dump(pm)
    assert '⟨P3⟩ = "comb.add"(⟨P0⟩, ⟨P1⟩) : (⟨P2⟩, ⟨P2⟩) -> ⟨P2⟩' in text
    assert "P2 = C type-token i2" in text


def test_regraft_reproduces_donor():
    donor, pm = _worked_example()
    assert pm.regraft().shape() == donor.shape()


def test_bisect_leaves_donor_intact():
    donor = fixture_tree("donor.mlir")
    before = print_tree(donor)
    context, mutation = bisect(donor, _op(donor, "comb.add"))
    assert print_tree(donor) == before
    assert mutation.parent is None
    hole = context.root.at(_op(donor, "comb.add").path())
    assert hole.hole and hole.rule == "operation"


def test_shared_name_across_three_occurrences():
    text = ('%x = "t.c"() : () -> i8\n'
            '%y = "t.f"(%x) : (i8) -> i8\n'
            '"t.g"(%x, %y) : (i8, i8) -> ()\n')
    donor = parse(text)
    pm = parameterize(*bisect(donor, _op(donor, "t.f")))
    x = next(p for p in pm.params if p.donor_value == "%x")
    assert len(x.occurrences) == 3


def test_single_operation_selected_when_only_candidate():
    donor = parse('"t.c"() : () -> ()')
    rng = random.Random(0)
    picks = {select_mutation_subtree(donor, rng).rule for _ in range(50)}
    assert picks == {"operation"}


def test_no_eligible_node():
    with pytest.raises(NoEligibleNode):
        select_mutation_subtree(parse(""), random.Random(0))


def test_uniform_over_operations():
    donor = parse('"t.a"() : () -> ()\n"t.b"() : () -> ()\n"t.c"() : () -> ()\n')
    rng = random.Random(12345)
    counts = Counter()
    for _ in range(100_000):
        node = select_mutation_subtree(donor, rng)
        if node.rule == "operation":
            counts[op_name(node)] += 1
    total = sum(counts.values())
    assert total == 100_000  # operations are the only eligible nodes here
    for name in ("t.a", "t.b", "t.c"):
        assert abs(counts[name] / total - 1 / 3) < 0.01
    chi2 = sum((c - total / 3) ** 2 / (total / 3) for c in counts.values())
    assert chi2 < 13.82  # df = 2, alpha = 0.001


def test_uniform_over_all_eligible_nodes():
    donor = fixture_tree("donor.mlir")
    nodes = eligible_nodes(donor)
    rng = random.Random(7)
    counts = Counter(id(select_mutation_subtree(donor, rng)) for _ in range(40_000))
    expected = 40_000 / len(nodes)
    chi2 = sum((counts[id(n)] - expected) ** 2 / expected for n in nodes)
    # 4 operations, region, block, 3 operand uses, 1 attribute entry, 7 types
    assert len(nodes) == 17
    assert chi2 < 39.25  # df = 16, alpha = 0.001


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 10_000))
def test_synthesis_invariants(rng, seed):
    donor = parse(random_program(rng))
    try:
        pm = synthesize(donor, random.Random(seed))
    except NoEligibleNode:
        return
    assert pm.mutation_root.rule in ELIGIBLE_RULES
    assert pm.regraft().shape() == donor.shape()
    assert pm.hole.rule == pm.mutation_root.rule
    for p in pm.params:
        sides = {side for side, _ in p.occurrences}
        assert sides == {"mutation", "context"}
        for side, path in p.occurrences:
            root = pm.mutation_root if side == "mutation" else pm.context.root
            node = root.at(path)
            assert node.text == p.donor_value and node.rule == p.kind and node.param == p.id


def test_select_is_deterministic():
    donor = fixture_tree("recipient.mlir")
    a = [select_mutation_subtree(donor, random.Random(s)).path() for s in range(20)]
    b = [select_mutation_subtree(donor, random.Random(s)).path() for s in range(20)]
    assert a == b


def test_bisect_at_root():
    donor = fixture_tree("donor.mlir")
    context, mutation = bisect(donor, donor.root)
    assert context.root.hole and context.root.children == []
    assert mutation.shape() == donor.shape()
    pm = parameterize(context, mutation)
    assert pm.params == [] and pm.regraft().shape() == donor.shape()


def test_no_shared_tokens_means_no_parameters():
    donor = parse('%a = "t.c"() : () -> i1\n"t.d"() : () -> ()\n')
    pm = parameterize(*bisect(donor, _op(donor, "t.d")))
    assert pm.params == []


def test_parameterize_is_deterministic():
    donor = fixture_tree("recipient.mlir")
    a = [dump(synthesize(donor, random.Random(s))) for s in range(10)]
    b = [dump(synthesize(donor, random.Random(s))) for s in range(10)]
    assert a == b
