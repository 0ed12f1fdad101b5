"""Bundled stand-in for an ``<project>-opt`` tool.

Checks the command line against a pass table, parses the input, enforces
the generic def-use rules plus value type consistency and symbol
resolution, and finally verifies a handful of comb/hw/sv/llhd operation
signatures. Each stage stops the run on failure, like a real opt tool.

Run as ``python -m mlirgraft.opt [--pass[=opt] ...] FILE``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .constraints import (
    block_ops, children_by_rule, def_use_events, op_blocks, op_name,
)
from .passes import PassSpec, default_passes
from .syntax import MLIRSyntaxError, SyntaxNode, SyntaxTree, parse


@dataclass(frozen=True)
class ReferenceVerdict:
    exit_code: int
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def stderr(self) -> str:
        return "".join(d + "\n" for d in self.diagnostics)


def check_flags(flags, passes: list[PassSpec]) -> list[str]:
    table = {p.name: set(p.options) for p in passes}
    errors = []
    for flag in flags:
        if not flag.startswith("--"):
            errors.append(f"error: unexpected positional argument '{flag}'")
            continue
        name, _, opt = flag[2:].partition("=")
        if name not in table:
            errors.append(f"error: unknown pass '--{name}': no such option exists")
        elif opt and opt not in table[name]:
            errors.append(f"error: no such option exists: '{opt}' for pass '{name}'")
    return errors


def _types(type_list: SyntaxNode) -> list[str]:
    return ["".join(t.children[0].text.split()) for t in type_list.children]


def _result_types(op: SyntaxNode) -> list[str]:
    return _types(children_by_rule(op)["function-type"].children[1])


def _operand_types(op: SyntaxNode) -> list[str]:
    return _types(children_by_rule(op)["function-type"].children[0])


def _result_count(op: SyntaxNode) -> int:
    n = 0
    for term in children_by_rule(op)["result-list"].children:
        _, _, k = term.text.partition(":")
        n += int(k) if k else 1
    return n


def _result_offset(op: SyntaxNode, index: int) -> int:
    off = 0
    for term in children_by_rule(op)["result-list"].children[:index]:
        _, _, k = term.text.partition(":")
        off += int(k) if k else 1
    return off


def _definition_type(definition, use_lexeme: str) -> str | None:
    if definition.op is None:
        arg = definition.node.parent
        return "".join(arg.children[1].children[0].text.split())
    _, _, sub = use_lexeme.partition("#")
    i = _result_offset(definition.op, definition.result_index) + (int(sub) if sub else 0)
    types = _result_types(definition.op)
    return types[i] if i < len(types) else None


_SYMBOL_USE = re.compile(r'@([A-Za-z_$.][\w$.\-]*|"[^"]*")')


def _attr_entries(tree: SyntaxTree):
    for node in tree.root.iter_preorder():
        if node.rule == "attr-entry":
            yield node


def parser_diagnostics(tree: SyntaxTree) -> list[str]:
    """Errors a generic MLIR parser reports regardless of dialect."""
    errors = []
    for op in tree.operations():
        name = op_name(op)
        n_operands = len(children_by_rule(op)["operand-list"].children)
        n_types = len(_operand_types(op))
        if n_operands != n_types:
            errors.append(f"error: '{name}' expected {n_operands} operand types but had {n_types}")
        n_results, n_rtypes = _result_count(op), len(_result_types(op))
        if n_results and n_results != n_rtypes:
            errors.append(f"error: operation defines {n_rtypes} results but was provided "
                          f"{n_results} to bind")
    for ev in def_use_events(tree):
        if ev.kind == "redefinition":
            errors.append(f"error: redefinition of SSA value '{ev.definition.name}'")
            continue
        use = ev.use
        if use.definition is None:
            errors.append(f"error: use of undeclared SSA value name '{use.name}'")
            continue
        expected = _definition_type(use.definition, use.node.text)
        types = _operand_types(use.op)
        actual = types[use.operand_index] if use.operand_index < len(types) else None
        if expected is not None and actual is not None and expected != actual:
            errors.append(f"error: use of value '{use.node.text}' expects different type "
                          f"than prior uses: '{actual}' vs '{expected}'")
    defined = set()
    for entry in _attr_entries(tree):
        if entry.children[0].text.strip('"') == "sym_name" and len(entry.children) > 1:
            defined.add(entry.children[1].text.strip('"'))
    for entry in _attr_entries(tree):
        if entry.children[0].text.strip('"') == "sym_name" or len(entry.children) < 2:
            continue
        for m in _SYMBOL_USE.finditer(entry.children[1].text):
            sym = m.group(1).strip('"')
            if sym not in defined:
                errors.append(f"error: reference to undefined symbol '@{sym}'")
    return errors


# Verifier rules for the operations appearing in the worked examples.

_BINARY = {"comb.add", "comb.sub", "comb.mul", "comb.and", "comb.or", "comb.xor"}
_LLHD_TERMINATORS = {"llhd.wait", "llhd.halt"}


def _has_attr(op: SyntaxNode, key: str) -> bool:
    parts = children_by_rule(op)
    for rule in ("attr-dict", "properties"):
        if rule in parts and any(e.children[0].text.strip('"') == key for e in parts[rule].children):
            return True
    return False


def _n_regions(op: SyntaxNode) -> int:
    regions = children_by_rule(op).get("region-list")
    return len(regions.children) if regions is not None else 0


def _enclosing_op(op: SyntaxNode) -> SyntaxNode | None:
    node = op.parent
    while node is not None and node.rule != "operation":
        node = node.parent
    return node


def verify_op(op: SyntaxNode) -> list[str]:
    name = op_name(op)
    n_in = len(children_by_rule(op)["operand-list"].children)
    n_out = _result_count(op)
    ins, outs = _operand_types(op), _result_types(op)
    err = []

    def fail(msg):
        err.append(f"error: '{name}' op {msg}")

    if name in _BINARY:
        if n_in != 2:
            fail(f"requires exactly 2 operands, but found {n_in}")
        if n_out != 1:
            fail(f"requires exactly 1 result, but found {n_out}")
        if len(set(ins + outs)) > 1:
            fail("result #0 must be the same integer type as all operands")
    elif name == "comb.icmp":
        if n_in != 2:
            fail(f"requires exactly 2 operands, but found {n_in}")
        if outs != ["i1"]:
            fail("result #0 must be 1-bit signless integer")
        if len(set(ins)) > 1:
            fail("operands must have the same type")
        if not _has_attr(op, "predicate"):
            fail("requires attribute 'predicate'")
    elif name in ("hw.constant", "sv.constantX"):
        if n_in != 0:
            fail(f"requires zero operands, but found {n_in}")
        if n_out != 1:
            fail(f"requires exactly 1 result, but found {n_out}")
        if name == "hw.constant" and not _has_attr(op, "value"):
            fail("requires attribute 'value'")
    elif name == "hw.bitcast":
        if n_in != 1 or n_out != 1:
            fail("requires exactly 1 operand and 1 result")
    elif name == "hw.output":
        if n_out:
            fail(f"requires zero results, but found {n_out}")
        parent = _enclosing_op(op)
        if parent is None or op_name(parent) != "hw.module":
            fail("must be nested in 'hw.module'")
        elif op.parent.children[-1] is not op:
            fail("must be the last operation in its block")
    elif name == "hw.module":
        if _n_regions(op) != 1:
            fail("requires exactly one region")
        else:
            for _, block in op_blocks(op):
                ops = block_ops(block)
                if not ops or op_name(ops[-1]) != "hw.output":
                    fail("body must terminate with 'hw.output'")
    elif name == "sv.if":
        if ins != ["i1"]:
            fail("condition must be a 1-bit signless integer")
        if n_out:
            fail(f"requires zero results, but found {n_out}")
        if _n_regions(op) not in (1, 2):
            fail("requires one or two regions")
    elif name == "llhd.proc":
        blocks = [b for _, b in op_blocks(op)]
        if not blocks:
            fail("region must end with a terminator ('llhd.wait' or 'llhd.halt')")
        for block in blocks:
            ops = block_ops(block)
            if not ops or op_name(ops[-1]) not in _LLHD_TERMINATORS:
                fail("block must end with a terminator ('llhd.wait' or 'llhd.halt')")
                break
    return err


def reference_validate(text: str | bytes, flags=(), passes: list[PassSpec] | None = None,
                       dialect_checks: bool = True) -> ReferenceVerdict:
    errors = check_flags(list(flags), passes if passes is not None else default_passes())
    if errors:
        return ReferenceVerdict(1, tuple(errors))
    try:
        tree = parse(text)
    except MLIRSyntaxError as exc:
        return ReferenceVerdict(1, (f"error: syntax error: {exc}",))
    errors = parser_diagnostics(tree)
    if errors:
        return ReferenceVerdict(1, tuple(errors))
    if dialect_checks:
        errors = [e for op in tree.operations() for e in verify_op(op)]
        if errors:
            return ReferenceVerdict(1, tuple(errors))
    return ReferenceVerdict(0, ())
