"""Parse tree, parser and printer for generic-form MLIR.

Only the generic operation form is accepted: quoted operation names,
explicit operand lists and an explicit function type on every operation.
Types and attribute values are scanned as opaque balanced tokens, which is
all the mutation machinery needs.

Punctuation is not stored in the tree; the printer regenerates it from the
rule structure.
"""

from __future__ import annotations

import re
from collections import deque
from enum import Enum
from typing import Iterator


class TokenKind(str, Enum):
    VALUE_ID = "value-id"
    CARET_ID = "caret-id"
    SYMBOL_REF = "symbol-ref"
    STRING_LIT = "string-lit"
    INT_LIT = "int-lit"
    FLOAT_LIT = "float-lit"
    TYPE_TOKEN = "type-token"
    ATTR_TOKEN = "attr-token"
    KEYWORD = "keyword"


TERMINAL_KINDS = frozenset(k.value for k in TokenKind)

# Rule nodes that hold a quantified (insertion-eligible) child list, mapped
# to the rule name of the repeated term.
QUANTIFIED = {
    "module-body": "operation",
    "block": "operation",
    "region": "block",
    "region-list": "region",
    "operand-list": "value-use",
    "block-label": "block-arg",
}

_INT_RE = re.compile(r"[-+]?(?:0x[0-9a-fA-F]+|\d+)\Z")
_FLOAT_RE = re.compile(r"[-+]?\d+\.\d*(?:[eE][-+]?\d+)?\Z|[-+]?\d+[eE][-+]?\d+\Z")
_BUILTIN_TYPE_RE = re.compile(
    r"(?:[su]?i\d+|f\d+|bf16|tf32|f8\w*|index|none)\Z"
)
_TYPE_PREFIXES = (
    "tensor<", "memref<", "vector<", "complex<", "tuple<", "!", "(",
)
_ATTR_PREFIXES = (
    "#", "[", "{", "dense<", "dense_resource<", "sparse<", "array<",
    "affine_map<", "affine_set<", "opaque<", "strided<", "distinct[",
)
_KEYWORDS = frozenset({"true", "false", "unit"})


def token_kind(lexeme: str) -> TokenKind:
    """Classify a lexeme. Depends on the lexeme alone."""
    head = lexeme[:1]
    if head == "%":
        return TokenKind.VALUE_ID
    if head == "^":
        return TokenKind.CARET_ID
    if head == "@":
        return TokenKind.SYMBOL_REF
    if head == '"':
        return TokenKind.STRING_LIT
    if _INT_RE.match(lexeme):
        return TokenKind.INT_LIT
    if _FLOAT_RE.match(lexeme):
        return TokenKind.FLOAT_LIT
    if lexeme in _KEYWORDS:
        return TokenKind.KEYWORD
    if lexeme.startswith(_ATTR_PREFIXES):
        return TokenKind.ATTR_TOKEN
    if _BUILTIN_TYPE_RE.match(lexeme) or lexeme.startswith(_TYPE_PREFIXES):
        return TokenKind.TYPE_TOKEN
    return TokenKind.KEYWORD


class SyntaxNode:
    """A rule node (``text == ""``) or a terminal (``text != ""``).

    ``param`` and ``hole`` are only set on the copies produced by mutation
    synthesis; parsed trees never carry them.
    """

    __slots__ = ("rule", "text", "children", "span", "parent", "param", "hole")

    def __init__(self, rule, text="", children=None, span=None):
        self.rule: str = rule
        self.text: str = text
        self.children: list[SyntaxNode] = list(children or ())
        self.span: tuple[int, int] | None = span
        self.parent: SyntaxNode | None = None
        self.param: str | None = None
        self.hole: bool = False
        for child in self.children:
            child.parent = self

    @classmethod
    def terminal(cls, text: str, span=None) -> SyntaxNode:
        return cls(token_kind(text).value, text, (), span)

    @property
    def is_terminal(self) -> bool:
        return self.rule in TERMINAL_KINDS

    @property
    def index(self) -> int | None:
        if self.parent is None:
            return None
        for i, child in enumerate(self.parent.children):
            if child is self:
                return i
        raise ValueError("node is not among its parent's children")

    def shape(self):
        """Structural identity key: rule, text and child shapes (no spans)."""
        return (self.rule, self.text, tuple(c.shape() for c in self.children))

    def copy(self) -> SyntaxNode:
        """Detached deep copy (parent is None)."""
        dup = SyntaxNode(self.rule, self.text, [c.copy() for c in self.children], self.span)
        dup.param = self.param
        dup.hole = self.hole
        return dup

    def path(self) -> tuple[int, ...]:
        steps = []
        node = self
        while node.parent is not None:
            steps.append(node.index)
            node = node.parent
        return tuple(reversed(steps))

    def at(self, path) -> SyntaxNode:
        node = self
        for i in path:
            node = node.children[i]
        return node

    def iter_preorder(self) -> Iterator[SyntaxNode]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def terminals(self) -> list[SyntaxNode]:
        return [n for n in self.iter_preorder() if n.is_terminal]

    def __repr__(self):
        if self.is_terminal:
            return f"<{self.rule} {self.text!r}>"
        tag = " hole" if self.hole else ""
        return f"<{self.rule}{tag} ({len(self.children)})>"


class SyntaxTree:
    def __init__(self, root: SyntaxNode, source: str = "", name: str = ""):
        if root.parent is not None:
            raise ValueError("tree root must be detached")
        self.root = root
        self.source = source
        self.name = name

    def walk(self) -> list[SyntaxNode]:
        return walk(self.root)

    def shape(self):
        return self.root.shape()

    def copy(self) -> SyntaxTree:
        return SyntaxTree(self.root.copy(), self.source, self.name)

    def operations(self) -> list[SyntaxNode]:
        return [n for n in self.root.iter_preorder() if n.rule == "operation"]

    def __len__(self):
        return sum(1 for _ in self.root.iter_preorder())

    def __str__(self):
        return print_tree(self)


def iter_bfs(root: SyntaxNode) -> Iterator[SyntaxNode]:
    queue = deque([root])
    while queue:
        node = queue.popleft()
        yield node
        queue.extend(node.children)


def walk(root: SyntaxNode) -> list[SyntaxNode]:
    """Breadth-first order, root first."""
    return list(iter_bfs(root))


def get_parent(node: SyntaxNode) -> SyntaxNode | None:
    return node.parent


def get_left_sibling(node: SyntaxNode) -> SyntaxNode | None:
    i = node.index
    if i is None or i == 0:
        return None
    return node.parent.children[i - 1]


def get_right_sibling(node: SyntaxNode) -> SyntaxNode | None:
    i = node.index
    if i is None or i + 1 >= len(node.parent.children):
        return None
    return node.parent.children[i + 1]


# ---------------------------------------------------------------------------
# Parsing


class MLIRSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


_ID_CHARS = re.compile(r"[A-Za-z0-9_$.\-]+")
_BARE_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_$.\-]*")
_WS_COMMENT = re.compile(r"(?:\s+|//[^\n]*)*")
_OPEN = {"(": ")", "[": "]", "{": "}", "<": ">"}
_CLOSE = frozenset(")]}>")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.n = len(text)

    # -- low level -------------------------------------------------------

    def error(self, message, expected=()):
        raise MLIRSyntaxError(message, self.pos, expected)

    def skip(self):
        self.pos = _WS_COMMENT.match(self.text, self.pos).end()

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < self.n else ""

    def at(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.at(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.error(f"unexpected {self._found()}", {repr(s)})

    def _found(self) -> str:
        if self.pos >= self.n:
            return "end of input"
        return repr(self.text[self.pos])

    def term(self, start: int, end: int) -> SyntaxNode:
        return SyntaxNode.terminal(self.text[start:end], (start, end))

    def sigil_id(self, sigil: str) -> SyntaxNode:
        self.skip()
        start = self.pos
        if not self.text.startswith(sigil, start):
            self.error(f"unexpected {self._found()}", {sigil + "identifier"})
        m = _ID_CHARS.match(self.text, start + 1)
        if not m:
            self.pos = start + 1
            self.error("malformed identifier", {"identifier"})
        end = m.end()
        if sigil == "%":
            hashed = re.compile(r"#\d+").match(self.text, end)
            if hashed:
                end = hashed.end()
        self.pos = end
        return self.term(start, end)

    def string_end(self, start: int) -> int:
        i = start + 1
        while i < self.n:
            c = self.text[i]
            if c == "\\":
                i += 2
                continue
            if c == '"':
                return i + 1
            if c == "\n":
                break
            i += 1
        self.pos = start
        self.error("unterminated string literal", {'"'})

    def balanced_end(self, start: int, stop=frozenset()) -> int:
        """Scan from start until a depth-0 character in ``stop``.

        Brackets must balance; strings and ``->`` are skipped as units.
        """
        stack = []
        i = start
        while i < self.n:
            c = self.text[i]
            if c == '"':
                i = self.string_end(i)
                continue
            if c == "-" and self.text.startswith("->", i):
                i += 2
                continue
            if not stack and c in stop:
                if c == ":" and self.text.startswith("::", i):
                    i += 2
                    continue
                return i
            if c in _OPEN:
                stack.append(_OPEN[c])
            elif c in _CLOSE:
                if not stack:
                    return i
                if c != stack[-1]:
                    self.pos = i
                    self.error("unbalanced bracket", {repr(stack[-1])})
                stack.pop()
            i += 1
        if stack:
            self.pos = i
            self.error("unbalanced bracket", {repr(stack[-1])})
        return i

    # -- types -------------------------------------------------------------

    def type_end(self, start: int) -> int:
        text = self.text
        if start >= self.n:
            self.pos = start
            self.error("unexpected end of input", {"type"})
        c = text[start]
        if c == "(":
            i = self.balanced_end(start + 1, frozenset(")"))
            if i >= self.n:
                self.pos = i
                self.error("unterminated function type", {"')'"})
            self.pos = i + 1
            self.expect("->")
            self.skip()
            return self.type_end(self.pos)
        if c == "!":
            m = _ID_CHARS.match(text, start + 1)
            if not m:
                self.pos = start
                self.error("malformed dialect type", {"type"})
            i = m.end()
        else:
            m = _BARE_ID.match(text, start)
            if not m:
                self.pos = start
                self.error(f"unexpected {self._found_at(start)}", {"type"})
            i = m.end()
        if i < self.n and text[i] == "<":
            i = self.balanced_end(i + 1, frozenset(">"))
            if i >= self.n:
                self.pos = i
                self.error("unterminated type parameters", {"'>'"})
            i += 1
        return i

    def _found_at(self, i):
        return "end of input" if i >= self.n else repr(self.text[i])

    def type_node(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        end = self.type_end(start)
        self.pos = end
        tok = self.term(start, end)
        return SyntaxNode("type", "", [tok], (start, end))

    def type_list(self, closer: str) -> SyntaxNode:
        start = self.pos
        types = []
        if not self.at(closer):
            types.append(self.type_node())
            while self.accept(","):
                types.append(self.type_node())
        return SyntaxNode("type-list", "", types, (start, self.pos))

    def function_type(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        self.expect("(")
        inputs = self.type_list(")")
        self.expect(")")
        self.expect("->")
        self.skip()
        rstart = self.pos
        # "(" may open a result list or a function-typed single result.
        if self.at("("):
            save = self.pos
            self.pos += 1
            results = self.type_list(")")
            self.expect(")")
            if self.at("->"):
                self.pos = save
                t = self.type_node()
                results = SyntaxNode("type-list", "", [t], t.span)
        else:
            t = self.type_node()
            results = SyntaxNode("type-list", "", [t], (rstart, self.pos))
        return SyntaxNode("function-type", "", [inputs, results], (start, self.pos))

    # -- attributes ----------------------------------------------------------

    def attr_entry(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        if self.peek() == '"':
            end = self.string_end(self.pos)
        else:
            m = _BARE_ID.match(self.text, self.pos)
            if not m:
                self.error(f"unexpected {self._found()}", {"attribute name"})
            end = m.end()
        children = [self.term(start, end)]
        self.pos = end
        if self.accept("="):
            self.skip()
            vstart = self.pos
            vend = self.balanced_end(vstart, frozenset(",}:"))
            while vend > vstart and self.text[vend - 1].isspace():
                vend -= 1
            if vend == vstart:
                self.error("missing attribute value", {"attribute value"})
            self.pos = vend
            children.append(self.term(vstart, vend))
            if self.accept(":"):
                children.append(self.type_node())
        return SyntaxNode("attr-entry", "", children, (start, self.pos))

    def attr_entries(self, rule: str, close: str) -> SyntaxNode:
        start = self.pos
        self.expect("{")
        entries = []
        if not self.at("}"):
            entries.append(self.attr_entry())
            while self.accept(","):
                entries.append(self.attr_entry())
        self.expect("}")
        if close:
            self.expect(close)
        return SyntaxNode(rule, "", entries, (start, self.pos))

    # -- structure -----------------------------------------------------------

    def module_body(self) -> SyntaxNode:
        ops = []
        while self.peek():
            if self.peek() not in ("%", '"'):
                self.error(f"unexpected {self._found()}", {"operation"})
            ops.append(self.operation())
        return SyntaxNode("module-body", "", ops, (0, self.n))

    def operation(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        results = []
        if self.peek() == "%":
            results.append(self.result_id())
            while self.accept(","):
                results.append(self.result_id())
            self.expect("=")
        result_list = SyntaxNode(
            "result-list", "", results,
            (results[0].span[0], results[-1].span[1]) if results else (start, start),
        )
        self.skip()
        if self.peek() != '"':
            self.error(f"unexpected {self._found()}", {"quoted operation name"})
        nstart = self.pos
        nend = self.string_end(nstart)
        self.pos = nend
        op_name = SyntaxNode("op-name", "", [self.term(nstart, nend)], (nstart, nend))

        self.skip()
        ostart = self.pos
        self.expect("(")
        uses = []
        if not self.at(")"):
            uses.append(self.value_use())
            while self.accept(","):
                uses.append(self.value_use())
        self.expect(")")
        children = [result_list, op_name, SyntaxNode("operand-list", "", uses, (ostart, self.pos))]

        if self.at("["):
            sstart = self.pos
            self.expect("[")
            succ = [self.sigil_id("^")]
            while self.accept(","):
                succ.append(self.sigil_id("^"))
            self.expect("]")
            children.append(SyntaxNode("successor-list", "", succ, (sstart, self.pos)))
        if self.at("<{"):
            self.expect("<")
            children.append(self.attr_entries("properties", ">"))
        if self.at("("):
            rstart = self.pos
            self.expect("(")
            regions = [self.region()]
            while self.accept(","):
                regions.append(self.region())
            self.expect(")")
            children.append(SyntaxNode("region-list", "", regions, (rstart, self.pos)))
        if self.at("{"):
            children.append(self.attr_entries("attr-dict", ""))
        self.expect(":")
        children.append(self.function_type())
        return SyntaxNode("operation", "", children, (start, self.pos))

    def result_id(self) -> SyntaxNode:
        node = self.sigil_id("%")
        m = re.compile(r":\d+").match(self.text, self.pos)
        if m:
            start = node.span[0]
            self.pos = m.end()
            node = self.term(start, self.pos)
        return node

    def value_use(self) -> SyntaxNode:
        tok = self.sigil_id("%")
        return SyntaxNode("value-use", "", [tok], tok.span)

    def region(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        self.expect("{")
        blocks = []
        if self.peek() in ("%", '"'):
            blocks.append(self.block(None))
        while self.peek() == "^":
            blocks.append(self.block(self.block_label()))
        self.expect("}")
        return SyntaxNode("region", "", blocks, (start, self.pos))

    def block_label(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        children = [self.sigil_id("^")]
        if self.accept("("):
            if not self.at(")"):
                children.append(self.block_arg())
                while self.accept(","):
                    children.append(self.block_arg())
            self.expect(")")
        self.expect(":")
        return SyntaxNode("block-label", "", children, (start, self.pos))

    def block_arg(self) -> SyntaxNode:
        self.skip()
        start = self.pos
        vid = self.sigil_id("%")
        self.expect(":")
        t = self.type_node()
        return SyntaxNode("block-arg", "", [vid, t], (start, self.pos))

    def block(self, label) -> SyntaxNode:
        self.skip()
        start = label.span[0] if label is not None else self.pos
        children = [label] if label is not None else []
        while self.peek() in ("%", '"'):
            children.append(self.operation())
        end = children[-1].span[1] if children else start
        return SyntaxNode("block", "", children, (start, end))


def parse(text: str | bytes) -> SyntaxTree:
    """Parse generic MLIR into a tree rooted at ``module-body``.

    Raises MLIRSyntaxError on malformed input, including undecodable bytes
    and pathological nesting depth.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MLIRSyntaxError("invalid UTF-8", exc.start) from None
    parser = _Parser(text)
    try:
        root = parser.module_body()
    except RecursionError:
        raise MLIRSyntaxError("nesting too deep", parser.pos) from None
    return SyntaxTree(root, text)


# ---------------------------------------------------------------------------
# Printing

INDENT = "  "
HOLE_TEXT = "\u27e8HOLE\u27e9"


def _type_list(node: SyntaxNode) -> str:
    return ", ".join(_text(t) for t in node.children)


def _text(node: SyntaxNode) -> str:
    """Inline rendering of a node that fits on one line."""
    rule = node.rule
    if node.hole:
        return HOLE_TEXT
    if node.is_terminal:
        return node.text
    if rule in ("type", "value-use", "op-name"):
        return node.children[0].text if node.children else ""
    if rule == "function-type":
        inputs, results = node.children
        res = results.children
        if len(res) == 1 and not _text(res[0]).startswith("("):
            out = _text(res[0])
        else:
            out = f"({_type_list(results)})"
        return f"({_type_list(inputs)}) -> {out}"
    if rule == "attr-entry":
        parts = node.children
        s = parts[0].text
        if len(parts) > 1:
            s += f" = {parts[1].text}"
        if len(parts) > 2:
            s += f" : {_text(parts[2])}"
        return s
    if rule == "block-arg":
        return f"{node.children[0].text}: {_text(node.children[1])}"
    if rule == "block-label":
        label = node.children[0].text
        args = node.children[1:]
        if args:
            label += "(" + ", ".join(_text(a) for a in args) + ")"
        return label + ":"
    if rule in ("result-list", "operand-list", "successor-list", "type-list"):
        return ", ".join(_text(c) for c in node.children)
    if rule == "attr-dict":
        return "{" + ", ".join(_text(c) for c in node.children) + "}"
    if rule == "properties":
        return "<{" + ", ".join(_text(c) for c in node.children) + "}>"
    raise ValueError(f"cannot render {rule!r} inline")


def _print_op(node: SyntaxNode, depth: int, out: list[str]):
    pad = INDENT * depth
    if node.hole:
        out.append(pad + HOLE_TEXT)
        return
    head = pad
    parts = {c.rule: c for c in node.children}
    results = parts.get("result-list")
    if results is not None and results.children:
        head += _text(results) + " = "
    head += _text(parts["op-name"]) + "(" + _text(parts["operand-list"]) + ")"
    if "successor-list" in parts:
        head += " [" + _text(parts["successor-list"]) + "]"
    if "properties" in parts:
        head += " " + _text(parts["properties"])
    tail = ""
    if "attr-dict" in parts:
        tail += " " + _text(parts["attr-dict"])
    tail += " : " + _text(parts["function-type"])
    if "region-list" not in parts:
        out.append(head + tail)
        return
    regions = parts["region-list"].children
    line = head + " ("
    for i, region in enumerate(regions):
        if region.hole:
            line += HOLE_TEXT
            line += ", " if i + 1 < len(regions) else ""
            continue
        line += "{"
        out.append(line)
        for block in region.children:
            if block.hole:
                out.append(pad + INDENT + HOLE_TEXT)
                continue
            ops = block.children
            if ops and ops[0].rule == "block-label":
                out.append(pad + _text(ops[0]))
                ops = ops[1:]
            for op in ops:
                _print_op(op, depth + 1, out)
        line = pad + "}" + (", " if i + 1 < len(regions) else "")
    out.append(line + ")" + tail)


def print_node(node: SyntaxNode, depth: int = 0) -> str:
    """Print an operation or module-body node; other nodes print inline."""
    if node.hole:
        return HOLE_TEXT
    if node.rule == "module-body":
        out: list[str] = []
        for op in node.children:
            _print_op(op, depth, out)
        return "".join(line + "\n" for line in out)
    if node.rule == "operation":
        out = []
        _print_op(node, depth, out)
        return "\n".join(out)
    if node.rule in ("region", "block"):
        wrapper = SyntaxNode("region", "", [node.copy()]) if node.rule == "block" else node.copy()
        op = SyntaxNode("operation", "", [
            SyntaxNode("result-list"),
            SyntaxNode("op-name", "", [SyntaxNode.terminal('"_"')]),
            SyntaxNode("operand-list"),
            SyntaxNode("region-list", "", [wrapper]),
            SyntaxNode("function-type", "", [SyntaxNode("type-list"), SyntaxNode("type-list")]),
        ])
        text = print_node(op, depth)
        return text[text.index("({") + 1: text.rindex("})") + 1]
    return _text(node)


def print_tree(tree: SyntaxTree) -> str:
    """Canonical text: one operation per line, two spaces per region level."""
    return print_node(tree.root)
