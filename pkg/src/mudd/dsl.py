"""Textual description language for diagrams.

Statements:

    action <name>;
    counter <name>;
    done;
    switch (<property>) { case <value>: <statements> ... }
    order <labelA> -> <labelB>;
    <label>: <statement>

Blocks run in sequence; switch branches rejoin at the statement after the
switch; the end of the top-level block is an implicit `done`. `order`
declares a happens-before edge between two labeled statements. `#` starts a
comment. There are no functions, loops, or variables beyond decision
properties; anything else is a syntax error.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import MuddError
from .model import CausalityEdge, CounterNamespace, MuDD, Node

_WORD_RE = re.compile(r"[A-Za-z0-9_$.]+")
_KEYWORDS = frozenset({"action", "counter", "done", "switch", "case", "order"})


@dataclass(frozen=True)
class DslSource:
    """Raw text plus an origin tag used in diagnostics."""

    text: str
    origin: str = "<inline>"


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # syntax-error | unknown-counter | duplicate-label | empty-switch |
    #            unreachable-statement | duplicate-case | unknown-label
    line: int
    col: int
    message: str


class DslParseError(MuddError):
    """Parse failed; carries every diagnostic, in source order."""

    def __init__(self, diagnostics: Sequence[Diagnostic], origin: str = "<inline>"):
        self.diagnostics = tuple(sorted(diagnostics, key=lambda d: (d.line, d.col)))
        self.origin = origin
        super().__init__(format_diagnostics(self.diagnostics, origin))


def format_diagnostics(diagnostics: Sequence[Diagnostic], origin: str = "<inline>") -> str:
    """Stable, position-annotated report; one line per diagnostic, source order."""
    ordered = sorted(diagnostics, key=lambda d: (d.line, d.col))
    return "\n".join(f"{origin}:{d.line}:{d.col}: {d.kind}: {d.message}" for d in ordered)


# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class _Token:
    kind: str  # word | punct | eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diags: list[Diagnostic] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token("punct", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in ";:{}()":
            tokens.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        m = _WORD_RE.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(_Token("word", word, line, col))
            i = m.end()
            col += len(word)
            continue
        diags.append(Diagnostic("syntax-error", line, col, f"unexpected character {ch!r}"))
        i += 1
        col += 1
    tokens.append(_Token("eof", "", line, col))
    return tokens, diags


# ---------------------------------------------------------------------------
# AST


@dataclass
class _Stmt:
    line: int
    col: int
    label: Optional[str] = field(default=None, kw_only=True)
    label_line: int = field(default=0, kw_only=True)
    label_col: int = field(default=0, kw_only=True)


@dataclass
class _Action(_Stmt):
    name: str = ""


@dataclass
class _Counter(_Stmt):
    name: str = ""


@dataclass
class _Done(_Stmt):
    pass


@dataclass
class _Case:
    value: str
    body: list[_Stmt]
    line: int
    col: int


@dataclass
class _Switch(_Stmt):
    prop: str = ""
    cases: list[_Case] = field(default_factory=list)


@dataclass
class _Order(_Stmt):
    first: str = ""
    second: str = ""


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, tok: _Token, message: str) -> None:
        self.diags.append(Diagnostic("syntax-error", tok.line, tok.col, message))

    def expect_punct(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == text:
            self.advance()
            return True
        self.error(tok, f"expected {text!r}, found {tok.text!r}" if tok.text else f"expected {text!r}")
        return False

    def expect_word(self, what: str) -> Optional[_Token]:
        tok = self.peek()
        if tok.kind == "word":
            return self.advance()
        self.error(tok, f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}")
        return None

    def sync(self) -> None:
        # panic-mode recovery: skip to the next statement boundary
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind == "punct" and tok.text in (";", "}"):
                self.advance()
                return
            if tok.kind == "word" and tok.text == "case":
                return
            self.advance()

    def parse_block(self, stop: frozenset[str]) -> list[_Stmt]:
        stmts: list[_Stmt] = []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return stmts
            if tok.kind == "punct" and tok.text in stop:
                return stmts
            if tok.kind == "word" and tok.text in stop:
                return stmts
            stmt = self.parse_stmt()
            if stmt is not None:
                stmts.append(stmt)

    def parse_stmt(self) -> Optional[_Stmt]:
        label = None
        label_tok = None
        tok = self.peek()
        nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
        if (
            tok.kind == "word"
            and tok.text not in _KEYWORDS
            and nxt is not None
            and nxt.kind == "punct"
            and nxt.text == ":"
        ):
            label_tok = self.advance()
            label = label_tok.text
            self.advance()  # ':'
            tok = self.peek()

        def attach(stmt: _Stmt) -> _Stmt:
            if label is not None:
                stmt.label = label
                stmt.label_line = label_tok.line
                stmt.label_col = label_tok.col
            return stmt

        if tok.kind != "word":
            self.error(tok, f"expected a statement, found {tok.text!r}" if tok.text else "expected a statement")
            self.advance()
            return None

        if tok.text == "action":
            self.advance()
            name = self.expect_word("an event name")
            if name is None:
                self.sync()
                return None
            self.expect_punct(";")
            return attach(_Action(tok.line, tok.col, name=name.text))

        if tok.text == "counter":
            self.advance()
            name = self.expect_word("a counter name")
            if name is None:
                self.sync()
                return None
            self.expect_punct(";")
            return attach(_Counter(tok.line, tok.col, name=name.text))

        if tok.text == "done":
            self.advance()
            self.expect_punct(";")
            return attach(_Done(tok.line, tok.col))

        if tok.text == "order":
            self.advance()
            first = self.expect_word("a statement label")
            if first is None:
                self.sync()
                return None
            self.expect_punct("->")
            second = self.expect_word("a statement label")
            if second is None:
                self.sync()
                return None
            self.expect_punct(";")
            return attach(_Order(tok.line, tok.col, first=first.text, second=second.text))

        if tok.text == "switch":
            self.advance()
            self.expect_punct("(")
            prop = self.expect_word("a property name")
            self.expect_punct(")")
            self.expect_punct("{")
            cases: list[_Case] = []
            while True:
                t = self.peek()
                if t.kind == "eof":
                    self.error(t, "unterminated switch; expected '}'")
                    break
                if t.kind == "punct" and t.text == "}":
                    self.advance()
                    break
                if t.kind == "word" and t.text == "case":
                    self.advance()
                    value = self.expect_word("a case value")
                    self.expect_punct(":")
                    body = self.parse_block(frozenset({"case", "}"}))
                    if value is not None:
                        cases.append(_Case(value.text, body, t.line, t.col))
                    continue
                self.error(t, f"expected 'case' or '}}', found {t.text!r}")
                self.sync()
            if not cases:
                self.diags.append(
                    Diagnostic("empty-switch", tok.line, tok.col, "switch has no cases")
                )
            stmt = _Switch(tok.line, tok.col, prop=prop.text if prop else "?", cases=cases)
            return attach(stmt)

        self.error(tok, f"unknown statement {tok.text!r}")
        self.advance()
        self.sync()
        return None


# ---------------------------------------------------------------------------
# graph construction


class _Builder:
    def __init__(self, ns: Optional[CounterNamespace]):
        self.ns = ns
        self.nodes: list[Node] = []
        self.edges: list[CausalityEdge] = []
        self.labels: dict[str, int] = {}
        self.orders: list[_Order] = []
        self.diags: list[Diagnostic] = []
        self.seen_counters: list[str] = []
        self.case_order: dict[int, list[str]] = {}  # decision node -> declared values

    def new_node(self, kind: str, name: Optional[str], label: Optional[str]) -> int:
        node_id = len(self.nodes)
        self.nodes.append(Node(node_id=node_id, kind=kind, name=name, label=label))
        return node_id

    def register_label(self, stmt: _Stmt, node_id: Optional[int]) -> None:
        if stmt.label is None:
            return
        if stmt.label in self.labels:
            self.diags.append(
                Diagnostic(
                    "duplicate-label",
                    stmt.label_line,
                    stmt.label_col,
                    f"label {stmt.label!r} is already defined",
                )
            )
            return
        if node_id is not None:
            self.labels[stmt.label] = node_id

    # A "hook" is a pending causality edge: (src node, case value or None).
    def connect(self, hooks: list[tuple[int, Optional[str]]], dst: int) -> None:
        for src, value in hooks:
            self.edges.append(CausalityEdge(src=src, dst=dst, value=value))

    def build_block(
        self, stmts: list[_Stmt], incoming: list[tuple[int, Optional[str]]]
    ) -> tuple[Optional[int], list[tuple[int, Optional[str]]]]:
        """Chain statements; returns (entry node of block or None, dangling hooks)."""
        entry: Optional[int] = None
        hooks = incoming
        terminated = False
        for stmt in stmts:
            if terminated:
                self.diags.append(
                    Diagnostic(
                        "unreachable-statement",
                        stmt.line,
                        stmt.col,
                        "statement after done is unreachable",
                    )
                )
                continue
            if isinstance(stmt, _Order):
                self.register_label(stmt, None)
                self.orders.append(stmt)
                continue
            if isinstance(stmt, _Action):
                node = self.new_node("event", stmt.name, stmt.label)
                self.register_label(stmt, node)
                self.connect(hooks, node)
                hooks = [(node, None)]
            elif isinstance(stmt, _Counter):
                if self.ns is not None and stmt.name not in self.ns:
                    self.diags.append(
                        Diagnostic(
                            "unknown-counter",
                            stmt.line,
                            stmt.col,
                            f"counter {stmt.name!r} is not in the namespace",
                        )
                    )
                if stmt.name not in self.seen_counters:
                    self.seen_counters.append(stmt.name)
                node = self.new_node("counter", stmt.name, stmt.label)
                self.register_label(stmt, node)
                self.connect(hooks, node)
                hooks = [(node, None)]
            elif isinstance(stmt, _Done):
                node = self.new_node("done", None, stmt.label)
                self.register_label(stmt, node)
                self.connect(hooks, node)
                hooks = []
                terminated = True
            elif isinstance(stmt, _Switch):
                node = self.new_node("decision", stmt.prop, stmt.label)
                self.register_label(stmt, node)
                self.connect(hooks, node)
                self.case_order[node] = [c.value for c in stmt.cases]
                hooks = []
                seen_values = set()
                for case in stmt.cases:
                    if case.value in seen_values:
                        self.diags.append(
                            Diagnostic(
                                "duplicate-case",
                                case.line,
                                case.col,
                                f"case {case.value!r} appears twice in one switch",
                            )
                        )
                        continue
                    seen_values.add(case.value)
                    _, dangling = self.build_block(case.body, [(node, case.value)])
                    hooks.extend(dangling)
                if not hooks:
                    # every branch ended in done; anything after is unreachable
                    terminated = True
            else:  # pragma: no cover - parser emits only the kinds above
                raise AssertionError(stmt)
            if entry is None:
                entry = node
        return entry, hooks

    def ordered_edges(self) -> list[CausalityEdge]:
        """Causality edges with decision out-edges in case declaration order.

        An empty case's edge is only connected once the branch rejoin target
        exists, so raw insertion order can disagree with the source text.
        """
        by_src: dict[int, list[CausalityEdge]] = {}
        for e in self.edges:
            by_src.setdefault(e.src, []).append(e)
        out: list[CausalityEdge] = []
        for node in self.nodes:
            edges = by_src.get(node.node_id, [])
            if node.node_id in self.case_order:
                rank = {v: i for i, v in enumerate(self.case_order[node.node_id])}
                edges = sorted(edges, key=lambda e: rank.get(e.value, len(rank)))
            out.extend(edges)
        return out

    def resolve_orders(self) -> list[tuple[int, int]]:
        hb: list[tuple[int, int]] = []
        for stmt in self.orders:
            ok = True
            for name in (stmt.first, stmt.second):
                if name not in self.labels:
                    self.diags.append(
                        Diagnostic(
                            "unknown-label",
                            stmt.line,
                            stmt.col,
                            f"order references undefined label {name!r}",
                        )
                    )
                    ok = False
            if ok:
                hb.append((self.labels[stmt.first], self.labels[stmt.second]))
        return hb


def parse(
    src: DslSource | str,
    ns: Optional[CounterNamespace] = None,
) -> MuDD:
    """Parse source text into a MuDD.

    With ns=None the namespace is inferred from counter statements in order of
    first appearance. Raises DslParseError carrying every diagnostic.
    """
    if isinstance(src, str):
        src = DslSource(text=src)
    tokens, diags = _tokenize(src.text)
    parser = _Parser(tokens)
    stmts = parser.parse_block(frozenset())
    tok = parser.peek()
    if tok.kind != "eof":
        parser.error(tok, f"unexpected {tok.text!r} at top level")
    diags.extend(parser.diags)

    builder = _Builder(ns)
    entry, hooks = builder.build_block(stmts, [])
    if hooks or entry is None:
        done_id = builder.new_node("done", None, None)
        builder.connect(hooks, done_id)
        if entry is None:
            entry = done_id
    hb = builder.resolve_orders()
    diags.extend(builder.diags)
    if diags:
        raise DslParseError(diags, src.origin)

    namespace = ns if ns is not None else CounterNamespace(builder.seen_counters)
    model = MuDD(
        nodes=tuple(builder.nodes),
        causality=tuple(builder.ordered_edges()),
        happens_before=tuple(hb),
        entry=entry,
        namespace=namespace,
    )
    model.validate()
    return model


def parse_file(path, ns: Optional[CounterNamespace] = None) -> MuDD:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(DslSource(text=fh.read(), origin=str(path)), ns)


# ---------------------------------------------------------------------------
# pretty printer


_SINK = -1


def _immediate_postdominators(model: MuDD) -> dict[int, int]:
    """ipdom over causality edges, with a virtual sink below every done node."""
    order = _topo_order(model)
    depth: dict[int, int] = {_SINK: 0}
    ipdom: dict[int, int] = {}

    def nca(a: int, b: int) -> int:
        while a != b:
            if depth[a] < depth[b]:
                b = ipdom[b] if b != _SINK else _SINK
            else:
                a = ipdom[a] if a != _SINK else _SINK
        return a

    for node_id in reversed(order):
        succs = [e.dst for e in model.out_edges[node_id]] or [_SINK]
        cand = succs[0]
        for s in succs[1:]:
            cand = nca(cand, s)
        ipdom[node_id] = cand
        depth[node_id] = depth[cand] + 1
    return ipdom


def _topo_order(model: MuDD) -> list[int]:
    indeg = {n.node_id: 0 for n in model.nodes}
    for e in model.causality:
        indeg[e.dst] += 1
    ready = [n.node_id for n in model.nodes if indeg[n.node_id] == 0]
    out: list[int] = []
    while ready:
        nid = ready.pop()
        out.append(nid)
        for e in model.out_edges[nid]:
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                ready.append(e.dst)
    return out


def format_model(model: MuDD) -> str:
    """Render a diagram back to source text.

    Recovers block structure from the causality DAG (branch rejoin points are
    immediate postdominators of decision nodes). Diagrams built by parse()
    print each node exactly once; arbitrary hand-built DAGs may print shared
    tails more than once, which preserves the path set and signatures.
    """
    ipdom = _immediate_postdominators(model)
    lines: list[str] = []
    emitted: set[int] = set()
    hb_nodes = {nid for edge in model.happens_before for nid in edge}
    labels: dict[int, str] = {}
    for n in model.nodes:
        if n.label is not None:
            labels[n.node_id] = n.label
    used = set(labels.values())
    for nid in sorted(hb_nodes):
        if nid not in labels:
            candidate = f"n{nid}"
            while candidate in used:
                candidate += "_"
            labels[nid] = candidate
            used.add(candidate)

    def prefix(node_id: int) -> str:
        return f"{labels[node_id]}: " if node_id in labels else ""

    def emit_chain(node_id: int, stop: int, indent: int) -> None:
        pad = "    " * indent
        current = node_id
        while current != stop:
            node = model.node(current)
            if current in emitted and current in labels:
                raise MuddError(
                    f"cannot print: labeled node {current} is shared between branches"
                )
            emitted.add(current)
            if node.kind == "event":
                lines.append(f"{pad}{prefix(current)}action {node.name};")
                current = model.out_edges[current][0].dst
            elif node.kind == "counter":
                lines.append(f"{pad}{prefix(current)}counter {node.name};")
                current = model.out_edges[current][0].dst
            elif node.kind == "done":
                lines.append(f"{pad}{prefix(current)}done;")
                return
            elif node.kind == "decision":
                cont = ipdom[current]
                lines.append(f"{pad}{prefix(current)}switch ({node.name}) {{")
                for e in model.out_edges[current]:
                    lines.append(f"{pad}    case {e.value}:")
                    emit_chain(e.dst, cont, indent + 2)
                lines.append(f"{pad}}}")
                if cont == _SINK:
                    return
                current = cont

    # order declarations go first so they are never unreachable after a done
    for src, dst in model.happens_before:
        lines.append(f"order {labels[src]} -> {labels[dst]};")
    emit_chain(model.entry, _SINK, 0)
    return "\n".join(lines) + "\n"
