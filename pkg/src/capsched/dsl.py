"""Textual ``.rts`` model format: lexer, recursive-descent parser and renderer.

Grammar (keywords lowercase, ``#`` starts a comment, newlines are insignificant)::

    system "<name>"
    transaction <Id> {
      external <EventId> (periodic period=<T> [jitter=<J>]
                         | aperiodic min_interarrival=<T> [jitter=<J>]
                         | sporadic outer=<T> inner=<t> burst=<n> [jitter=<J>])
      action <ActionId> trigger=<EventId> owner=<Capsule> priority=<p> deadline=<D> {
        sub <SubId> exec=<C> [emits (signal|call) <EventId>] [reply]
      }
    }

Priorities: larger number = higher priority.  Internal events are declared by
their ``emits`` site and must trigger exactly one action somewhere in the file.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    Action,
    ArrivalPattern,
    Emission,
    Event,
    EventKind,
    PatternKind,
    SubAction,
    SystemModel,
    Transaction,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, code: str, message: str, expected: Sequence[str] = ()):
        self.span = span
        self.code = code
        self.message = message
        self.expected = tuple(expected)
        text = f"{span}: {code}: {message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str  # WORD, INT, STRING, EQ, LBRACE, RBRACE, EOF
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+|\#[^\n]*)
  | (?P<INT>\d+(?![\w]))
  | (?P<WORD>[^\W\d]\w*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<EQ>=)
  | (?P<LBRACE>\{)
  | (?P<RBRACE>\})
    """,
    re.VERBOSE,
)


class _Lines:
    def __init__(self, text: str):
        self.starts = [0] + [m.end() for m in re.finditer(r"\r\n|\r|\n", text)]

    def span(self, start: int, end: int) -> SourceSpan:
        row = bisect.bisect_right(self.starts, start) - 1
        return SourceSpan(row + 1, start - self.starts[row] + 1, start, end)


def tokenize(text: str) -> List[Token]:
    lines = _Lines(text)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise ParseError(lines.span(pos, pos + 1), "UNTERMINATED_STRING",
                                 "string literal is not closed on this line")
            raise ParseError(lines.span(pos, pos + 1), "BAD_CHARACTER",
                             f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), lines.span(m.start(), m.end())))
        pos = m.end()
    tokens.append(Token("EOF", "", lines.span(len(text), len(text))))
    return tokens


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


_PATTERN_ATTRS = {
    "periodic": (("period",), ("jitter",)),
    "aperiodic": (("min_interarrival",), ("jitter",)),
    "sporadic": (("outer", "inner", "burst"), ("jitter",)),
}
_ACTION_ATTRS = ("trigger", "owner", "priority", "deadline")
_INT_ATTRS = {"priority", "deadline", "exec", "period", "min_interarrival",
              "outer", "inner", "burst", "jitter"}


@dataclass
class _RawAction:
    id: str
    span: SourceSpan
    trigger: str
    trigger_span: SourceSpan
    owner: str
    priority: int
    deadline: int
    subs: List[SubAction] = field(default_factory=list)
    emit_spans: List[SourceSpan] = field(default_factory=list)


@dataclass
class _RawTransaction:
    id: str
    span: SourceSpan
    event: str
    event_span: SourceSpan
    pattern: ArrivalPattern
    actions: List[_RawAction] = field(default_factory=list)


@dataclass(frozen=True)
class ParsedModel:
    """A parsed model plus the source location of every declared id."""

    model: SystemModel
    spans: Dict[str, SourceSpan]


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, expected: Sequence[str] = (), code: Optional[str] = None):
        tok = self.tok
        if code is None:
            code = "UNEXPECTED_EOF" if tok.kind == "EOF" else "UNEXPECTED_TOKEN"
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        return ParseError(tok.span, code, f"{message}, found {found}", expected)

    def next(self) -> Token:
        tok = self.tok
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def is_word(self, *words: str) -> bool:
        return self.tok.kind == "WORD" and self.tok.text in words

    def expect_word(self, word: str) -> Token:
        if not self.is_word(word):
            raise self.error(f"expected '{word}'", (repr(word),))
        return self.next()

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            raise self.error(f"expected {what}", (kind,))
        return self.next()

    def attrs(self, allowed: Sequence[str]) -> Dict[str, Tuple[object, Token]]:
        out: Dict[str, Tuple[object, Token]] = {}
        while self.tok.kind == "WORD" and self.tokens[self.i + 1].kind == "EQ":
            key = self.next()
            if key.text not in allowed:
                raise ParseError(key.span, "UNKNOWN_ATTRIBUTE",
                                 f"unknown attribute {key.text!r}", [repr(a) for a in allowed])
            if key.text in out:
                raise ParseError(key.span, "DUPLICATE_ATTRIBUTE", f"attribute {key.text!r} given twice")
            self.next()
            if key.text in _INT_ATTRS:
                val = self.expect("INT", f"integer value for {key.text}")
                out[key.text] = (int(val.text), val)
            else:
                val = self.expect("WORD", f"identifier value for {key.text}")
                out[key.text] = (val.text, val)
        return out

    def require(self, attrs, names, where: Token):
        for name in names:
            if name not in attrs:
                raise ParseError(where.span, "MISSING_ATTRIBUTE",
                                 f"{where.text} {name!r} is required", [f"{name}="])

    def parse_file(self) -> Tuple[str, List[_RawTransaction]]:
        if self.tok.kind == "EOF":
            raise ParseError(SourceSpan(1, 1, 0, 0), "EMPTY_MODEL", "input contains no model", ("'system'",))
        self.expect_word("system")
        name = _unquote(self.expect("STRING", "quoted system name").text)
        txns = []
        while self.tok.kind != "EOF":
            if not self.is_word("transaction"):
                raise self.error("expected 'transaction'", ("'transaction'", "EOF"))
            txns.append(self.parse_transaction())
        return name, txns

    def parse_transaction(self) -> _RawTransaction:
        self.expect_word("transaction")
        ident = self.expect("WORD", "transaction id")
        self.expect("LBRACE", "'{'")
        self.expect_word("external")
        event = self.expect("WORD", "external event id")
        if not self.is_word(*_PATTERN_ATTRS):
            raise self.error("expected arrival kind", ("'periodic'", "'aperiodic'", "'sporadic'"))
        kind_tok = self.next()
        required, optional = _PATTERN_ATTRS[kind_tok.text]
        attrs = self.attrs(required + optional)
        self.require(attrs, required, kind_tok)
        jitter = attrs.get("jitter", (0, None))[0]
        try:
            if kind_tok.text == "periodic":
                pattern = ArrivalPattern.periodic(attrs["period"][0], jitter)
            elif kind_tok.text == "aperiodic":
                pattern = ArrivalPattern.aperiodic(attrs["min_interarrival"][0], jitter)
            else:
                pattern = ArrivalPattern.sporadic(attrs["outer"][0], attrs["inner"][0],
                                                  attrs["burst"][0], jitter)
        except (TypeError, ValueError) as exc:
            raise ParseError(kind_tok.span, "BAD_VALUE", str(exc)) from None
        txn = _RawTransaction(ident.text, ident.span, event.text, event.span, pattern)
        while self.is_word("action"):
            txn.actions.append(self.parse_action())
        if self.tok.kind != "RBRACE":
            raise self.error("expected 'action' or '}'", ("'action'", "'}'"))
        self.next()
        return txn

    def parse_action(self) -> _RawAction:
        kw = self.expect_word("action")
        ident = self.expect("WORD", "action id")
        attrs = self.attrs(_ACTION_ATTRS)
        self.require(attrs, _ACTION_ATTRS, kw)
        if attrs["priority"][0] < 1:
            raise ParseError(attrs["priority"][1].span, "BAD_VALUE", "priority must be >= 1")
        act = _RawAction(ident.text, ident.span, attrs["trigger"][0], attrs["trigger"][1].span,
                         attrs["owner"][0], attrs["priority"][0], attrs["deadline"][0])
        self.expect("LBRACE", "'{'")
        while self.is_word("sub"):
            sub, span = self.parse_sub()
            act.subs.append(sub)
            act.emit_spans.append(span)
        if self.tok.kind != "RBRACE":
            raise self.error("expected 'sub' or '}'", ("'sub'", "'}'"))
        self.next()
        return act

    def parse_sub(self) -> Tuple[SubAction, Optional[SourceSpan]]:
        kw = self.expect_word("sub")
        ident = self.expect("WORD", "sub-action id")
        attrs = self.attrs(("exec",))
        self.require(attrs, ("exec",), kw)
        emits = None
        span = None
        if self.is_word("emits"):
            self.next()
            if not self.is_word("signal", "call"):
                raise self.error("expected emission kind", ("'signal'", "'call'"))
            kind = self.next().text
            target = self.expect("WORD", "event id")
            emits = Emission(EventKind(kind), target.text)
            span = target.span
        reply = False
        if self.is_word("reply"):
            self.next()
            reply = True
        return SubAction(ident.text, attrs["exec"][0], emits, reply), span


def _resolve(name: str, raw: List[_RawTransaction]) -> ParsedModel:
    spans: Dict[str, SourceSpan] = {}

    def declare(ident, span, what):
        if ident in spans:
            raise ParseError(span, "DUPLICATE_ID", f"{what} id {ident!r} already declared at {spans[ident]}")
        spans[ident] = span

    for txn in raw:
        declare(txn.id, txn.span, "transaction")
        declare(txn.event, txn.event_span, "event")
        for act in txn.actions:
            declare(act.id, act.span, "action")

    externals = {t.event for t in raw}
    triggered: Dict[str, _RawAction] = {}
    for txn in raw:
        for act in txn.actions:
            if act.trigger in triggered:
                raise ParseError(act.trigger_span, "DUPLICATE_TRIGGER",
                                 f"event {act.trigger!r} already triggers {triggered[act.trigger].id}")
            triggered[act.trigger] = act

    internal: Dict[str, EventKind] = {}
    order: List[str] = []
    for txn in raw:
        order.append(txn.event)
        if txn.event not in triggered:
            raise ParseError(txn.event_span, "DANGLING_REF",
                             f"external event {txn.event!r} triggers no action")
        for act in txn.actions:
            for sub, span in zip(act.subs, act.emit_spans):
                if sub.emits is None:
                    continue
                target = sub.emits.target
                if target in externals:
                    raise ParseError(span, "DANGLING_REF", f"{target!r} is external and cannot be emitted")
                if target in spans:
                    raise ParseError(span, "DANGLING_REF", f"{target!r} names a transaction or action")
                if target not in triggered:
                    raise ParseError(span, "DANGLING_REF", f"event {target!r} triggers no action")
                prev = internal.get(target)
                if prev is not None and prev is not sub.emits.kind:
                    raise ParseError(span, "KIND_CONFLICT",
                                     f"event {target!r} emitted both as {prev.value} and {sub.emits.kind.value}")
                if prev is None:
                    internal[target] = sub.emits.kind
                    order.append(target)
                    spans[target] = span

    for ev, act in triggered.items():
        if ev not in externals and ev not in internal:
            raise ParseError(act.trigger_span, "DANGLING_REF",
                             f"trigger {ev!r} is neither this file's external event nor emitted anywhere")

    patterns = {t.event: t.pattern for t in raw}
    events = []
    for ev in order:
        if ev in patterns:
            events.append(Event(ev, EventKind.EXTERNAL, triggered[ev].id, patterns[ev]))
        else:
            events.append(Event(ev, internal[ev], triggered[ev].id))

    actions = []
    txns = []
    for txn in raw:
        for a in txn.actions:
            actions.append(Action(a.id, a.trigger, a.owner, a.priority, a.deadline, tuple(a.subs)))
        deadline = min((a.deadline for a in txn.actions), default=0)
        txns.append(Transaction(txn.id, txn.event, tuple(a.id for a in txn.actions), deadline))
    return ParsedModel(SystemModel(name, tuple(txns), tuple(events), tuple(actions)), spans)


def parse_document(text: str) -> ParsedModel:
    p = _Parser(text)
    name, raw = p.parse_file()
    return _resolve(name, raw)


def parse(text: str) -> SystemModel:
    """Parse ``.rts`` text; raises :class:`ParseError` on the first problem."""
    return parse_document(text).model


def load(path) -> SystemModel:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _render_pattern(p: ArrivalPattern) -> str:
    if p.kind is PatternKind.PERIODIC:
        s = f"periodic period={p.outer_period}"
    elif p.kind is PatternKind.APERIODIC:
        s = f"aperiodic min_interarrival={p.outer_period}"
    else:
        s = f"sporadic outer={p.outer_period} inner={p.inner_period} burst={p.burst}"
    if p.jitter:
        s += f" jitter={p.jitter}"
    return s


def render(model: SystemModel) -> str:
    out = [f"system {_quote(model.name)}"]
    for txn in model.transactions:
        ext = model.event(txn.external_event)
        out.append("")
        out.append(f"transaction {txn.id} {{")
        out.append(f"  external {ext.id} {_render_pattern(ext.pattern)}")
        for aid in txn.actions:
            a = model.action(aid)
            out.append(f"  action {a.id} trigger={a.trigger} owner={a.owner} "
                       f"priority={a.priority} deadline={a.deadline} {{")
            for sub in a.subs:
                line = f"    sub {sub.name} exec={sub.cost}"
                if sub.emits is not None:
                    line += f" emits {sub.emits.kind.value} {sub.emits.target}"
                if sub.reply:
                    line += " reply"
                out.append(line)
            out.append("  }")
        out.append("}")
    return "\n".join(out) + "\n"
