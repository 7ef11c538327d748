"""Domain types for transaction/action/sub-action models and structural checks.

All times are non-negative integer ticks.  Priorities are positive integers
where a larger number means a higher priority.  Model objects are frozen and
may be shared freely between analyses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Tuple


class PatternKind(str, enum.Enum):
    PERIODIC = "periodic"
    APERIODIC = "aperiodic"
    SPORADIC = "sporadic"


class EventKind(str, enum.Enum):
    EXTERNAL = "external"
    SIGNAL = "signal"
    CALL = "call"


def _check_tick(name: str, value: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an integer tick, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class ArrivalPattern:
    """Arrival law of an external event source.

    Instances arrive in bursts of ``burst`` spaced ``inner_period`` apart;
    consecutive bursts start at least ``outer_period`` apart.  Each release
    may lag its arrival by up to ``jitter`` ticks.  Periodic and aperiodic
    sources are the ``burst == 1, inner_period == outer_period`` case.
    """

    outer_period: int
    inner_period: int
    burst: int = 1
    jitter: int = 0
    kind: PatternKind = PatternKind.PERIODIC

    def __post_init__(self):
        for name in ("outer_period", "inner_period", "jitter"):
            _check_tick(name, getattr(self, name))
        if self.outer_period < 1 or self.inner_period < 1:
            raise ValueError("periods must be >= 1")
        if isinstance(self.burst, bool) or not isinstance(self.burst, int) or self.burst < 1:
            raise ValueError(f"burst must be a positive integer, got {self.burst!r}")
        object.__setattr__(self, "kind", PatternKind(self.kind))

    @classmethod
    def periodic(cls, period: int, jitter: int = 0) -> "ArrivalPattern":
        return cls(period, period, 1, jitter, PatternKind.PERIODIC)

    @classmethod
    def aperiodic(cls, min_interarrival: int, jitter: int = 0) -> "ArrivalPattern":
        return cls(min_interarrival, min_interarrival, 1, jitter, PatternKind.APERIODIC)

    @classmethod
    def sporadic(cls, outer: int, inner: int, burst: int, jitter: int = 0) -> "ArrivalPattern":
        return cls(outer, inner, burst, jitter, PatternKind.SPORADIC)

    def arrival(self, q: int) -> int:
        """Offset of instance ``q`` from the first arrival under the densest legal phasing."""
        return (q // self.burst) * self.outer_period + (q % self.burst) * self.inner_period

    def with_jitter(self, jitter: int) -> "ArrivalPattern":
        return ArrivalPattern(self.outer_period, self.inner_period, self.burst, jitter, self.kind)


@dataclass(frozen=True)
class Emission:
    kind: EventKind
    target: str

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        if self.kind is EventKind.EXTERNAL:
            raise ValueError("sub-actions emit signal or call events only")


@dataclass(frozen=True)
class SubAction:
    name: str
    cost: int
    emits: Optional[Emission] = None
    reply: bool = False

    def __post_init__(self):
        _check_tick("cost", self.cost)


@dataclass(frozen=True)
class Action:
    id: str
    trigger: str
    owner: str
    priority: int
    deadline: int
    subs: Tuple[SubAction, ...]
    cost: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(self.subs))
        if isinstance(self.priority, bool) or not isinstance(self.priority, int) or self.priority < 1:
            raise ValueError(f"priority of {self.id} must be a positive integer")
        _check_tick("deadline", self.deadline)
        object.__setattr__(self, "cost", sum(s.cost for s in self.subs))

    def emissions(self) -> Iterator[Tuple[int, SubAction]]:
        for i, sub in enumerate(self.subs):
            if sub.emits is not None:
                yield i, sub


@dataclass(frozen=True)
class Event:
    id: str
    kind: EventKind
    action: str
    pattern: Optional[ArrivalPattern] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))


@dataclass(frozen=True)
class Transaction:
    id: str
    external_event: str
    actions: Tuple[str, ...]
    deadline: int

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))


@dataclass(frozen=True)
class SystemModel:
    name: str
    transactions: Tuple[Transaction, ...]
    events: Tuple[Event, ...]
    actions: Tuple[Action, ...]

    def __post_init__(self):
        for name in ("transactions", "events", "actions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @cached_property
    def action_map(self) -> Dict[str, Action]:
        return {a.id: a for a in self.actions}

    @cached_property
    def event_map(self) -> Dict[str, Event]:
        return {e.id: e for e in self.events}

    @cached_property
    def transaction_map(self) -> Dict[str, Transaction]:
        return {t.id: t for t in self.transactions}

    @property
    def capsules(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(a.owner for a in self.actions))

    def action(self, action_id: str) -> Action:
        try:
            return self.action_map[action_id]
        except KeyError:
            raise KeyError(f"unknown action {action_id!r}") from None

    def event(self, event_id: str) -> Event:
        try:
            return self.event_map[event_id]
        except KeyError:
            raise KeyError(f"unknown event {event_id!r}") from None

    def transaction(self, transaction_id: str) -> Transaction:
        try:
            return self.transaction_map[transaction_id]
        except KeyError:
            raise KeyError(f"unknown transaction {transaction_id!r}") from None

    def pattern(self, transaction_id: str) -> ArrivalPattern:
        return self.event(self.transaction(transaction_id).external_event).pattern

    def replace_action(self, action: Action) -> "SystemModel":
        """Copy of the model with one action swapped (transaction deadlines refreshed)."""
        actions = tuple(action if a.id == action.id else a for a in self.actions)
        amap = {a.id: a for a in actions}
        txns = tuple(
            Transaction(t.id, t.external_event, t.actions,
                        min(amap[a].deadline for a in t.actions if a in amap) if t.actions else 0)
            for t in self.transactions
        )
        return SystemModel(self.name, txns, self.events, actions)

    def replace_pattern(self, event_id: str, pattern: ArrivalPattern) -> "SystemModel":
        events = tuple(
            Event(e.id, e.kind, e.action, pattern) if e.id == event_id else e
            for e in self.events
        )
        return SystemModel(self.name, self.transactions, events, self.actions)


# -- validation ---------------------------------------------------------------

SYNC_PRIORITY_MISMATCH = "SYNC_PRIORITY_MISMATCH"
CYCLE_IN_CAUSES = "CYCLE_IN_CAUSES"
MISSING_REPLY = "MISSING_REPLY"
STRAY_REPLY = "STRAY_REPLY"
MULTIPLE_EMITTERS = "MULTIPLE_EMITTERS"
ORPHAN_EVENT = "ORPHAN_EVENT"
JITTER_ON_INTERNAL = "JITTER_ON_INTERNAL"
BURST_EXCEEDS_OUTER = "BURST_EXCEEDS_OUTER"
BAD_PATTERN = "BAD_PATTERN"
DANGLING_REF = "DANGLING_REF"
KIND_MISMATCH = "KIND_MISMATCH"
TRIGGER_MISMATCH = "TRIGGER_MISMATCH"
EMPTY_ACTION = "EMPTY_ACTION"
MEMBERSHIP_MISMATCH = "MEMBERSHIP_MISMATCH"
DEADLINE_MISMATCH = "DEADLINE_MISMATCH"
DUPLICATE_ID = "DUPLICATE_ID"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    subject: str

    def __str__(self):
        return f"{self.code} [{self.subject}]: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def codes(self) -> List[str]:
        return [d.code for d in self.diagnostics]

    def __bool__(self):
        return self.ok


class InvalidModelError(ValueError):
    """Raised by consumers that require a model with a clean validation report."""

    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "\n".join(str(d) for d in report.diagnostics)
        super().__init__(f"model failed validation:\n{lines}")


def successors(model: SystemModel, action_id: str) -> List[str]:
    """Actions directly caused by ``action_id`` (one per resolvable emission)."""
    out = []
    for _, sub in model.action_map[action_id].emissions():
        ev = model.event_map.get(sub.emits.target)
        if ev is not None and ev.action in model.action_map:
            out.append(ev.action)
    return out


def causal_closure(model: SystemModel, action_id: str) -> List[str]:
    seen = [action_id]
    stack = [action_id]
    while stack:
        for nxt in successors(model, stack.pop()):
            if nxt not in seen:
                seen.append(nxt)
                stack.append(nxt)
    return seen


def _find_cycles(model: SystemModel) -> List[List[str]]:
    # iterative Tarjan; returns non-trivial SCCs and self-loops
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    on_stack = set()
    stack: List[str] = []
    cycles = []
    counter = 0
    for root in model.action_map:
        if root in index:
            continue
        work = [(root, iter(successors(model, root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(successors(model, nxt))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    top = stack.pop()
                    on_stack.discard(top)
                    comp.append(top)
                    if top == node:
                        break
                if len(comp) > 1 or node in successors(model, node):
                    cycles.append(sorted(comp))
    return cycles


def validate(model: SystemModel) -> ValidationReport:
    """Check every structural invariant; problems are reported, never raised."""
    diags: List[Diagnostic] = []

    def add(code, subject, message):
        diags.append(Diagnostic(code, message, subject))

    for kind, items in (("transaction", model.transactions), ("event", model.events),
                        ("action", model.actions)):
        seen = set()
        for item in items:
            if item.id in seen:
                add(DUPLICATE_ID, item.id, f"duplicate {kind} id")
            seen.add(item.id)

    actions = model.action_map
    events = model.event_map

    for ev in model.events:
        if ev.action not in actions:
            add(DANGLING_REF, ev.id, f"event triggers unknown action {ev.action!r}")
        elif actions[ev.action].trigger != ev.id:
            add(TRIGGER_MISMATCH, ev.id,
                f"event names {ev.action} but that action is triggered by {actions[ev.action].trigger}")
        if ev.kind is EventKind.EXTERNAL:
            p = ev.pattern
            if p is None:
                add(BAD_PATTERN, ev.id, "external event without arrival pattern")
                continue
            if p.inner_period > p.outer_period or p.burst * p.inner_period > p.outer_period:
                add(BURST_EXCEEDS_OUTER, ev.id,
                    f"burst of {p.burst} x {p.inner_period} does not fit outer period {p.outer_period}")
            if p.kind is not PatternKind.SPORADIC and (p.burst != 1 or p.inner_period != p.outer_period):
                add(BAD_PATTERN, ev.id, f"{p.kind.value} pattern must have burst 1 and inner = outer period")
        elif ev.pattern is not None:
            add(JITTER_ON_INTERNAL, ev.id, "internal events carry no arrival pattern or jitter")

    emitters: Dict[str, List[str]] = {}
    for a in model.actions:
        if a.trigger not in events:
            add(DANGLING_REF, a.id, f"trigger event {a.trigger!r} does not exist")
        for _, sub in a.emissions():
            emitters.setdefault(sub.emits.target, []).append(f"{a.id}.{sub.name}")
            target = events.get(sub.emits.target)
            if target is None:
                add(DANGLING_REF, a.id, f"sub-action {sub.name} emits unknown event {sub.emits.target!r}")
                continue
            if target.kind is not sub.emits.kind:
                add(KIND_MISMATCH, a.id,
                    f"sub-action {sub.name} emits {sub.emits.kind.value} {target.id} declared as {target.kind.value}")
            callee = actions.get(target.action)
            if sub.emits.kind is EventKind.CALL and callee is not None and callee.priority != a.priority:
                add(SYNC_PRIORITY_MISMATCH, a.id,
                    f"call {target.id} links priority {a.priority} to {callee.id} at priority {callee.priority}")

    for ev in model.events:
        if ev.kind is EventKind.EXTERNAL:
            if ev.id in emitters:
                add(KIND_MISMATCH, ev.id, "external events cannot be emitted by sub-actions")
            continue
        n = len(emitters.get(ev.id, ()))
        if n == 0:
            add(ORPHAN_EVENT, ev.id, "internal event is never emitted")
        elif n > 1:
            add(MULTIPLE_EMITTERS, ev.id, f"emitted by {n} sub-actions: {', '.join(emitters[ev.id])}")

    for a in model.actions:
        trig = events.get(a.trigger)
        replies = [i for i, s in enumerate(a.subs) if s.reply]
        if not a.subs:
            add(EMPTY_ACTION, a.id, "action has no sub-actions")
        if trig is not None and trig.kind is EventKind.CALL:
            if replies != [len(a.subs) - 1] or not a.subs:
                add(MISSING_REPLY, a.id, "call-triggered action needs exactly one reply, as its last sub-action")
        elif replies:
            add(STRAY_REPLY, a.id, "only call-triggered actions may reply")

    for comp in _find_cycles(model):
        add(CYCLE_IN_CAUSES, comp[0], "causes relation is cyclic through " + " -> ".join(comp))

    owner: Dict[str, str] = {}
    for txn in model.transactions:
        ext = events.get(txn.external_event)
        if ext is None:
            add(DANGLING_REF, txn.id, f"external event {txn.external_event!r} does not exist")
            continue
        if ext.kind is not EventKind.EXTERNAL:
            add(KIND_MISMATCH, txn.id, f"{ext.id} is not an external event")
        missing = [a for a in txn.actions if a not in actions]
        for a in missing:
            add(DANGLING_REF, txn.id, f"member action {a!r} does not exist")
        for a in txn.actions:
            if a in owner:
                add(MEMBERSHIP_MISMATCH, a, f"action belongs to both {owner[a]} and {txn.id}")
            owner[a] = txn.id
        if ext.action in actions:
            closure = set(causal_closure(model, ext.action))
            if closure != set(txn.actions):
                add(MEMBERSHIP_MISMATCH, txn.id,
                    f"members {sorted(txn.actions)} differ from causal closure {sorted(closure)}")
        if not missing and txn.actions:
            dl = min(actions[a].deadline for a in txn.actions)
            if dl != txn.deadline:
                add(DEADLINE_MISMATCH, txn.id, f"deadline {txn.deadline} != minimum member deadline {dl}")

    for a in model.actions:
        if a.id not in owner:
            add(MEMBERSHIP_MISMATCH, a.id, "action belongs to no transaction")

    return ValidationReport(tuple(diags))


def require_valid(model: SystemModel) -> None:
    report = validate(model)
    if not report.ok:
        raise InvalidModelError(report)
