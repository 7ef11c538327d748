"""Scheduling entities derived from a design model.

A job is the synchronous set of an asynchronously triggered action: the
action plus everything it calls, transitively.  It executes as one
non-preemptable unit.  A chain lists the jobs of one transaction in causal
order together with the instant, relative to the emitting job's start, at
which each internal signal is emitted.

Nested calls execute as: the calling sub-action's own cost, then the callee's
whole synchronous set, then the next sub-action.  Signals are emitted when
the emitting sub-action's own cost has elapsed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .model import Action, EventKind, SystemModel


class DeriveError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class Job:
    root: str
    members: Tuple[str, ...]
    cost: int
    priority: int
    transaction: str


@dataclass(frozen=True)
class SignalEmission:
    event: str
    source: str  # root of the emitting job
    target: str  # root of the job the signal releases
    offset: int  # ticks after the emitting job starts


@dataclass(frozen=True)
class Chain:
    transaction: str
    jobs: Tuple[Job, ...]
    emissions: Tuple[SignalEmission, ...]

    @property
    def total_cost(self) -> int:
        return sum(j.cost for j in self.jobs)

    @property
    def min_priority(self) -> int:
        return min(j.priority for j in self.jobs)

    @property
    def max_priority(self) -> int:
        return max(j.priority for j in self.jobs)

    @property
    def emission_offsets(self) -> Dict[str, int]:
        return {e.event: e.offset for e in self.emissions}


def sync_set(model: SystemModel, action_id: str) -> Tuple[Tuple[str, ...], int]:
    """Return the synchronous set of ``action_id`` in execution order, and its cost."""
    root = model.action(action_id)
    members: List[str] = []

    def visit(action: Action, path: Tuple[str, ...]):
        if action.id in path:
            raise DeriveError("CYCLE_IN_CAUSES", f"call cycle through {action.id}")
        if action.id in members:
            raise DeriveError("MULTIPLE_EMITTERS", f"{action.id} is reached by two call paths")
        members.append(action.id)
        for _, sub in action.emissions():
            if sub.emits.kind is EventKind.CALL:
                visit(model.action(model.event(sub.emits.target).action), path + (action.id,))

    visit(root, ())
    return tuple(members), sum(model.action(a).cost for a in members)


def _timeline(model: SystemModel, action: Action, start: int, out: List[Tuple[str, int]]) -> int:
    t = start
    for sub in action.subs:
        t += sub.cost
        if sub.emits is None:
            continue
        if sub.emits.kind is EventKind.CALL:
            t = _timeline(model, model.action(model.event(sub.emits.target).action), t, out)
        else:
            out.append((sub.emits.target, t))
    return t


def signal_offsets(model: SystemModel, root: str) -> List[Tuple[str, int]]:
    """Signals emitted by the job rooted at ``root`` with their offsets from job start."""
    out: List[Tuple[str, int]] = []
    _timeline(model, model.action(root), 0, out)
    return out


def _make_job(model: SystemModel, root: str, transaction: str) -> Job:
    members, cost = sync_set(model, root)
    return Job(root, members, cost, model.action(root).priority, transaction)


def chains(model: SystemModel) -> List[Chain]:
    result = []
    for txn in model.transactions:
        first = model.event(txn.external_event).action
        jobs: List[Job] = []
        emissions: List[SignalEmission] = []
        queue = deque([first])
        seen = set()
        while queue:
            root = queue.popleft()
            if root in seen:
                raise DeriveError("MULTIPLE_EMITTERS", f"job {root} is released twice in {txn.id}")
            seen.add(root)
            jobs.append(_make_job(model, root, txn.id))
            for event, offset in signal_offsets(model, root):
                target = model.event(event).action
                emissions.append(SignalEmission(event, root, target, offset))
                queue.append(target)
        result.append(Chain(txn.id, tuple(jobs), tuple(emissions)))
    return result


def chain_for(model: SystemModel, transaction_id: str) -> Chain:
    for c in chains(model):
        if c.transaction == transaction_id:
            return c
    raise KeyError(f"unknown transaction {transaction_id!r}")


def jobs(model: SystemModel) -> List[Job]:
    """All jobs, transaction by transaction in causal order.

    Raises:
        DeriveError: if an action would belong to two jobs (the call graph
            is not a forest) or some action belongs to none.
    """
    out = [j for c in chains(model) for j in c.jobs]
    owner: Dict[str, str] = {}
    for j in out:
        for a in j.members:
            if a in owner:
                raise DeriveError("MULTIPLE_EMITTERS", f"{a} belongs to jobs {owner[a]} and {j.root}")
            owner[a] = j.root
    orphans = [a.id for a in model.actions if a.id not in owner]
    if orphans:
        raise DeriveError("MEMBERSHIP_MISMATCH", f"actions in no job: {', '.join(orphans)}")
    return out


def partial_cost(action: Action, p: int, q: int) -> int:
    """Own cost of sub-actions ``p..q`` inclusive (1-based, callees excluded)."""
    if not 1 <= p <= q <= len(action.subs):
        raise IndexError(f"sub-action range {p}..{q} outside 1..{len(action.subs)} for {action.id}")
    return sum(s.cost for s in action.subs[p - 1:q])
