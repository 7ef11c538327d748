"""Run-to-completion fixed-priority dispatcher simulation over concrete scenarios."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..derive import Chain, chains
from ..model import SystemModel, require_valid
from . import kernel
from .scenario import (
    Scenario,
    SourcePolicy,
    default_duration,
    expand,
    random_scenario,
)

KIND_ORDER = {"completion": 0, "arrival": 1, "release": 2, "dispatch": 3, "emission": 4}


@dataclass(frozen=True)
class TraceRecord:
    time: int
    kind: str
    job: str
    instance: int
    transaction: str


@dataclass(frozen=True)
class Execution:
    job: str
    transaction: str
    instance: int
    release: int
    start: int
    end: int


@dataclass(frozen=True)
class InstanceResult:
    transaction: str
    instance: int
    arrival: int
    release: int
    completion: int
    response: int
    missed: bool


@dataclass
class Trace:
    duration: int
    jobs: Tuple[str, ...]
    records: List[TraceRecord]
    executions: List[Execution]
    instances: List[InstanceResult]
    jitter_bounds: Dict[str, int] = field(default_factory=dict)
    deadlines: Dict[str, int] = field(default_factory=dict)

    def responses(self, transaction: str) -> List[int]:
        return [i.response for i in self.instances if i.transaction == transaction]

    def max_responses(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for i in self.instances:
            out[i.transaction] = max(out.get(i.transaction, 0), i.response)
        return out

    def misses(self) -> List[InstanceResult]:
        return [i for i in self.instances if i.missed]

    def to_lines(self) -> str:
        """Line-delimited export: ``time<TAB>kind<TAB>job<TAB>instance`` per record."""
        return "".join(f"{r.time}\t{r.kind}\t{r.job}\t{r.instance}\n" for r in self.records)


def parse_trace_lines(text: str) -> List[Tuple[int, str, str, int]]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        time, kind, job, inst = line.split("\t")
        out.append((int(time), kind, job, int(inst)))
    return out


class CompiledModel:
    """Array form of a model's jobs and signal emissions, shared by all runs."""

    def __init__(self, model: SystemModel):
        require_valid(model)
        self.model = model
        self.chains: List[Chain] = chains(model)
        self.jobs = [j for c in self.chains for j in c.jobs]
        self.index = {j.root: i for i, j in enumerate(self.jobs)}
        self.job_cost = np.array([j.cost for j in self.jobs], dtype=np.int64)
        self.job_prio = np.array([j.priority for j in self.jobs], dtype=np.int64)
        emits: List[List[Tuple[int, int]]] = [[] for _ in self.jobs]
        for c in self.chains:
            for e in c.emissions:
                src = self.index[e.source]
                emits[src].append((e.offset, self.index[e.target]))
        ptr = [0]
        off, tgt = [], []
        for lst in emits:
            for o, t in lst:
                off.append(o)
                tgt.append(t)
            ptr.append(len(off))
        self.emit_ptr = np.array(ptr, dtype=np.int64)
        self.emit_off = np.array(off, dtype=np.int64)
        self.emit_tgt = np.array(tgt, dtype=np.int64)
        self.root_job = np.array([self.index[c.jobs[0].root] for c in self.chains], dtype=np.int64)
        self.txn_ids = [c.transaction for c in self.chains]
        self.deadline = np.array([model.transaction(t).deadline for t in self.txn_ids], dtype=np.int64)

    def run(self, scenario: Scenario, dispatch=None):
        """Dispatch one scenario; returns raw arrays for fast aggregation."""
        dispatch = dispatch or kernel.dispatch
        arrivals = expand(self.model, scenario)
        txn_of = np.concatenate([np.full(a.arrival.size, i, dtype=np.int64)
                                 for i, a in enumerate(arrivals)] or [np.zeros(0, np.int64)])
        arr = np.concatenate([a.arrival for a in arrivals] or [np.zeros(0, np.int64)])
        rel = np.concatenate([a.release for a in arrivals] or [np.zeros(0, np.int64)])
        seq = np.concatenate([np.arange(a.arrival.size, dtype=np.int64) for a in arrivals]
                             or [np.zeros(0, np.int64)])
        # instance ids follow arrival order so equal-priority ties stay FIFO
        by_arrival = np.lexsort((seq, txn_of, arr))
        arr, rel, txn_of, seq = arr[by_arrival], rel[by_arrival], txn_of[by_arrival], seq[by_arrival]
        inst = np.arange(arr.size, dtype=np.int64)
        root = self.root_job[txn_of]
        by_release = np.lexsort((inst, root, rel))
        out = dispatch(self.job_cost, self.job_prio, self.emit_ptr, self.emit_off, self.emit_tgt,
                       rel[by_release], root[by_release], inst[by_release], int(arr.size))
        return RawRun(arr, rel, txn_of, seq, *out)


@dataclass
class RawRun:
    arrival: np.ndarray
    release: np.ndarray
    txn: np.ndarray
    seq: np.ndarray
    ex_job: np.ndarray
    ex_inst: np.ndarray
    ex_rel: np.ndarray
    ex_start: np.ndarray
    done: np.ndarray

    @property
    def response(self) -> np.ndarray:
        return self.done - self.arrival


def simulate(model: SystemModel, scenario: Scenario, dispatch=None) -> Trace:
    """Execute ``scenario`` and return the full trace.

    Every instance arriving before ``scenario.duration`` is run to completion,
    so the trace may extend past the duration.
    """
    cm = model if isinstance(model, CompiledModel) else CompiledModel(model)
    model = cm.model
    raw = cm.run(scenario, dispatch)
    recs: List[Tuple[int, int, int, TraceRecord]] = []
    counter = 0

    def add(time, kind, job, inst, txn):
        nonlocal counter
        recs.append((time, KIND_ORDER[kind], counter, TraceRecord(time, kind, job, inst, txn)))
        counter += 1

    txn_names = cm.txn_ids
    for i in range(raw.arrival.size):
        t = txn_names[raw.txn[i]]
        root = cm.jobs[cm.root_job[raw.txn[i]]].root
        add(int(raw.arrival[i]), "arrival", root, int(raw.seq[i]), t)
        add(int(raw.release[i]), "release", root, int(raw.seq[i]), t)

    execs = []
    for k in range(raw.ex_job.size):
        j = int(raw.ex_job[k])
        inst = int(raw.ex_inst[k])
        t = txn_names[raw.txn[inst]]
        q = int(raw.seq[inst])
        job = cm.jobs[j]
        start = int(raw.ex_start[k])
        end = start + job.cost
        execs.append(Execution(job.root, t, q, int(raw.ex_rel[k]), start, end))
        add(start, "dispatch", job.root, q, t)
        for e in range(cm.emit_ptr[j], cm.emit_ptr[j + 1]):
            when = start + int(cm.emit_off[e])
            child = cm.jobs[int(cm.emit_tgt[e])].root
            add(when, "emission", job.root, q, t)
            add(when, "release", child, q, t)
        add(end, "completion", job.root, q, t)
    recs.sort(key=lambda r: r[:3])

    instances = []
    for i in range(raw.arrival.size):
        ti = int(raw.txn[i])
        resp = int(raw.done[i] - raw.arrival[i])
        instances.append(InstanceResult(txn_names[ti], int(raw.seq[i]), int(raw.arrival[i]),
                                        int(raw.release[i]), int(raw.done[i]), resp,
                                        resp > int(cm.deadline[ti])))
    return Trace(
        duration=scenario.duration,
        jobs=tuple(j.root for j in cm.jobs),
        records=[r[3] for r in recs],
        executions=execs,
        instances=instances,
        jitter_bounds={t: model.pattern(t).jitter for t in txn_names},
        deadlines={t: int(d) for t, d in zip(txn_names, cm.deadline)},
    )


def _aligned_scenario(model: SystemModel, duration: Optional[int]) -> Scenario:
    # every first release at the largest jitter bound, after full jitter
    if duration is None:
        duration = default_duration(model)
    jit = {t.id: model.pattern(t.id).jitter for t in model.transactions}
    release = max(jit.values(), default=0)
    sources = {t.external_event: SourcePolicy(phase=release - jit[t.id], jitter="first_max")
               for t in model.transactions}
    return Scenario(duration, sources, 0)


def critical_scenario(model: SystemModel, target: str, duration: Optional[int] = None) -> Scenario:
    """Release every other source with ``target``'s worst blocker just started.

    The blocker is the costliest job below ``target``'s chain minimum
    priority.  Its transaction arrives at 0 with no jitter; every other
    source's first instance suffers its full jitter and is released one tick
    after the blocker starts.  Later instances arrive with no jitter and
    exact minimum gaps.
    """
    cm = CompiledModel(model)
    if duration is None:
        duration = default_duration(model)
    chain = next(c for c in cm.chains if c.transaction == target)
    members = {j.root for j in chain.jobs}
    lower = [j for j in cm.jobs if j.priority < chain.min_priority and j.root not in members]
    blocker = max(lower, key=lambda j: j.cost, default=None)
    if blocker is None or blocker.cost == 0:
        return _aligned_scenario(model, duration)
    jit = {t.id: model.pattern(t.id).jitter for t in model.transactions}

    solo = Scenario(1, {t.external_event: SourcePolicy(phase=1) for t in model.transactions
                        if t.id != blocker.transaction} | {
        model.transaction(blocker.transaction).external_event: SourcePolicy()})
    raw = cm.run(solo)
    bidx = cm.index[blocker.root]
    start = int(raw.ex_start[np.flatnonzero(raw.ex_job == bidx)[0]])
    release = start + 1
    shift = max(0, max(jit[t] - release for t in jit if t != blocker.transaction))
    sources = {}
    for t in model.transactions:
        if t.id == blocker.transaction:
            sources[t.external_event] = SourcePolicy(phase=shift)
        else:
            sources[t.external_event] = SourcePolicy(phase=shift + release - jit[t.id],
                                                     jitter="first_max")
    return Scenario(duration, sources, 0)


def adversarial_scenario(model: SystemModel, duration: Optional[int] = None) -> Scenario:
    """Worst-phasing heuristic for the whole model.

    Aims at the highest-priority transaction that can be blocked; without any
    blocking all sources are released together with full first-instance
    jitter.
    """
    cm = CompiledModel(model)
    candidates = []
    for c in cm.chains:
        members = {j.root for j in c.jobs}
        b = max((j.cost for j in cm.jobs if j.priority < c.min_priority and j.root not in members),
                default=0)
        if b > 0:
            candidates.append((-c.min_priority, cm.chains.index(c), c.transaction))
    if not candidates:
        return _aligned_scenario(model, duration)
    return critical_scenario(model, min(candidates)[2], duration)


@dataclass
class SweepSummary:
    scenarios: int
    max_response: Dict[str, int]
    misses: Dict[str, int]
    worst_seed: Dict[str, Optional[int]]

    @property
    def total_misses(self) -> int:
        return sum(self.misses.values())


def sweep(model: SystemModel, count: int, seed: int = 0, duration: Optional[int] = None,
          jitter: str = "random", include_critical: bool = True, dispatch=None) -> SweepSummary:
    """Adversarial and per-transaction critical scenarios plus ``count`` seeded random ones.

    ``worst_seed`` names the random-scenario seed that produced each maximum
    (``None`` when a constructed scenario did).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    cm = CompiledModel(model)
    n = len(cm.txn_ids)
    best = np.full(n, -1, dtype=np.int64)
    misses = np.zeros(n, dtype=np.int64)
    worst: List[Optional[int]] = [None] * n

    def account(scn, tag):
        raw = cm.run(scn, dispatch)
        if raw.arrival.size == 0:
            return
        resp = raw.response
        peak = np.full(n, -1, dtype=np.int64)
        np.maximum.at(peak, raw.txn, resp)
        improved = peak > best
        for i in np.flatnonzero(improved):
            worst[i] = tag
        np.maximum(best, peak, out=best)
        np.add.at(misses, raw.txn, (resp > cm.deadline[raw.txn]).astype(np.int64))

    constructed = [adversarial_scenario(model, duration)]
    if include_critical:
        constructed += [critical_scenario(model, t, duration) for t in cm.txn_ids]
    for scn in constructed:
        account(scn, None)
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**31 - 1, size=count)
    for s in seeds:
        account(random_scenario(model, int(s), duration, jitter), int(s))
    return SweepSummary(
        scenarios=count + len(constructed),
        max_response={t: int(b) for t, b in zip(cm.txn_ids, best)},
        misses={t: int(m) for t, m in zip(cm.txn_ids, misses)},
        worst_seed=dict(zip(cm.txn_ids, worst)),
    )
