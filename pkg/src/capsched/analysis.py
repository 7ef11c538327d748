"""Worst-case response-time analysis for run-to-completion fixed-priority systems.

Each transaction is analysed end to end.  Its chain of jobs is delayed by at
most one lower-priority job already running at the critical instant
(blocking) and by every release of other transactions whose chain reaches
the analysed chain's minimum priority (interference).  Releases are counted
over the half-open window ``[0, w)`` with jitter and bursts, and successive
own instances are examined until the level busy period closes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .derive import Chain, Job, chain_for, chains, jobs
from .model import ArrivalPattern, SystemModel, require_valid

SCHEDULABLE = "schedulable"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

POLICY = "run-to-completion"


def release_count(pattern: ArrivalPattern, window: int) -> int:
    """Maximum number of releases in ``[0, window)`` under worst-case phasing.

    The first counted instance is released at 0 after suffering the full
    jitter; every later one is released as early as its arrival allows.

    >>> release_count(ArrivalPattern.periodic(60, jitter=3), 60)
    2
    >>> release_count(ArrivalPattern.sporadic(900, 300, 3), 1000)
    4
    """
    if window < 0:
        raise ValueError("window must be >= 0")
    if window == 0:
        return 0
    T, t, n = pattern.outer_period, pattern.inner_period, pattern.burst
    x = window + pattern.jitter
    full = x // T
    rest = x - full * T
    return full * n + min(n, -(-rest // t))


def hyperperiod(model: SystemModel) -> int:
    periods = [model.pattern(t.id).outer_period for t in model.transactions]
    return math.lcm(*periods) if periods else 1


@dataclass(frozen=True)
class AnalysisConfig:
    max_window: Optional[int] = None
    stages: bool = False
    policy: str = POLICY

    def __post_init__(self):
        if self.max_window is not None and self.max_window <= 0:
            raise ValueError("max_window must be positive")
        if self.policy != POLICY:
            raise ValueError(f"only the {POLICY!r} policy is supported")

    def window_limit(self, model: SystemModel) -> int:
        if self.max_window is not None:
            return self.max_window
        return 10 * hyperperiod(model)


@dataclass(frozen=True)
class InterferenceSource:
    transaction: str
    cost: int
    pattern: ArrivalPattern


@dataclass(frozen=True)
class WCRTResult:
    transaction: str
    wcrt: Optional[int]  # None when unbounded or when utilization > 1
    deadline: int
    blocking: int
    instances_examined: int
    responses: Tuple[int, ...]
    windows: Tuple[int, ...]
    verdict: str

    @property
    def schedulable(self) -> bool:
        return self.verdict == SCHEDULABLE


@dataclass(frozen=True)
class StageResult:
    root: str
    transaction: str
    jitter: Optional[int]
    wcrt: Optional[int]  # from the transaction's external arrival


@dataclass(frozen=True)
class AnalysisReport:
    model: str
    results: Tuple[WCRTResult, ...]
    utilization: Fraction
    config: AnalysisConfig
    stages: Optional[Tuple[StageResult, ...]] = None

    @property
    def schedulable(self) -> bool:
        return all(r.schedulable for r in self.results)

    @property
    def verdict(self) -> str:
        return SCHEDULABLE if self.schedulable else INFEASIBLE

    def result(self, transaction: str) -> WCRTResult:
        for r in self.results:
            if r.transaction == transaction:
                return r
        raise KeyError(transaction)

    def wcrts(self) -> Dict[str, Optional[int]]:
        return {r.transaction: r.wcrt for r in self.results}


def blocking(all_jobs: Sequence[Job], chain: Chain) -> int:
    """Largest job strictly below the chain's minimum priority, outside the chain."""
    floor = chain.min_priority
    members = {j.root for j in chain.jobs}
    return max((j.cost for j in all_jobs if j.priority < floor and j.root not in members), default=0)


def interference_sources(model: SystemModel, chain: Chain,
                         all_chains: Optional[Sequence[Chain]] = None) -> List[InterferenceSource]:
    if all_chains is None:
        all_chains = chains(model)
    return [
        InterferenceSource(c.transaction, c.total_cost, model.pattern(c.transaction))
        for c in all_chains
        if c.transaction != chain.transaction and c.max_priority >= chain.min_priority
    ]


class _Diverged(Exception):
    pass


def _busy_windows(base_blocking, cost, pattern, sources, eps, limit):
    """Fixed points w(0), w(1), ... until the own release count stops growing."""
    windows = []
    q = 0
    while True:
        fixed = base_blocking + (q + 1) * cost
        w = fixed
        while True:
            if w > limit:
                raise _Diverged
            nw = fixed + sum(release_count(p, w + eps) * c for c, p in sources)
            if nw == w:
                break
            w = nw
        windows.append(w)
        if release_count(pattern, w + eps) <= q + 1:
            return windows
        q += 1


def _overtakers(pattern: ArrivalPattern, q: int, last: int) -> int:
    # later own instances that may be released before instance q
    m = 0
    limit = pattern.arrival(q) + pattern.jitter
    r = q + 1
    while r <= last and pattern.arrival(r) < limit:
        m += 1
        r += 1
    return m


def _responses(pattern, windows, multi_stage):
    last = len(windows) - 1
    out = []
    for q in range(len(windows)):
        if multi_stage and last > 0:
            k = last
        else:
            k = min(last, q + _overtakers(pattern, q, last))
        out.append(pattern.jitter + windows[k] - pattern.arrival(q))
    return out


def end_to_end_wcrt(model: SystemModel, transaction: str,
                    config: Optional[AnalysisConfig] = None) -> WCRTResult:
    """Worst-case response of ``transaction`` from external arrival to chain completion."""
    config = config or AnalysisConfig()
    all_chains = chains(model)
    chain = next((c for c in all_chains if c.transaction == transaction), None)
    if chain is None:
        raise KeyError(f"unknown transaction {transaction!r}")
    all_jobs = [j for c in all_chains for j in c.jobs]
    return _wcrt(model, chain, all_jobs, all_chains, config.window_limit(model))


def _wcrt(model, chain, all_jobs, all_chains, limit) -> WCRTResult:
    txn = model.transaction(chain.transaction)
    pattern = model.pattern(chain.transaction)
    b = blocking(all_jobs, chain)
    sources = [(s.cost, s.pattern) for s in interference_sources(model, chain, all_chains)]
    eps = 1 if any(j.cost == 0 for j in chain.jobs) else 0
    try:
        windows = _busy_windows(b, chain.total_cost, pattern, sources, eps, limit)
    except _Diverged:
        return WCRTResult(txn.id, None, txn.deadline, b, 0, (), (), UNBOUNDED)
    responses = _responses(pattern, windows, len(chain.jobs) > 1)
    r = max(responses)
    verdict = SCHEDULABLE if r <= txn.deadline else INFEASIBLE
    return WCRTResult(txn.id, r, txn.deadline, b, len(windows), tuple(responses), tuple(windows), verdict)


def utilization(model: SystemModel) -> Fraction:
    total = Fraction(0)
    for c in chains(model):
        p = model.pattern(c.transaction)
        total += Fraction(c.total_cost * p.burst, p.outer_period)
    return total


def _stage_pass(model, all_jobs, job_txn, jitter, limit):
    out = {}
    for j in all_jobs:
        base = model.pattern(job_txn[j.root])
        pattern = base.with_jitter(jitter[j.root])
        b = max((k.cost for k in all_jobs if k.priority < j.priority and k.root != j.root), default=0)
        sources = [
            (k.cost, model.pattern(job_txn[k.root]).with_jitter(jitter[k.root]))
            for k in all_jobs if k.root != j.root and k.priority >= j.priority
        ]
        eps = 1 if j.cost == 0 else 0
        try:
            windows = _busy_windows(b, j.cost, pattern, sources, eps, limit)
        except _Diverged:
            out[j.root] = None
            continue
        out[j.root] = max(_responses(pattern, windows, False))
    return out


def stage_wcrts(model: SystemModel, config: Optional[AnalysisConfig] = None) -> Dict[str, StageResult]:
    """Per-job response bounds with release jitter inherited along each chain.

    A job released by a signal inherits as jitter the latest instant, after
    the external arrival, at which that signal can be emitted.  This is a
    diagnostic companion to :func:`end_to_end_wcrt` and is typically more
    pessimistic; it never decides feasibility on its own.
    """
    config = config or AnalysisConfig()
    limit = config.window_limit(model)
    all_chains = chains(model)
    all_jobs = [j for c in all_chains for j in c.jobs]
    job_txn = {j.root: j.transaction for j in all_jobs}
    cost = {j.root: j.cost for j in all_jobs}
    parent = {}
    jitter = {}
    for c in all_chains:
        jitter[c.jobs[0].root] = model.pattern(c.transaction).jitter
        for e in c.emissions:
            parent[e.target] = (e.source, e.offset)
            jitter[e.target] = 0

    while True:
        resp = _stage_pass(model, all_jobs, job_txn, jitter, limit)
        new = dict(jitter)
        diverged = False
        for child, (src, offset) in parent.items():
            if resp[src] is None:
                diverged = True
                break
            new[child] = resp[src] - cost[src] + offset
        if diverged or any(v > limit for v in new.values()):
            return {j.root: StageResult(j.root, j.transaction, None, None) for j in all_jobs}
        if new == jitter:
            return {j.root: StageResult(j.root, j.transaction, jitter[j.root], resp[j.root])
                    for j in all_jobs}
        jitter = new


def stage_wcrt(model: SystemModel, job_root: str,
               config: Optional[AnalysisConfig] = None) -> Optional[int]:
    results = stage_wcrts(model, config)
    if job_root not in results:
        raise KeyError(f"{job_root!r} does not root a job")
    return results[job_root].wcrt


def analyze(model: SystemModel, config: Optional[AnalysisConfig] = None) -> AnalysisReport:
    """Full feasibility report.

    Raises:
        InvalidModelError: if the model does not validate cleanly.
    """
    config = config or AnalysisConfig()
    require_valid(model)
    u = utilization(model)
    all_chains = chains(model)
    if u > 1:
        results = tuple(
            WCRTResult(c.transaction, None, model.transaction(c.transaction).deadline,
                       0, 0, (), (), INFEASIBLE)
            for c in all_chains
        )
    else:
        all_jobs = jobs(model)
        limit = config.window_limit(model)
        results = tuple(_wcrt(model, c, all_jobs, all_chains, limit) for c in all_chains)
    stages = tuple(stage_wcrts(model, config).values()) if config.stages else None
    return AnalysisReport(model.name, results, u, config, stages)


__all__ = [
    "AnalysisConfig", "AnalysisReport", "InterferenceSource", "StageResult", "WCRTResult",
    "SCHEDULABLE", "INFEASIBLE", "UNBOUNDED",
    "analyze", "blocking", "chain_for", "end_to_end_wcrt", "hyperperiod", "interference_sources",
    "release_count", "stage_wcrt", "stage_wcrts", "utilization",
]
