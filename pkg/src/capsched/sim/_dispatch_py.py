"""Pure-Python dispatcher kernel; same contract as the compiled ``_dispatch``."""

import heapq

import numpy as np


def dispatch(job_cost, job_prio, emit_ptr, emit_off, emit_tgt,
             rel_time, rel_job, rel_inst, n_inst):
    """Run the non-preemptive fixed-priority dispatcher to quiescence.

    Args:
        job_cost, job_prio: per-job cost and priority (larger runs first).
        emit_ptr, emit_off, emit_tgt: CSR table of signal emissions per job
            (offset from job start, released job index).
        rel_time, rel_job, rel_inst: external releases sorted by time.
        n_inst: number of chain instances (ids ``0..n_inst-1``); smaller ids
            win ties between equal priority and release time.

    Returns:
        ``(ex_job, ex_inst, ex_rel, ex_start, inst_done)`` numpy int64 arrays.
    """
    cost = [int(c) for c in job_cost]
    prio = [int(p) for p in job_prio]
    ptr = [int(p) for p in emit_ptr]
    off = [int(o) for o in emit_off]
    tgt = [int(t) for t in emit_tgt]
    rt = [int(t) for t in rel_time]
    rj = [int(j) for j in rel_job]
    ri = [int(i) for i in rel_inst]

    pending = [1] * n_inst
    done = [-1] * n_inst
    ex_job, ex_inst, ex_rel, ex_start = [], [], [], []
    heap = []
    push, pop = heapq.heappush, heapq.heappop
    n_rel = len(rt)
    k = 0
    now = 0
    while True:
        if not heap:
            if k >= n_rel:
                break
            if rt[k] > now:
                now = rt[k]
        while k < n_rel and rt[k] <= now:
            push(heap, (-prio[rj[k]], rt[k], rj[k], ri[k]))
            k += 1
        _, rel, job, inst = pop(heap)
        ex_job.append(job)
        ex_inst.append(inst)
        ex_rel.append(rel)
        ex_start.append(now)
        lo, hi = ptr[job], ptr[job + 1]
        for e in range(lo, hi):
            child = tgt[e]
            push(heap, (-prio[child], now + off[e], child, inst))
        now += cost[job]
        pending[inst] += hi - lo - 1
        if pending[inst] == 0:
            done[inst] = now
    as64 = lambda xs: np.asarray(xs, dtype=np.int64)
    return as64(ex_job), as64(ex_inst), as64(ex_rel), as64(ex_start), as64(done)
