# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dispatcher kernel; see ``_dispatch_py.dispatch`` for the contract."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline bint _before(i64[:, ::1] h, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    # row layout: (-priority, release, job, instance); lexicographic order
    cdef int c
    for c in range(4):
        if h[a, c] != h[b, c]:
            return h[a, c] < h[b, c]
    return False


cdef inline void _swap(i64[:, ::1] h, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef int c
    cdef i64 tmp
    for c in range(4):
        tmp = h[a, c]
        h[a, c] = h[b, c]
        h[b, c] = tmp


cdef inline Py_ssize_t _push(i64[:, ::1] h, Py_ssize_t n, i64 negprio, i64 rel,
                             i64 job, i64 inst) noexcept nogil:
    cdef Py_ssize_t i = n, parent
    h[i, 0] = negprio
    h[i, 1] = rel
    h[i, 2] = job
    h[i, 3] = inst
    while i > 0:
        parent = (i - 1) >> 1
        if _before(h, i, parent):
            _swap(h, i, parent)
            i = parent
        else:
            break
    return n + 1


cdef inline Py_ssize_t _pop(i64[:, ::1] h, Py_ssize_t n) noexcept nogil:
    # moves the minimum to row n-1 and restores the heap on rows [0, n-1)
    cdef Py_ssize_t i = 0, l, r, best
    n -= 1
    _swap(h, 0, n)
    while True:
        l = 2 * i + 1
        r = l + 1
        best = i
        if l < n and _before(h, l, best):
            best = l
        if r < n and _before(h, r, best):
            best = r
        if best == i:
            break
        _swap(h, i, best)
        i = best
    return n


def dispatch(job_cost, job_prio, emit_ptr, emit_off, emit_tgt,
             rel_time, rel_job, rel_inst, Py_ssize_t n_inst):
    cdef i64[::1] cost = np.ascontiguousarray(job_cost, dtype=np.int64)
    cdef i64[::1] prio = np.ascontiguousarray(job_prio, dtype=np.int64)
    cdef i64[::1] ptr = np.ascontiguousarray(emit_ptr, dtype=np.int64)
    cdef i64[::1] off = np.ascontiguousarray(emit_off, dtype=np.int64)
    cdef i64[::1] tgt = np.ascontiguousarray(emit_tgt, dtype=np.int64)
    cdef i64[::1] rt = np.ascontiguousarray(rel_time, dtype=np.int64)
    cdef i64[::1] rj = np.ascontiguousarray(rel_job, dtype=np.int64)
    cdef i64[::1] ri = np.ascontiguousarray(rel_inst, dtype=np.int64)
    cdef Py_ssize_t n_rel = rt.shape[0]

    # every instance's chain is finite, so executions <= releases + emissions fired
    cdef Py_ssize_t cap = n_rel * (off.shape[0] + 1) + 1
    cdef cnp.ndarray[i64, ndim=2] heap_arr = np.empty((cap, 4), dtype=np.int64)
    cdef i64[:, ::1] h = heap_arr
    cdef cnp.ndarray[i64, ndim=1] a_job = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_inst = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_rel = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_start = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_done = np.full(n_inst, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_pending = np.ones(n_inst, dtype=np.int64)
    cdef i64[::1] ex_job = a_job, ex_inst = a_inst, ex_rel = a_rel, ex_start = a_start
    cdef i64[::1] done = a_done, pending = a_pending

    cdef Py_ssize_t hn = 0, k = 0, nex = 0, e, lo, hi
    cdef i64 now = 0, job, inst, rel, child

    with nogil:
        while True:
            if hn == 0:
                if k >= n_rel:
                    break
                if rt[k] > now:
                    now = rt[k]
            while k < n_rel and rt[k] <= now:
                hn = _push(h, hn, -prio[rj[k]], rt[k], rj[k], ri[k])
                k += 1
            hn = _pop(h, hn)
            rel = h[hn, 1]
            job = h[hn, 2]
            inst = h[hn, 3]
            ex_job[nex] = job
            ex_inst[nex] = inst
            ex_rel[nex] = rel
            ex_start[nex] = now
            nex += 1
            lo = ptr[job]
            hi = ptr[job + 1]
            for e in range(lo, hi):
                child = tgt[e]
                hn = _push(h, hn, -prio[child], now + off[e], child, inst)
            now += cost[job]
            pending[inst] += hi - lo - 1
            if pending[inst] == 0:
                done[inst] = now
    return a_job[:nex].copy(), a_inst[:nex].copy(), a_rel[:nex].copy(), a_start[:nex].copy(), a_done
