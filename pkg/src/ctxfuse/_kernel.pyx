# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bottleneck kernel.

Same contract and algorithm as ``_kernel_py``: insert edges in descending
value order and return the first value at which the inserted subgraph is
feasible, where feasibility is full vertex coverage plus an incrementally
maintained matching of the text-dependent symbol vertices into pairwise
distinct text vertices.
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memset

BACKEND = "compiled"


cdef struct EdgeVal:
    double v
    int idx


cdef void _sort_desc(EdgeVal* a, EdgeVal* tmp, int m) noexcept nogil:
    # bottom-up mergesort by descending value; comparisons inline, which
    # beats qsort's indirect comparator calls on large inputs
    cdef int width = 1
    cdef int lo, mid, hi, i, j, k
    cdef EdgeVal* src = a
    cdef EdgeVal* dst = tmp
    cdef EdgeVal* flip
    while width < m:
        lo = 0
        while lo < m:
            mid = lo + width
            if mid > m:
                mid = m
            hi = lo + 2 * width
            if hi > m:
                hi = m
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if src[i].v >= src[j].v:
                    dst[k] = src[i]
                    i += 1
                else:
                    dst[k] = src[j]
                    j += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
            lo = hi
        flip = src
        src = dst
        dst = flip
        width *= 2
    if src != a:
        for i in range(m):
            a[i] = src[i]


cdef struct Work:
    int n
    int m
    signed char* kinds
    signed char* covered
    signed char* self_cov
    signed char* needs_match
    int* match_s
    int* match_t
    int* adj_head      # per-vertex head into the adj_next/adj_to pool
    int* adj_next      # edge-indexed linked list of inserted s->t arcs
    int* adj_to
    int* visited
    int* unmatched
    int stamp


cdef bint _augment(Work* w, int root) noexcept:
    cdef int e = w.adj_head[root]
    cdef int t, holder
    while e >= 0:
        t = w.adj_to[e]
        if w.visited[t] != w.stamp:
            w.visited[t] = w.stamp
            holder = w.match_t[t]
            if holder < 0 or _augment(w, holder):
                w.match_t[t] = root
                w.match_s[root] = t
                return True
        e = w.adj_next[e]
    return False


cdef inline void _make_self_coverable(Work* w, int s) noexcept:
    cdef int t
    if not w.self_cov[s]:
        w.self_cov[s] = 1
        if w.needs_match[s]:
            w.needs_match[s] = 0
            t = w.match_s[s]
            if t >= 0:
                w.match_s[s] = -1
                w.match_t[t] = -1


def solve(int n, const signed char[:] kinds, const int[:] eu,
          const int[:] ev, const double[:] vals) -> float:
    """Optimal solution-subgraph value; see the module docstring.

    The array arguments must expose buffers of signed char / int / int /
    double, as produced by the graph's flat representation.
    """
    cdef int m = <int> vals.shape[0]
    cdef int i, u, v, s, t, pos, k, kept, uncovered
    cdef double value, result
    cdef bint found
    cdef Work w
    cdef EdgeVal* order
    cdef EdgeVal* scratch

    if n == 0:
        return 1.0
    if m == 0:
        return 0.0

    w.n = n
    w.m = m
    w.stamp = 0
    w.kinds = <signed char*> malloc(n)
    w.covered = <signed char*> malloc(n)
    w.self_cov = <signed char*> malloc(n)
    w.needs_match = <signed char*> malloc(n)
    w.match_s = <int*> malloc(n * sizeof(int))
    w.match_t = <int*> malloc(n * sizeof(int))
    w.adj_head = <int*> malloc(n * sizeof(int))
    w.adj_next = <int*> malloc(m * sizeof(int))
    w.adj_to = <int*> malloc(m * sizeof(int))
    w.visited = <int*> malloc(n * sizeof(int))
    w.unmatched = <int*> malloc(n * sizeof(int))
    order = <EdgeVal*> malloc(m * sizeof(EdgeVal))
    scratch = <EdgeVal*> malloc(m * sizeof(EdgeVal))
    if (w.kinds == NULL or w.covered == NULL or w.self_cov == NULL
            or w.needs_match == NULL or w.match_s == NULL or w.match_t == NULL
            or w.adj_head == NULL or w.adj_next == NULL or w.adj_to == NULL
            or w.visited == NULL or w.unmatched == NULL or order == NULL
            or scratch == NULL):
        _release(&w, order, scratch)
        raise MemoryError()

    try:
        memset(w.covered, 0, n)
        memset(w.self_cov, 0, n)
        memset(w.needs_match, 0, n)
        for i in range(n):
            w.kinds[i] = kinds[i]
            w.match_s[i] = -1
            w.match_t[i] = -1
            w.adj_head[i] = -1
            w.visited[i] = 0
        for i in range(m):
            order[i].v = vals[i]
            order[i].idx = i
        _sort_desc(order, scratch, m)

        uncovered = n
        k = 0  # pending unmatched entries
        pos = 0
        found = False
        result = 0.0
        while pos < m and not found:
            value = order[pos].v
            while pos < m and order[pos].v == value:
                i = order[pos].idx
                pos += 1
                u = eu[i]
                v = ev[i]
                if not w.covered[u]:
                    w.covered[u] = 1
                    uncovered -= 1
                if not w.covered[v]:
                    w.covered[v] = 1
                    uncovered -= 1
                if u == v:
                    _make_self_coverable(&w, u)
                elif w.kinds[u] == w.kinds[v]:
                    _make_self_coverable(&w, u)
                    _make_self_coverable(&w, v)
                else:
                    if w.kinds[u]:
                        s = v
                        t = u
                    else:
                        s = u
                        t = v
                    w.adj_to[i] = t
                    w.adj_next[i] = w.adj_head[s]
                    w.adj_head[s] = i
                    if not w.self_cov[s] and not w.needs_match[s]:
                        w.needs_match[s] = 1
                        w.unmatched[k] = s
                        k += 1
            if uncovered:
                continue
            # re-try every pending vertex; this batch changed the graph
            kept = 0
            for i in range(k):
                s = w.unmatched[i]
                if not w.needs_match[s] or w.match_s[s] >= 0:
                    continue
                w.stamp += 1
                if not _augment(&w, s):
                    w.unmatched[kept] = s
                    kept += 1
            k = kept
            if k == 0:
                result = value
                found = True
        return result if found else 0.0
    finally:
        _release(&w, order, scratch)


cdef void _release(Work* w, EdgeVal* order, EdgeVal* scratch) noexcept:
    free(w.kinds)
    free(w.covered)
    free(w.self_cov)
    free(w.needs_match)
    free(w.match_s)
    free(w.match_t)
    free(w.adj_head)
    free(w.adj_next)
    free(w.adj_to)
    free(w.visited)
    free(w.unmatched)
    free(order)
    free(scratch)
