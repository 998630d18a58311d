"""Pure-Python bottleneck kernel; fallback when the extension is not built.

Computes the best achievable minimum edge value of a feasible solution
subgraph: text vertices end up with degree exactly 1, symbol vertices with
either a lone self-loop or at least one edge to another vertex.

Edges are inserted in descending value order, and the answer is the first
(largest) value at which the inserted subgraph becomes feasible, meaning

  (a) every vertex has an incident inserted edge, and
  (b) the symbol vertices whose only inserted cover is a text vertex can be
      matched to pairwise distinct text vertices (each text vertex accepts
      exactly one edge, so shared candidates are a real constraint).

Both conditions are monotone in the insertion, so coverage is tracked by a
counter and (b) by an incrementally grown Kuhn matching: a symbol enters the
match-needing set when its first symbol-text edge arrives, leaves it (and
releases its text vertex) when a self-loop or symbol-symbol edge makes it
self-coverable, and unmatched members are re-tried after each batch of
equal-valued insertions.  One pass over the sorted edges decides the value.
"""

from __future__ import annotations

BACKEND = "python"


def solve(n, kinds, eu, ev, vals) -> float:
    """Optimal solution-subgraph value for an edge list.

    ``kinds[i]`` is nonzero for t-vertices.  ``eu``/``ev``/``vals`` are
    parallel arrays of endpoint indices and edge values; self-loops have
    ``eu[i] == ev[i]``.  Returns 0.0 when no feasible subgraph exists and
    1.0 for the vertex-less graph (empty-minimum convention).
    """
    if n == 0:
        return 1.0
    m = len(vals)
    if m == 0:
        return 0.0
    order = sorted(range(m), key=vals.__getitem__, reverse=True)

    covered = [False] * n
    uncovered = n
    self_cov = [False] * n
    needs_match = [False] * n
    match_s = [-1] * n
    match_t = [-1] * n
    adj: list[list[int]] = [[] for _ in range(n)]
    unmatched: list[int] = []
    visited = [0] * n
    stamp = 0

    pos = 0
    while pos < m:
        value = vals[order[pos]]
        while pos < m and vals[order[pos]] == value:
            i = order[pos]
            pos += 1
            u = eu[i]
            v = ev[i]
            if not covered[u]:
                covered[u] = True
                uncovered -= 1
            if not covered[v]:
                covered[v] = True
                uncovered -= 1
            if u == v or kinds[u] == kinds[v]:
                for s in (u,) if u == v else (u, v):
                    if not self_cov[s]:
                        self_cov[s] = True
                        if needs_match[s]:
                            needs_match[s] = False
                            t = match_s[s]
                            if t >= 0:
                                match_s[s] = -1
                                match_t[t] = -1
            else:
                s, t = (v, u) if kinds[u] else (u, v)
                adj[s].append(t)
                if not self_cov[s] and not needs_match[s]:
                    needs_match[s] = True
                    unmatched.append(s)
        if uncovered:
            continue
        # every batch changes the graph (or freed a text vertex), so every
        # still-unmatched member gets another augmenting attempt
        pending = unmatched
        unmatched = []
        for s in pending:
            if not needs_match[s] or match_s[s] >= 0:
                continue
            stamp += 1
            if not _augment(s, adj, match_s, match_t, visited, stamp):
                unmatched.append(s)
        if not unmatched:
            return value
    return 0.0


def _augment(root, adj, match_s, match_t, visited, stamp) -> bool:
    # iterative Kuhn augmenting search; stack depth is bounded by the
    # alternating-path length, so no recursion limit concerns
    stack = [root]
    iters = [iter(adj[root])]
    path = []
    while stack:
        advanced = False
        for t in iters[-1]:
            if visited[t] == stamp:
                continue
            visited[t] = stamp
            holder = match_t[t]
            if holder < 0:
                path.append(t)
                for u, tt in zip(stack, path):
                    match_t[tt] = u
                    match_s[u] = tt
                return True
            path.append(t)
            stack.append(holder)
            iters.append(iter(adj[holder]))
            advanced = True
            break
        if not advanced:
            stack.pop()
            iters.pop()
            if path:
                path.pop()
    return False
