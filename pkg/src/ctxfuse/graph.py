"""Connection graphs and the max-min solution-subgraph value.

A connection graph holds every potential symbol/text association for one
joint labeling: s-vertices for symbols, t-vertices for text strings, edge
values in (0,1] grading how typical each connection is, and optional
self-loops on s-vertices grading how typical isolation is.  Zero-valued
connections are simply absent.

A feasible solution subgraph keeps every t-vertex at degree exactly 1 and
gives every s-vertex either a lone self-loop or at least one edge to another
vertex; its value is the minimum edge value kept.  ``solution_value``
returns the best achievable value over all feasible choices, and
``solution_value_bruteforce`` recomputes it from the definition by
exhaustive enumeration, as an oracle for tests.

The optimizing kernel has a compiled implementation with a pure-Python
fallback; whichever is importable is selected here at import time.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Iterable, Literal

from .errors import MalformedGraph, TooLarge

try:
    from . import _kernel as _backend
except ImportError:  # extension not built; the pure kernel is always present
    from . import _kernel_py as _backend

KERNEL_BACKEND: str = _backend.BACKEND

BRUTEFORCE_EDGE_CAP = 20


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: Literal["s", "t"]

    def __post_init__(self):
        if self.kind not in ("s", "t"):
            raise MalformedGraph(f"vertex kind must be 's' or 't', got {self.kind!r}")


@dataclass(frozen=True)
class ValuedEdge:
    """An undirected edge; endpoints are stored in sorted order."""

    a: str
    b: str
    value: float

    def __post_init__(self):
        if self.b < self.a:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)
        if not 0.0 < self.value <= 1.0:
            raise MalformedGraph(
                f"edge ({self.a!r},{self.b!r}) has value {self.value!r}, "
                "expected a value in (0,1]"
            )

    @property
    def is_self_loop(self) -> bool:
        return self.a == self.b


class ConnectionGraph:
    """Immutable vertex/edge container with the structural invariants.

    Rejects duplicate ids, dangling endpoints, parallel edges, self-loops on
    t-vertices and t-t edges.
    """

    __slots__ = ("vertices", "edges", "_kind", "_vindex", "_arrays")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[ValuedEdge]):
        vs = sorted(vertices, key=lambda v: v.id)
        if len({v.id for v in vs}) != len(vs):
            raise MalformedGraph("duplicate vertex ids")
        kind = {v.id: v.kind for v in vs}
        seen_pairs = set()
        es = sorted(edges, key=lambda e: (e.a, e.b))
        for e in es:
            for end in (e.a, e.b):
                if end not in kind:
                    raise MalformedGraph(f"edge endpoint {end!r} is not a vertex")
            if e.is_self_loop and kind[e.a] != "s":
                raise MalformedGraph(f"self-loop on t-vertex {e.a!r}")
            if kind[e.a] == "t" and kind[e.b] == "t":
                raise MalformedGraph(f"t-t edge ({e.a!r},{e.b!r})")
            if (e.a, e.b) in seen_pairs:
                raise MalformedGraph(f"parallel edges between {e.a!r} and {e.b!r}")
            seen_pairs.add((e.a, e.b))
        self.vertices: tuple[Vertex, ...] = tuple(vs)
        self.edges: tuple[ValuedEdge, ...] = tuple(es)
        self._kind = kind
        self._vindex = {v.id: i for i, v in enumerate(self.vertices)}
        # flat representation for the kernels, built once per immutable graph
        vindex = self._vindex
        self._arrays = (
            len(vs),
            array("b", (1 if v.kind == "t" else 0 for v in self.vertices)),
            array("i", (vindex[e.a] for e in self.edges)),
            array("i", (vindex[e.b] for e in self.edges)),
            array("d", (e.value for e in self.edges)),
        )

    def kind_of(self, vertex_id: str) -> str:
        return self._kind[vertex_id]

    def __repr__(self) -> str:
        return (
            f"ConnectionGraph({len(self.vertices)} vertices, "
            f"{len(self.edges)} edges)"
        )


def _marshal(g: ConnectionGraph):
    """Parallel arrays the kernels consume: (n, kinds, eu, ev, vals)."""
    return g._arrays


def solution_value(g: ConnectionGraph) -> float:
    """Best achievable minimum edge value of a feasible solution subgraph.

    Returns 0.0 when no feasible subgraph exists (for instance when some
    vertex has no incident edge at all) and 1.0 for the vertex-less graph.
    The result is always 0 or the exact value of one of the edges.
    """
    return _backend.solve(*_marshal(g))


def is_feasible(g: ConnectionGraph, chosen: Iterable[ValuedEdge]) -> bool:
    """Do the chosen edges satisfy both degree conditions at every vertex?"""
    t_degree = {v.id: 0 for v in g.vertices}
    nonself = {v.id: 0 for v in g.vertices}
    looped = {v.id: False for v in g.vertices}
    for e in chosen:
        if e.a not in t_degree or e.b not in t_degree:
            raise MalformedGraph(
                f"chosen edge ({e.a!r},{e.b!r}) references unknown vertices"
            )
        if e.is_self_loop:
            looped[e.a] = True
        else:
            nonself[e.a] += 1
            nonself[e.b] += 1
            if g._kind[e.a] == "t":
                t_degree[e.a] += 1
            if g._kind[e.b] == "t":
                t_degree[e.b] += 1
    for v in g.vertices:
        if v.kind == "t":
            if t_degree[v.id] != 1:
                return False
        elif looped[v.id]:
            if nonself[v.id] != 0:
                return False
        elif nonself[v.id] == 0:
            return False
    return True


def solution_value_bruteforce(g: ConnectionGraph) -> float:
    """Definition-level oracle: try every edge subset, keep the best min.

    Exponential in the edge count, hence capped at 20 edges.
    """
    edges = list(g.edges)
    m = len(edges)
    if m > BRUTEFORCE_EDGE_CAP:
        raise TooLarge(f"{m} edges exceed the enumeration cap of {BRUTEFORCE_EDGE_CAP}")
    if not g.vertices:
        return 1.0
    best = 0.0
    for mask in range(1 << m):
        chosen = [edges[i] for i in range(m) if mask >> i & 1]
        if is_feasible(g, chosen):
            value = min(e.value for e in chosen) if chosen else 1.0
            if value > best:
                best = value
    return best


def threshold_prune(g: ConnectionGraph, limit: float) -> ConnectionGraph:
    """Drop every edge whose value is below ``limit``; vertices stay."""
    if not 0.0 <= limit <= 1.0:
        raise ValueError(f"limit must be in [0,1], got {limit!r}")
    return ConnectionGraph(g.vertices, [e for e in g.edges if e.value >= limit])
