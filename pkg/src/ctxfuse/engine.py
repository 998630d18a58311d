"""Joint labeling of uncertain entities against a typicality model.

Each entity (a recognized symbol or text string) carries candidate labels
with recognizer probabilities.  A typicality model grades pairwise label
combinations and symbol isolation.  For every joint labeling we instantiate
its connection graph, take the max-min solution value as the labeling's
plausibility, and fuse with the independence prior over the whole labeling
space.  Decomposition into typicality-independent components keeps the
enumeration tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping

from .errors import InvariantError, TooManyLabelings, ZeroEvidence
from .evidence import NORM_TOL
from .graph import ConnectionGraph, ValuedEdge, Vertex, solution_value

DEFAULT_LABELING_CAP = 10**6


@dataclass(frozen=True)
class Entity:
    """A recognized drawing element with its candidate labels."""

    id: str
    kind: str  # "symbol" | "text"
    candidates: tuple[tuple[str, float], ...]
    position: tuple[float, float] | None = None

    def __init__(self, id, kind, candidates, position=None):
        candidates = tuple((str(l), float(p)) for l, p in candidates)
        if kind not in ("symbol", "text"):
            raise InvariantError(f"entity {id!r}: kind must be symbol or text")
        if not candidates:
            raise InvariantError(f"entity {id!r}: no candidate labels")
        labels = [l for l, _ in candidates]
        if len(set(labels)) != len(labels):
            raise InvariantError(f"entity {id!r}: duplicate candidate labels")
        if any(p <= 0 for _, p in candidates):
            raise InvariantError(f"entity {id!r}: candidate probabilities must be > 0")
        total = math.fsum(p for _, p in candidates)
        if abs(total - 1.0) > NORM_TOL:
            raise InvariantError(
                f"entity {id!r}: candidate probabilities sum to {total!r}, not 1"
            )
        if position is not None:
            x, y = position
            position = (float(x), float(y))
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "position", position)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.candidates)

    def probability_of(self, label: str) -> float:
        for l, p in self.candidates:
            if l == label:
                return p
        raise InvariantError(f"entity {self.id!r} has no candidate {label!r}")


def _pair_key(a_id, a_label, b_id, b_label):
    if a_id == b_id:
        raise InvariantError(f"pair entry references entity {a_id!r} twice")
    if b_id < a_id:
        return (b_id, b_label, a_id, a_label)
    return (a_id, a_label, b_id, b_label)


class TypicalityModel:
    """Pairwise and isolation typicality values in [0,1].

    Missing pair entries read as 0 (no potential connection); missing
    isolation entries read as the configured default.  Pair keys are
    direction-insensitive.
    """

    __slots__ = ("pairs", "isolation", "isolation_default")

    def __init__(
        self,
        pairs: Mapping[tuple[str, str, str, str], float] | None = None,
        isolation: Mapping[tuple[str, str], float] | None = None,
        isolation_default: float = 0.0,
    ):
        canonical = {}
        for (a, al, b, bl), v in (pairs or {}).items():
            v = float(v)
            if not 0.0 <= v <= 1.0:
                raise InvariantError(f"pair typicality {v!r} outside [0,1]")
            canonical[_pair_key(a, al, b, bl)] = v
        iso = {}
        for (i, l), v in (isolation or {}).items():
            v = float(v)
            if not 0.0 <= v <= 1.0:
                raise InvariantError(f"isolation typicality {v!r} outside [0,1]")
            iso[(i, l)] = v
        if not 0.0 <= isolation_default <= 1.0:
            raise InvariantError("isolation default outside [0,1]")
        self.pairs = canonical
        self.isolation = iso
        self.isolation_default = float(isolation_default)

    def pair_value(self, a_id, a_label, b_id, b_label) -> float:
        return self.pairs.get(_pair_key(a_id, a_label, b_id, b_label), 0.0)

    def isolation_value(self, entity_id, label) -> float:
        return self.isolation.get((entity_id, label), self.isolation_default)

    def scaled(self, c: float) -> "TypicalityModel":
        """Every value multiplied by c; used to probe scale invariance."""
        return TypicalityModel(
            {k: v * c for k, v in self.pairs.items()},
            {k: v * c for k, v in self.isolation.items()},
            self.isolation_default * c,
        )


def validate_typicality(entities: Iterable[Entity], tm: TypicalityModel) -> None:
    """Check that every table key references a real entity and label."""
    by_id = {e.id: e for e in entities}
    for a, al, b, bl in tm.pairs:
        for eid, label in ((a, al), (b, bl)):
            if eid not in by_id:
                raise InvariantError(f"pair entry references unknown entity {eid!r}")
            if label not in by_id[eid].labels:
                raise InvariantError(
                    f"pair entry references unknown label {label!r} "
                    f"of entity {eid!r}"
                )
        if by_id[a].kind == "text" and by_id[b].kind == "text":
            raise InvariantError(f"pair entry connects two text entities {a!r}, {b!r}")
    for eid, label in tm.isolation:
        if eid not in by_id:
            raise InvariantError(f"isolation entry references unknown entity {eid!r}")
        if by_id[eid].kind != "symbol":
            raise InvariantError(f"isolation entry on text entity {eid!r}")
        if label not in by_id[eid].labels:
            raise InvariantError(
                f"isolation entry references unknown label {label!r} "
                f"of entity {eid!r}"
            )


@dataclass(frozen=True)
class Labeling:
    """One chosen label per entity, keyed by entity id."""

    assignment: tuple[tuple[str, str], ...]

    def __init__(self, assignment: Mapping[str, str]):
        object.__setattr__(self, "assignment", tuple(sorted(assignment.items())))

    def label_of(self, entity_id: str) -> str:
        for eid, label in self.assignment:
            if eid == entity_id:
                return label
        raise KeyError(entity_id)

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignment)


@dataclass(frozen=True)
class PosteriorRow:
    labeling: Labeling
    prior: float
    plausibility: float
    posterior: float


@dataclass(frozen=True)
class PosteriorTable:
    rows: tuple[PosteriorRow, ...]

    def best(self) -> PosteriorRow:
        return max(self.rows, key=lambda r: r.posterior)


def _sorted_entities(entities: Iterable[Entity]) -> list[Entity]:
    es = sorted(entities, key=lambda e: e.id)
    if len({e.id for e in es}) != len(es):
        raise InvariantError("duplicate entity ids")
    return es


def labeling_count(entities: Iterable[Entity]) -> int:
    count = 1
    for e in entities:
        count *= len(e.candidates)
    return count


def enumerate_labelings(
    entities: Iterable[Entity], cap: int = DEFAULT_LABELING_CAP
) -> Iterator[Labeling]:
    """All joint labelings, ordered by entity id then candidate order."""
    es = _sorted_entities(entities)
    count = labeling_count(es)
    if count > cap:
        raise TooManyLabelings(
            f"{count} labelings exceed the cap of {cap}; decompose the "
            "problem or prune the typicality tables"
        )
    for combo in product(*(e.labels for e in es)):
        yield Labeling(dict(zip((e.id for e in es), combo)))


def graph_for(
    labeling: Labeling, entities: Iterable[Entity], tm: TypicalityModel
) -> ConnectionGraph:
    """Instantiate the connection graph of one joint labeling."""
    es = _sorted_entities(entities)
    chosen = labeling.as_dict()
    if set(chosen) != {e.id for e in es}:
        raise InvariantError("labeling does not cover the entity set exactly")
    vertices = [Vertex(e.id, "s" if e.kind == "symbol" else "t") for e in es]
    edges = []
    for a, b in combinations(es, 2):
        v = tm.pair_value(a.id, chosen[a.id], b.id, chosen[b.id])
        if v > 0.0:
            edges.append(ValuedEdge(a.id, b.id, v))
    for e in es:
        if e.kind == "symbol":
            v = tm.isolation_value(e.id, chosen[e.id])
            if v > 0.0:
                edges.append(ValuedEdge(e.id, e.id, v))
    return ConnectionGraph(vertices, edges)


def labeling_plausibility(
    labeling: Labeling, entities: Iterable[Entity], tm: TypicalityModel
) -> float:
    return solution_value(graph_for(labeling, entities, tm))


def labeling_prior(labeling: Labeling, entities: Iterable[Entity]) -> float:
    """Independence prior: the product of the chosen labels' probabilities."""
    prior = 1.0
    for e in entities:
        prior *= e.probability_of(labeling.label_of(e.id))
    return prior


def posterior(
    entities: Iterable[Entity],
    tm: TypicalityModel,
    cap: int = DEFAULT_LABELING_CAP,
) -> PosteriorTable:
    """Fuse priors with plausibilities over the whole labeling space."""
    es = _sorted_entities(entities)
    triples = []
    for labeling in enumerate_labelings(es, cap):
        prior = labeling_prior(labeling, es)
        plaus = labeling_plausibility(labeling, es, tm)
        triples.append((labeling, prior, plaus))
    denom = math.fsum(prior * plaus for _, prior, plaus in triples)
    if denom <= 0.0:
        raise ZeroEvidence("every labeling has zero plausibility")
    rows = tuple(
        PosteriorRow(labeling, prior, plaus, prior * plaus / denom)
        for labeling, prior, plaus in triples
    )
    return PosteriorTable(rows)


def conflict_mass(table: PosteriorTable) -> float:
    """Prior mass not supported by plausibility: 1 - sum(prior * plaus)."""
    return 1.0 - math.fsum(r.prior * r.plausibility for r in table.rows)


def decompose(
    entities: Iterable[Entity], tm: TypicalityModel
) -> list[list[Entity]]:
    """Split entities into components with no cross potential connection.

    Two entities are potentially connected when any label combination gives
    them a positive pair typicality; components are returned sorted by their
    smallest entity id, entities sorted by id within each.
    """
    es = _sorted_entities(entities)
    parent = {e.id: e.id for e in es}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ids = set(parent)
    for (a, _, b, _), v in tm.pairs.items():
        if v > 0.0 and a in ids and b in ids:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    groups: dict[str, list[Entity]] = {}
    for e in es:
        groups.setdefault(find(e.id), []).append(e)
    return sorted(groups.values(), key=lambda group: group[0].id)


def posterior_decomposed(
    entities: Iterable[Entity],
    tm: TypicalityModel,
    cap: int = DEFAULT_LABELING_CAP,
) -> list[PosteriorTable]:
    """One posterior table per independent component.

    The joint posterior of a full labeling is taken as the product of its
    component posteriors.  This is an approximation: a full labeling's
    plausibility is the minimum over component plausibilities, which does
    not factor multiplicatively, so the product only reproduces the
    undecomposed posterior exactly in special cases (for instance when each
    component admits a single labeling with positive plausibility).
    """
    return [posterior(component, tm, cap) for component in decompose(entities, tm)]
