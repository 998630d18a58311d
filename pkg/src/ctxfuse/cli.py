"""Problem/graph JSON ingestion, the rule evaluator, and the CLI.

Problem documents carry entities plus either explicit typicality tables,
contextual rules that generate pair typicalities, or both (explicit entries
win on collisions).  Graph fixtures describe a bare connection graph for the
``value`` subcommand.  All output is deterministic: identical inputs and
flags produce byte-identical stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import re
import sys
from dataclasses import dataclass
from fnmatch import fnmatchcase

import jsonschema

from .engine import (
    Entity,
    TypicalityModel,
    _pair_key,
    conflict_mass,
    decompose,
    labeling_count,
    posterior,
    posterior_decomposed,
    validate_typicality,
)
from .errors import (
    BadRegex,
    DegenerateError,
    InputError,
    InvariantError,
    SchemaError,
)
from .graph import (
    ConnectionGraph,
    ValuedEdge,
    Vertex,
    solution_value,
    solution_value_bruteforce,
    threshold_prune,
)

_TEXT_PATTERN_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"required": ["suffix"], "additionalProperties": False,
         "properties": {"suffix": {"type": "string"}}},
        {"required": ["prefix"], "additionalProperties": False,
         "properties": {"prefix": {"type": "string"}}},
        {"required": ["regex"], "additionalProperties": False,
         "properties": {"regex": {"type": "string"}}},
    ],
}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["entities"],
    "additionalProperties": False,
    "properties": {
        "entities": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind", "candidates"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "kind": {"enum": ["symbol", "text"]},
                    "candidates": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["label", "prob"],
                            "additionalProperties": False,
                            "properties": {
                                "label": {"type": "string"},
                                "prob": {"type": "number"},
                            },
                        },
                    },
                    "position": {
                        "type": "array",
                        "minItems": 2,
                        "maxItems": 2,
                        "items": {"type": "number"},
                    },
                },
            },
        },
        "typicality": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pairs": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["a", "a_label", "b", "b_label", "value"],
                        "additionalProperties": False,
                        "properties": {
                            "a": {"type": "string"},
                            "a_label": {"type": "string"},
                            "b": {"type": "string"},
                            "b_label": {"type": "string"},
                            "value": {"type": "number"},
                        },
                    },
                },
                "isolation": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["id", "label", "value"],
                        "additionalProperties": False,
                        "properties": {
                            "id": {"type": "string"},
                            "label": {"type": "string"},
                            "value": {"type": "number"},
                        },
                    },
                },
            },
        },
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["symbol_class", "text_pattern", "possibility"],
                "additionalProperties": False,
                "properties": {
                    "symbol_class": {"type": "string"},
                    "text_pattern": _TEXT_PATTERN_SCHEMA,
                    "possibility": {"type": "number"},
                    "max_distance": {"type": "number"},
                    "falloff": {"enum": ["none", "linear"]},
                },
            },
        },
        "defaults": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"isolation_default": {"type": "number"}},
        },
    },
}

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "additionalProperties": False,
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "kind": {"enum": ["s", "t"]},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "value"],
                "additionalProperties": False,
                "properties": {
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "value": {"type": "number"},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Rule:
    """A contextual association rule between symbol labels and text labels.

    ``symbol_class`` is matched as a glob against symbol labels (a plain
    label is an exact match); the text side matches by suffix, prefix or
    ``re.search``.  The geometric factor attenuates the rule's possibility
    by entity distance when positions are available.
    """

    symbol_class: str
    pattern_kind: str  # "suffix" | "prefix" | "regex"
    pattern: str
    possibility: float
    max_distance: float | None = None
    falloff: str = "none"

    def __post_init__(self):
        if not 0.0 < self.possibility <= 1.0:
            raise InvariantError(
                f"rule possibility {self.possibility!r} outside (0,1]"
            )
        if self.pattern_kind not in ("suffix", "prefix", "regex"):
            raise InvariantError(f"unknown text pattern kind {self.pattern_kind!r}")
        if self.max_distance is not None and not self.max_distance > 0:
            raise InvariantError("rule max_distance must be > 0")
        if self.falloff not in ("none", "linear"):
            raise InvariantError(f"unknown falloff {self.falloff!r}")
        if self.falloff == "linear" and self.max_distance is None:
            raise InvariantError("falloff=linear requires max_distance")

    def matches_symbol(self, label: str) -> bool:
        return fnmatchcase(label, self.symbol_class)

    def matches_text(self, label: str) -> bool:
        if self.pattern_kind == "suffix":
            return label.endswith(self.pattern)
        if self.pattern_kind == "prefix":
            return label.startswith(self.pattern)
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise BadRegex(f"rule regex {self.pattern!r}: {exc}") from None
        return compiled.search(label) is not None


@dataclass(frozen=True)
class ProblemDocument:
    """Entities plus the typicality evidence sources."""

    entities: tuple[Entity, ...]
    explicit_pairs: tuple[tuple[tuple[str, str, str, str], float], ...]
    explicit_isolation: tuple[tuple[tuple[str, str], float], ...]
    rules: tuple[Rule, ...]
    isolation_default: float


def parse_problem(data: bytes | str) -> ProblemDocument:
    """Parse and fully validate a problem JSON document."""
    obj = _load_json(data, PROBLEM_SCHEMA)
    entities = tuple(
        Entity(
            rec["id"],
            rec["kind"],
            [(c["label"], c["prob"]) for c in rec["candidates"]],
            tuple(rec["position"]) if "position" in rec else None,
        )
        for rec in obj["entities"]
    )
    if len({e.id for e in entities}) != len(entities):
        raise InvariantError("duplicate entity ids")

    typ = obj.get("typicality", {})
    pairs = {}
    for rec in typ.get("pairs", []):
        key = (rec["a"], rec["a_label"], rec["b"], rec["b_label"])
        pairs[key] = rec["value"]
    isolation = {
        (rec["id"], rec["label"]): rec["value"]
        for rec in typ.get("isolation", [])
    }
    rules = tuple(_parse_rule(rec) for rec in obj.get("rules", []))
    if "typicality" not in obj and not rules:
        raise InvariantError("document provides neither typicality nor rules")
    isolation_default = obj.get("defaults", {}).get("isolation_default", 0.0)

    # reject dangling references and t-t pairs up front
    explicit = TypicalityModel(pairs, isolation, isolation_default)
    validate_typicality(entities, explicit)
    return ProblemDocument(
        entities=entities,
        explicit_pairs=tuple(sorted(explicit.pairs.items())),
        explicit_isolation=tuple(sorted(explicit.isolation.items())),
        rules=rules,
        isolation_default=float(isolation_default),
    )


def _parse_rule(rec) -> Rule:
    (kind, pattern), = rec["text_pattern"].items()
    return Rule(
        symbol_class=rec["symbol_class"],
        pattern_kind=kind,
        pattern=pattern,
        possibility=rec["possibility"],
        max_distance=rec.get("max_distance"),
        falloff=rec.get("falloff", "none"),
    )


def _load_json(data: bytes | str, schema) -> dict:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{exc.json_path}: {exc.message}") from None
    return obj


def serialize_problem(doc: ProblemDocument) -> str:
    """Inverse of parse_problem, up to document equivalence."""
    obj: dict = {"entities": []}
    for e in doc.entities:
        rec = {
            "id": e.id,
            "kind": e.kind,
            "candidates": [{"label": l, "prob": p} for l, p in e.candidates],
        }
        if e.position is not None:
            rec["position"] = list(e.position)
        obj["entities"].append(rec)
    if doc.explicit_pairs or doc.explicit_isolation:
        obj["typicality"] = {
            "pairs": [
                {"a": a, "a_label": al, "b": b, "b_label": bl, "value": v}
                for (a, al, b, bl), v in doc.explicit_pairs
            ],
            "isolation": [
                {"id": i, "label": l, "value": v}
                for (i, l), v in doc.explicit_isolation
            ],
        }
    if doc.rules:
        obj["rules"] = []
        for r in doc.rules:
            rec = {
                "symbol_class": r.symbol_class,
                "text_pattern": {r.pattern_kind: r.pattern},
                "possibility": r.possibility,
            }
            if r.max_distance is not None:
                rec["max_distance"] = r.max_distance
            if r.falloff != "none":
                rec["falloff"] = r.falloff
            obj["rules"].append(rec)
    obj["defaults"] = {"isolation_default": doc.isolation_default}
    return json.dumps(obj, indent=2, sort_keys=True)


def _geometric_factor(rule: Rule, pos_a, pos_b) -> float:
    if pos_a is None or pos_b is None or rule.max_distance is None:
        return 1.0
    d = math.dist(pos_a, pos_b)
    if d > rule.max_distance:
        return 0.0
    if rule.falloff == "linear":
        return max(0.0, 1.0 - d / rule.max_distance)
    return 1.0


def materialize_typicality(doc: ProblemDocument) -> TypicalityModel:
    """Evaluate rules into pair typicalities, then apply explicit overrides.

    A rule contributes possibility x geometric factor to every matching
    (symbol label, text label) combination; contributions aggregate by max,
    so rule order never matters.  Isolation values come only from the
    explicit table and the configured default.
    """
    symbols = [e for e in doc.entities if e.kind == "symbol"]
    texts = [e for e in doc.entities if e.kind == "text"]
    pairs: dict[tuple[str, str, str, str], float] = {}
    for rule in doc.rules:
        for sym in symbols:
            for s_label in sym.labels:
                if not rule.matches_symbol(s_label):
                    continue
                for txt in texts:
                    factor = _geometric_factor(rule, sym.position, txt.position)
                    if factor <= 0.0:
                        continue
                    for t_label in txt.labels:
                        if not rule.matches_text(t_label):
                            continue
                        contribution = rule.possibility * factor
                        key = _pair_key(sym.id, s_label, txt.id, t_label)
                        if contribution > pairs.get(key, 0.0):
                            pairs[key] = contribution
    pairs.update(dict(doc.explicit_pairs))
    return TypicalityModel(
        pairs, dict(doc.explicit_isolation), doc.isolation_default
    )


def parse_graph(data: bytes | str) -> ConnectionGraph:
    """Parse a bare graph fixture (self-loops are edges with a == b)."""
    obj = _load_json(data, GRAPH_SCHEMA)
    vertices = [Vertex(rec["id"], rec["kind"]) for rec in obj["vertices"]]
    edges = [ValuedEdge(rec["a"], rec["b"], rec["value"]) for rec in obj["edges"]]
    return ConnectionGraph(vertices, edges)


# --- commands ---


def _table_json(table) -> dict:
    rows = sorted(
        table.rows,
        key=lambda r: (-r.posterior, r.labeling.assignment),
    )
    return {
        "labelings": [
            {
                "assignment": r.labeling.as_dict(),
                "prior": r.prior,
                "plausibility": r.plausibility,
                "posterior": r.posterior,
            }
            for r in rows
        ],
        "conflict_mass": conflict_mass(table),
    }


def _prune_model(tm: TypicalityModel, limit: float) -> TypicalityModel:
    # equivalent to threshold_prune on every labeling's graph: each edge
    # takes its value verbatim from one table entry (or the default)
    return TypicalityModel(
        {k: v for k, v in tm.pairs.items() if v >= limit},
        {k: v for k, v in tm.isolation.items() if v >= limit},
        tm.isolation_default if tm.isolation_default >= limit else 0.0,
    )


def _cmd_validate(args) -> int:
    doc = parse_problem(_read(args.input))
    tm = materialize_typicality(doc)
    validate_typicality(doc.entities, tm)
    n_sym = sum(1 for e in doc.entities if e.kind == "symbol")
    n_txt = len(doc.entities) - n_sym
    components = decompose(doc.entities, tm)
    print(f"entities: {len(doc.entities)} ({n_sym} symbols, {n_txt} texts)")
    print(f"labelings: {labeling_count(doc.entities)}")
    print(
        f"typicality: {len(tm.pairs)} pair entries, "
        f"{len(tm.isolation)} isolation entries, "
        f"isolation default {tm.isolation_default}"
    )
    print(f"components: {len(components)}")
    print("ok")
    return 0


def _cmd_posterior(args) -> int:
    doc = parse_problem(_read(args.input))
    if args.isolation_default is not None:
        doc = ProblemDocument(
            entities=doc.entities,
            explicit_pairs=doc.explicit_pairs,
            explicit_isolation=doc.explicit_isolation,
            rules=doc.rules,
            isolation_default=args.isolation_default,
        )
    tm = materialize_typicality(doc)
    validate_typicality(doc.entities, tm)
    if args.threshold is not None:
        tm = _prune_model(tm, args.threshold)
    if args.decompose:
        tables = posterior_decomposed(doc.entities, tm)
        out = {"components": [_table_json(t) for t in tables]}
    else:
        out = _table_json(posterior(doc.entities, tm))
    if args.top_k is not None:
        if args.top_k < 0:
            raise InputError("--top-k must be non-negative")
        if "components" in out:
            for component in out["components"]:
                component["labelings"] = component["labelings"][: args.top_k]
        else:
            out["labelings"] = out["labelings"][: args.top_k]
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_value(args) -> int:
    g = parse_graph(_read(args.input))
    if args.threshold is not None:
        g = threshold_prune(g, args.threshold)
    print(solution_value(g))
    return 0


def _random_oracle_graph(rng: random.Random) -> ConnectionGraph:
    """A small random graph in the oracle-tractable regime.

    Values come from a coarse grid so duplicate values (ties) are common.
    """
    n_s = rng.randint(1, 4)
    n_t = rng.randint(0, 4)
    vertices = [Vertex(f"s{i}", "s") for i in range(n_s)]
    vertices += [Vertex(f"t{i}", "t") for i in range(n_t)]

    def grid_value() -> float:
        return rng.randint(1, 10) / 10.0

    edges = []
    for i in range(n_s):
        for j in range(n_t):
            if rng.random() < 0.5:
                edges.append(ValuedEdge(f"s{i}", f"t{j}", grid_value()))
    for i in range(n_s):
        for j in range(i + 1, n_s):
            if rng.random() < 0.25:
                edges.append(ValuedEdge(f"s{i}", f"s{j}", grid_value()))
    for i in range(n_s):
        if rng.random() < 0.5:
            edges.append(ValuedEdge(f"s{i}", f"s{i}", grid_value()))
    rng.shuffle(edges)
    del edges[11:]
    return ConnectionGraph(vertices, edges)


def _cmd_oracle_check(args) -> int:
    rng = random.Random(args.seed)
    for i in range(args.count):
        g = _random_oracle_graph(rng)
        fast = solution_value(g)
        slow = solution_value_bruteforce(g)
        if fast != slow:
            print(
                f"mismatch on graph {i}: solution_value={fast!r} "
                f"bruteforce={slow!r} graph={g.edges!r}",
                file=sys.stderr,
            )
            return 3
    print(f"checked {args.count} graphs: ok")
    return 0


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxfuse",
        description="Label uncertain symbol/text entities by fusing "
        "recognizer probabilities with context typicality.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a problem document and print stats")
    p.add_argument("input")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("posterior", help="fused posterior over joint labelings")
    p.add_argument("input")
    p.add_argument("--top-k", type=int, default=None, metavar="N")
    p.add_argument("--threshold", type=float, default=None, metavar="X")
    p.add_argument("--decompose", action="store_true")
    p.add_argument("--isolation-default", type=float, default=None, metavar="X")
    p.set_defaults(func=_cmd_posterior)

    p = sub.add_parser("value", help="solution value of a graph fixture")
    p.add_argument("input")
    p.add_argument("--threshold", type=float, default=None, metavar="X")
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser(
        "oracle-check",
        help="compare the optimizer against brute force on random graphs",
    )
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--count", type=int, default=500, metavar="N")
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def run_cli(argv) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
