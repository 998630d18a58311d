"""Document parsing, rule materialization, and the command-line surface."""

import json

import pytest

from ctxfuse.cli import (
    ProblemDocument,
    Rule,
    materialize_typicality,
    parse_graph,
    parse_problem,
    run_cli,
    serialize_problem,
)
from ctxfuse.errors import (
    BadRegex,
    InvariantError,
    MalformedGraph,
    SchemaError,
)

RC_PROBLEM = {
    "entities": [
        {
            "id": "sym",
            "kind": "symbol",
            "candidates": [{"label": "R", "prob": 0.7}, {"label": "C", "prob": 0.3}],
        },
        {
            "id": "txt",
            "kind": "text",
            "candidates": [{"label": "10kΩ", "prob": 1.0}],
        },
    ],
    "typicality": {
        "pairs": [
            {"a": "sym", "a_label": "R", "b": "txt", "b_label": "10kΩ", "value": 1.0},
            {"a": "sym", "a_label": "C", "b": "txt", "b_label": "10kΩ", "value": 0.2},
        ]
    },
}

FOUR_EDGE_GRAPH = {
    "vertices": [
        {"id": "s1", "kind": "s"},
        {"id": "s2", "kind": "s"},
        {"id": "t1", "kind": "t"},
    ],
    "edges": [
        {"a": "s1", "b": "t1", "value": 0.9},
        {"a": "s2", "b": "t1", "value": 0.8},
        {"a": "s1", "b": "s1", "value": 0.5},
        {"a": "s2", "b": "s2", "value": 0.6},
    ],
}


# --- parsing ---


def test_parse_minimal_document():
    doc = parse_problem(json.dumps(RC_PROBLEM))
    assert [e.id for e in doc.entities] == ["sym", "txt"]
    assert dict(doc.explicit_pairs)[("sym", "R", "txt", "10kΩ")] == 1.0


def test_parse_rejects_bad_json():
    with pytest.raises(SchemaError):
        parse_problem(b"{nope")


def test_parse_schema_error_carries_path():
    bad = {"entities": [{"id": "e", "kind": "wrong", "candidates": []}]}
    with pytest.raises(SchemaError) as err:
        parse_problem(json.dumps(bad))
    assert "entities[0]" in str(err.value)


def test_parse_rejects_bad_probability_sum():
    bad = json.loads(json.dumps(RC_PROBLEM))
    bad["entities"][0]["candidates"][0]["prob"] = 0.6
    with pytest.raises(InvariantError) as err:
        parse_problem(json.dumps(bad))
    assert "sym" in str(err.value)


def test_parse_rejects_text_text_pair():
    bad = {
        "entities": [
            {"id": "t1", "kind": "text", "candidates": [{"label": "a", "prob": 1.0}]},
            {"id": "t2", "kind": "text", "candidates": [{"label": "b", "prob": 1.0}]},
        ],
        "typicality": {
            "pairs": [
                {"a": "t1", "a_label": "a", "b": "t2", "b_label": "b", "value": 0.5}
            ]
        },
    }
    with pytest.raises(InvariantError):
        parse_problem(json.dumps(bad))


def test_parse_requires_some_evidence_source():
    bad = {"entities": RC_PROBLEM["entities"]}
    with pytest.raises(InvariantError):
        parse_problem(json.dumps(bad))


def test_parse_rejects_duplicate_entity_ids():
    bad = json.loads(json.dumps(RC_PROBLEM))
    bad["entities"].append(bad["entities"][0])
    with pytest.raises(InvariantError):
        parse_problem(json.dumps(bad))


def test_round_trip():
    doc = parse_problem(json.dumps(RC_PROBLEM))
    assert parse_problem(serialize_problem(doc)) == doc


def test_round_trip_with_rules_and_positions():
    obj = {
        "entities": [
            {
                "id": "s1",
                "kind": "symbol",
                "candidates": [{"label": "resistor", "prob": 1.0}],
                "position": [0.0, 1.5],
            },
            {
                "id": "x1",
                "kind": "text",
                "candidates": [{"label": "10kΩ", "prob": 1.0}],
                "position": [30.0, 1.5],
            },
        ],
        "rules": [
            {
                "symbol_class": "resistor",
                "text_pattern": {"suffix": "kΩ"},
                "possibility": 1.0,
                "max_distance": 100.0,
                "falloff": "linear",
            }
        ],
        "defaults": {"isolation_default": 0.25},
    }
    doc = parse_problem(json.dumps(obj))
    assert doc.isolation_default == 0.25
    assert parse_problem(serialize_problem(doc)) == doc


# --- rules ---


def entity(id, kind, label, position=None):
    return {
        "id": id,
        "kind": kind,
        "candidates": [{"label": label, "prob": 1.0}],
        **({"position": position} if position else {}),
    }


def rule_doc(rule, entities):
    return json.dumps({"entities": entities, "rules": [rule]})


def test_rule_suffix_match_yields_possibility():
    doc = parse_problem(
        rule_doc(
            {"symbol_class": "resistor", "text_pattern": {"suffix": "kΩ"},
             "possibility": 1.0},
            [entity("s", "symbol", "resistor"), entity("t", "text", "10kΩ")],
        )
    )
    tm = materialize_typicality(doc)
    assert tm.pair_value("s", "resistor", "t", "10kΩ") == 1.0


def test_rule_pattern_mismatch_yields_no_edge():
    doc = parse_problem(
        rule_doc(
            {"symbol_class": "resistor", "text_pattern": {"suffix": "kΩ"},
             "possibility": 1.0},
            [entity("s", "symbol", "resistor"), entity("t", "text", "10V")],
        )
    )
    tm = materialize_typicality(doc)
    assert tm.pair_value("s", "resistor", "t", "10V") == 0.0
    assert not tm.pairs


def test_rule_linear_falloff():
    doc = parse_problem(
        rule_doc(
            {"symbol_class": "resistor", "text_pattern": {"suffix": "kΩ"},
             "possibility": 0.8, "max_distance": 100.0, "falloff": "linear"},
            [
                entity("s", "symbol", "resistor", position=[0.0, 0.0]),
                entity("t", "text", "10kΩ", position=[30.0, 40.0]),
            ],
        )
    )
    tm = materialize_typicality(doc)
    # d = 50, factor = 1 - 50/100
    assert tm.pair_value("s", "resistor", "t", "10kΩ") == pytest.approx(0.4)


def test_rule_beyond_max_distance_contributes_nothing():
    doc = parse_problem(
        rule_doc(
            {"symbol_class": "*", "text_pattern": {"suffix": "kΩ"},
             "possibility": 1.0, "max_distance": 10.0},
            [
                entity("s", "symbol", "resistor", position=[0.0, 0.0]),
                entity("t", "text", "10kΩ", position=[30.0, 40.0]),
            ],
        )
    )
    assert not materialize_typicality(doc).pairs


def test_rule_missing_positions_skip_geometry():
    doc = parse_problem(
        rule_doc(
            {"symbol_class": "*", "text_pattern": {"prefix": "10"},
             "possibility": 0.5, "max_distance": 10.0},
            [entity("s", "symbol", "resistor"), entity("t", "text", "10kΩ")],
        )
    )
    assert materialize_typicality(doc).pair_value("s", "resistor", "t", "10kΩ") == 0.5


def test_rules_aggregate_by_max_and_ignore_order():
    rules = [
        {"symbol_class": "res*", "text_pattern": {"suffix": "Ω"}, "possibility": 0.6},
        {"symbol_class": "*", "text_pattern": {"regex": "^10"}, "possibility": 0.9},
    ]
    entities = [entity("s", "symbol", "resistor"), entity("t", "text", "10kΩ")]
    doc1 = parse_problem(json.dumps({"entities": entities, "rules": rules}))
    doc2 = parse_problem(json.dumps({"entities": entities, "rules": rules[::-1]}))
    tm1 = materialize_typicality(doc1)
    tm2 = materialize_typicality(doc2)
    assert tm1.pairs == tm2.pairs
    assert tm1.pair_value("s", "resistor", "t", "10kΩ") == 0.9


def test_explicit_entries_override_rules():
    obj = {
        "entities": [entity("s", "symbol", "resistor"), entity("t", "text", "10kΩ")],
        "rules": [
            {"symbol_class": "*", "text_pattern": {"suffix": "kΩ"}, "possibility": 1.0}
        ],
        "typicality": {
            "pairs": [
                {"a": "s", "a_label": "resistor", "b": "t", "b_label": "10kΩ",
                 "value": 0.3}
            ]
        },
    }
    tm = materialize_typicality(parse_problem(json.dumps(obj)))
    assert tm.pair_value("s", "resistor", "t", "10kΩ") == 0.3


def test_bad_regex_surfaces_at_materialization():
    doc = parse_problem(
        rule_doc(
            {"symbol_class": "*", "text_pattern": {"regex": "("}, "possibility": 1.0},
            [entity("s", "symbol", "resistor"), entity("t", "text", "10kΩ")],
        )
    )
    with pytest.raises(BadRegex):
        materialize_typicality(doc)


def test_rule_invariants():
    with pytest.raises(InvariantError):
        Rule("x", "suffix", "a", possibility=0.0)
    with pytest.raises(InvariantError):
        Rule("x", "suffix", "a", possibility=1.0, max_distance=-1.0)
    with pytest.raises(InvariantError):
        Rule("x", "suffix", "a", possibility=1.0, falloff="linear")


# --- graph fixtures ---


def test_parse_graph_fixture():
    g = parse_graph(json.dumps(FOUR_EDGE_GRAPH))
    assert len(g.vertices) == 3
    assert len(g.edges) == 4


def test_parse_graph_rejects_malformed():
    bad = json.loads(json.dumps(FOUR_EDGE_GRAPH))
    bad["edges"].append({"a": "t1", "b": "t1", "value": 0.4})
    with pytest.raises(MalformedGraph):
        parse_graph(json.dumps(bad))


# --- CLI ---


@pytest.fixture
def problem_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(RC_PROBLEM), encoding="utf-8")
    return str(path)


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "graph.json"
    path.write_text(json.dumps(FOUR_EDGE_GRAPH), encoding="utf-8")
    return str(path)


def test_cli_posterior(problem_file, capsys):
    assert run_cli(["posterior", problem_file]) == 0
    out = json.loads(capsys.readouterr().out)
    rows = out["labelings"]
    assert rows[0]["assignment"] == {"sym": "R", "txt": "10kΩ"}
    assert rows[0]["posterior"] == pytest.approx(0.7 / 0.76, abs=1e-12)
    assert rows[1]["posterior"] == pytest.approx(0.06 / 0.76, abs=1e-12)
    assert out["conflict_mass"] == pytest.approx(0.24, abs=1e-12)


def test_cli_runs_are_byte_identical(problem_file, capsys):
    assert run_cli(["posterior", problem_file]) == 0
    first = capsys.readouterr().out
    assert run_cli(["posterior", problem_file]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_cli_top_k(problem_file, capsys):
    assert run_cli(["posterior", problem_file, "--top-k", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["labelings"]) == 1


def test_cli_threshold_prunes_typicality(problem_file, capsys):
    assert run_cli(["posterior", problem_file, "--threshold", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    # the C labeling's only edge (0.2) is pruned away: plausibility 0
    by_sym = {row["assignment"]["sym"]: row for row in out["labelings"]}
    assert by_sym["C"]["plausibility"] == 0.0
    assert by_sym["R"]["posterior"] == 1.0


def test_cli_decompose(problem_file, capsys):
    assert run_cli(["posterior", problem_file, "--decompose"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["components"]) == 1
    rows = out["components"][0]["labelings"]
    assert rows[0]["posterior"] == pytest.approx(0.7 / 0.76, abs=1e-12)


def test_cli_isolation_default_rescues_zero_evidence(tmp_path, capsys):
    lonely = {
        "entities": [entity("s", "symbol", "resistor")],
        "typicality": {"pairs": []},
    }
    path = tmp_path / "lonely.json"
    path.write_text(json.dumps(lonely), encoding="utf-8")
    assert run_cli(["posterior", str(path)]) == 2
    assert "error:" in capsys.readouterr().err
    assert run_cli(["posterior", str(path), "--isolation-default", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["labelings"][0]["plausibility"] == 0.5


def test_cli_value(graph_file, capsys):
    assert run_cli(["value", graph_file]) == 0
    assert capsys.readouterr().out == "0.6\n"


def test_cli_value_with_threshold(graph_file, capsys):
    assert run_cli(["value", graph_file, "--threshold", "0.55"]) == 0
    assert capsys.readouterr().out == "0.6\n"


def test_cli_validate(problem_file, capsys):
    assert run_cli(["validate", problem_file]) == 0
    out = capsys.readouterr().out
    assert "entities: 2 (1 symbols, 1 texts)" in out
    assert "labelings: 2" in out
    assert out.rstrip().endswith("ok")


def test_cli_validate_rejects_bad_document(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{", encoding="utf-8")
    assert run_cli(["validate", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_missing_file(capsys):
    assert run_cli(["validate", "/nonexistent/nope.json"]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_oracle_check(capsys):
    assert run_cli(["oracle-check", "--seed", "7", "--count", "150"]) == 0
    assert "checked 150 graphs: ok" in capsys.readouterr().out


def test_cli_labeling_cap_exit_code(tmp_path, capsys):
    # 2^21 labelings exceed the megalabeling cap -> exit 2
    entities = [
        {
            "id": f"e{i:02d}",
            "kind": "symbol",
            "candidates": [{"label": "a", "prob": 0.5}, {"label": "b", "prob": 0.5}],
        }
        for i in range(21)
    ]
    doc = {"entities": entities, "typicality": {"pairs": []}}
    path = tmp_path / "big.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert run_cli(["posterior", str(path), "--isolation-default", "1.0"]) == 2
    assert "error:" in capsys.readouterr().err
