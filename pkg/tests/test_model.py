import json
from fractions import Fraction

import pytest

from divstable import Assignment, AssignmentError, InstanceError, validate_instance
from divstable.model import format_scalar, load_instance, local_view, parse_assignment, to_scalar

from conftest import bipartite


def test_minimal_bipartite_instance():
    inst = bipartite({"f1": 3}, {"w1": 10}, [("e1", "f1", "w1", 5)])
    assert inst.capacity("e1") == 5
    assert inst.incident("w1") == ("e1",)


def test_edge_within_one_part_rejected():
    with pytest.raises(InstanceError) as err:
        bipartite({"f1": 1, "f2": 1}, {}, [("e", "f1", "f2", 1)])
    assert any("edge within one part" in v for v in err.value.violations)


def test_all_violations_are_collected():
    raw = {
        "kind": "hypergraph",
        "vertices": [{"id": "a", "quota": "-1"}, {"id": "a", "quota": "1"}],
        "edges": [
            {"id": "e", "ends": ["a", "a"], "capacity": "-2"},
            {"id": "g", "ends": ["zz"], "capacity": "1"},
        ],
    }
    with pytest.raises(InstanceError) as err:
        validate_instance(raw)
    text = " | ".join(err.value.violations)
    for needle in ("duplicate id", "negative quota", "repeated ends", "negative capacity",
                   "unknown vertex"):
        assert needle in text


def test_graph_rejects_loops_and_sides():
    with pytest.raises(InstanceError):
        validate_instance({"kind": "graph", "vertices": [{"id": "a", "quota": 1}],
                           "edges": [{"id": "e", "ends": ["a", "a"], "capacity": 1}]})


def test_isolated_vertices_and_parallel_edges_are_legal():
    inst = bipartite({"f": 1, "g": 0}, {"w": 1},
                     [("e1", "f", "w", 1), ("e2", "f", "w", 2)])
    assert inst.incident("g") == ()
    assert inst.incident("w") == ("e1", "e2")


def test_scalars_parse_exactly():
    assert to_scalar("5/2") == Fraction(5, 2)
    assert to_scalar(0.1) == Fraction(1, 10)
    assert to_scalar(" 3 ") == 3
    assert format_scalar(Fraction(6, 4)) == "3/2"
    assert format_scalar(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        to_scalar(True)


def test_assignment_box_and_domain(single_edge):
    with pytest.raises(AssignmentError):
        Assignment(single_edge, {"e": 6})
    with pytest.raises(AssignmentError):
        Assignment(single_edge, {"e": -1})
    with pytest.raises(AssignmentError):
        Assignment(single_edge, {})
    with pytest.raises(AssignmentError):
        Assignment(single_edge, {"e": 1, "x": 0})
    assert Assignment(single_edge, {"e": "5/2"})["e"] == Fraction(5, 2)


def test_document_round_trip(star, tmp_path):
    path = tmp_path / "star.json"
    path.write_text(star.dumps())
    again = load_instance(path)
    assert again.to_document() == star.to_document()
    assert again.sha256() == star.sha256()
    x = Assignment(star, {"e1": "5/2", "e2": "5/2", "e3": 1})
    doc = json.loads(x.dumps(star))
    assert doc["instance_sha256"] == star.sha256()
    assert doc["values"] == {"e1": "5/2", "e2": "5/2", "e3": "1"}
    assert parse_assignment(star, doc) == x


def test_local_view_follows_edge_order(star):
    x = Assignment(star, {"e1": 1, "e2": 2, "e3": 0})
    view = local_view(star, x, "f1")
    assert view.edges == ("e1", "e2", "e3")
    assert view.z == (1, 2, 0)
    assert view.caps == (4, 4, 1)
