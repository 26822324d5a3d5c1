import os
from pathlib import Path

import pytest

import ocpgraph

FIXTURES = Path(os.environ.get("OCPG_FIXTURES", Path(__file__).resolve().parents[1] / "fixtures"))


def test_build_rdb_mondial():
    graph, warnings = ocpgraph.build_rdb(
        str(FIXTURES / "mondial_rdb" / "schema.json"), str(FIXTURES / "mondial_rdb" / "data")
    )
    stats = graph.stats()
    assert (stats["objects"], stats["connectors"]) == (5, 2)
    assert (stats["original_edges"], stats["opposite_edges"]) == (6, 6)
    assert graph.validate() == []
    assert warnings == []
    assert "country/F" in graph.node_ids()


def test_json_round_trip():
    graph, _ = ocpgraph.build_rdb(
        str(FIXTURES / "mondial_rdb" / "schema.json"), str(FIXTURES / "mondial_rdb" / "data")
    )
    again = ocpgraph.Graph.from_json(graph.to_json())
    assert again == graph
    assert len(again) == 7


def test_build_xml_university():
    folder = FIXTURES / "university"
    graph, _ = ocpgraph.build_xml(
        (folder / "university.xml").read_text(), (folder / "university.dtd").read_text(), omit_root=True
    )
    answers = graph.search(["Student", "Lecturer"], limit=1)
    assert len(answers) == 1
    assert len(answers[0]["nodes"]) == 3


def test_build_rdf_chain():
    graph, _ = ocpgraph.build_rdf((FIXTURES / "rdf" / "chain.nt").read_text())
    assert len(graph) == 1


def test_search_dedup_modes():
    graph = ocpgraph.Graph.load(str(FIXTURES / "search" / "border_pair.json"))
    assert len(graph.search(["Russia", "Ukraine"], limit=0, dedup="edges")) == 2
    assert len(graph.search(["Russia", "Ukraine"], limit=0, dedup="types")) == 1


def test_errors_raise():
    with pytest.raises(ocpgraph.Error):
        ocpgraph.Graph.from_json("{not json")
    graph = ocpgraph.Graph.load(str(FIXTURES / "search" / "border_pair.json"))
    with pytest.raises(ocpgraph.Error):
        graph.search([])
