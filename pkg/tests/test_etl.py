import json

import pytest

from semlink import GraphStore, run_query
from semlink.etl import (
    PROV_RELATIONS,
    SchemaValidationError,
    SourceTable,
    TransformError,
    builtin_schemas,
    load_builtin_schema,
    load_schema,
    schema_term_definitions,
    transform,
)
from semlink.namespaces import PROV, PROV_AGENT, RDF_TYPE, XSD_INTEGER
from semlink.terms import Iri, Literal, Triple
from semlink.turtle import parse_turtle, serialize

from conftest import RODENT_CSV


MINI_SCHEMA = {
    "name": "mini",
    "namespaces": {"ex": "http://ex/ns#"},
    "nodes": [
        {
            "id": "thing",
            "kind": "entity",
            "iri_template": "http://ex/data/{key}",
            "attributes": [
                {"predicate": "ex:label", "column": "label"},
                {"predicate": "ex:size", "column": "size", "datatype": "xsd:integer"},
            ],
        },
        {
            "id": "proc",
            "kind": "activity",
            "iri_template": "http://ex/data/{key}/proc",
            "attributes": [],
        },
    ],
    "edges": [{"from": "thing", "relation": "wasGeneratedBy", "to": "proc"}],
}


# -- schema validation -----------------------------------------------------------


def test_builtin_schemas_validate_and_have_expected_nodes():
    schemas = {s.name: s for s in builtin_schemas()}
    assert set(schemas) == {"rodent-imaging", "human-assessment", "heart-rate"}
    rodent = schemas["rodent-imaging"]
    kinds = {n.id: n.kind for n in rodent.nodes}
    assert kinds["animal"] == "agent"
    assert kinds["stressor"] == "entity"
    assert kinds["demographics"] == "entity"
    assert kinds["assessment"] == "activity"
    roi_nodes = [n for n in rodent.nodes if n.id.startswith("roi_")]
    assert len(roi_nodes) == 2 and all(n.optional for n in roi_nodes)


def test_domain_range_violation_rejected():
    bad = json.loads(json.dumps(MINI_SCHEMA))
    bad["nodes"][0]["kind"] = "agent"
    with pytest.raises(SchemaValidationError) as err:
        load_schema(bad)
    assert any("domain/range" in e for e in err.value.errors)


def test_duplicate_node_ids_listed():
    bad = json.loads(json.dumps(MINI_SCHEMA))
    bad["nodes"].append(dict(bad["nodes"][0]))
    with pytest.raises(SchemaValidationError) as err:
        load_schema(bad)
    assert any("duplicate node id 'thing'" in e for e in err.value.errors)


def test_all_errors_collected_not_just_first():
    bad = {
        "name": "",
        "namespaces": {},
        "nodes": [
            {"id": "x", "kind": "whatever", "iri_template": "", "attributes": [
                {"predicate": "nope:p", "column": "c"}
            ]},
        ],
        "edges": [{"from": "x", "relation": "madeUp", "to": "ghost"}],
    }
    with pytest.raises(SchemaValidationError) as err:
        load_schema(bad)
    messages = "\n".join(err.value.errors)
    assert "name" in messages
    assert "unknown kind" in messages
    assert "undeclared prefix" in messages
    assert "unknown relation" in messages
    assert "unknown node 'ghost'" in messages
    assert len(err.value.errors) >= 5


def test_unknown_relation_names_it():
    bad = json.loads(json.dumps(MINI_SCHEMA))
    bad["edges"][0]["relation"] = "wasWhatever"
    with pytest.raises(SchemaValidationError) as err:
        load_schema(bad)
    assert any("wasWhatever" in e for e in err.value.errors)


# -- transform -------------------------------------------------------------------


def test_rodent_row_produces_expected_shapes():
    schema = load_builtin_schema("rodent-imaging")
    table = SourceTable.from_records(
        [{"animalNumber": "R001", "species": "Sprague-Dawley", "age": "31", "condition": "CES+"}]
    )
    triples = set(transform(table, schema))
    animal = Iri("http://example.org/data/rodent/R001")
    demo = Iri("http://example.org/data/rodent/R001/demographics")
    assessment = Iri("http://example.org/data/rodent/R001/assessment")
    assert Triple(animal, Iri(RDF_TYPE), Iri(PROV_AGENT)) in triples
    ncit = "http://ncicb.nci.nih.gov/xml/owl/EVS/Thesaurus.owl#"
    cuci = "http://example.org/ns/cuci#"
    assert Triple(animal, Iri(ncit + "species"), Literal("Sprague-Dawley")) in triples
    assert Triple(animal, Iri(cuci + "animalNumber"), Literal("R001")) in triples
    assert Triple(demo, Iri(ncit + "age"), Literal("31", XSD_INTEGER)) in triples
    assert Triple(demo, Iri(PROV + "wasGeneratedBy"), assessment) in triples
    assert Triple(assessment, Iri(PROV + "wasAssociatedWith"), animal) in triples
    # ROI nodes are optional and the table has no ROI columns
    assert not any("roi" in t.subject.value for t in triples)


def test_empty_table_empty_output():
    schema = load_schema(MINI_SCHEMA)
    assert transform(SourceTable(header=["key", "label", "size"], rows=[]), schema) == []


def test_triple_count_is_rows_times_template():
    schema = load_schema(MINI_SCHEMA)
    records = [{"key": f"k{i}", "label": f"l{i}", "size": str(i)} for i in range(10)]
    triples = transform(SourceTable.from_records(records), schema)
    # per row: entity type + 2 attributes + activity type + 1 edge = 5
    assert len(triples) == 10 * 5


def test_blank_cells_skip_attributes():
    schema = load_schema(MINI_SCHEMA)
    triples = transform(SourceTable.from_records([{"key": "k", "label": "", "size": "4"}]), schema)
    assert len(triples) == 4
    assert not any(t.predicate.value.endswith("label") for t in triples)


def test_bad_integer_cell_reports_row_and_column():
    schema = load_schema(MINI_SCHEMA)
    table = SourceTable.from_records(
        [{"key": "a", "label": "x", "size": "1"}, {"key": "b", "label": "y", "size": "abc"}]
    )
    with pytest.raises(TransformError) as err:
        transform(table, schema)
    assert err.value.row == 2
    assert err.value.column == "size"
    assert err.value.value == "abc"


def test_missing_required_column_fails_before_output():
    schema = load_schema(MINI_SCHEMA)
    with pytest.raises(TransformError) as err:
        transform(SourceTable.from_records([{"label": "x", "size": "1"}]), schema)
    assert "key" in str(err.value)


def test_iri_template_percent_encodes():
    schema = load_schema(MINI_SCHEMA)
    triples = transform(
        SourceTable.from_records([{"key": "a b/c", "label": "x", "size": "1"}]), schema
    )
    subjects = {t.subject.value for t in triples}
    assert "http://ex/data/a%20b%2Fc" in subjects


def test_transform_deterministic(fixture_store):
    schema = load_builtin_schema("rodent-imaging")
    table = SourceTable.from_csv(RODENT_CSV)
    assert transform(table, schema) == transform(table, schema)


def test_prov_well_formedness_of_builtin_output(fixture_store):
    """Each relation's subject/object types satisfy the PROV domain/range rules."""
    kind_class = {
        "entity": PROV + "Entity",
        "activity": PROV + "Activity",
        "agent": PROV + "Agent",
    }
    rdf_type = Iri(RDF_TYPE)
    for relation, (domain, range_) in PROV_RELATIONS.items():
        for triple in fixture_store.match(None, None, Iri(PROV + relation), None):
            subject_types = {
                t.object.value for t in fixture_store.match(None, triple.subject, rdf_type, None)
            }
            object_types = {
                t.object.value for t in fixture_store.match(None, triple.object, rdf_type, None)
            }
            assert kind_class[domain] in subject_types
            assert kind_class[range_] in object_types


def test_turtle_round_trip_preserves_transform_output():
    schema = load_builtin_schema("rodent-imaging")
    triples = transform(SourceTable.from_csv(RODENT_CSV), schema)
    text = serialize(triples, schema.namespaces)
    assert set(parse_turtle(text).triples) == set(triples)


def test_human_assessment_matches_query_shape():
    schema = load_builtin_schema("human-assessment")
    triples = transform(SourceTable.from_records([{"subjectID": "H042", "age": "12.0"}]), schema)
    store = GraphStore()
    store.bulk_insert("urn:g", triples)
    result = run_query(
        store,
        """SELECT ?child_id ?child_age WHERE {
          ?agent_uri rdf:type prov:Agent ;
              ncit:species "Homo sapiens" ;
              ncit:subjectID ?child_id .
          ?activity_uri prov:wasAssociatedWith ?agent_uri .
          ?entity prov:wasGeneratedBy ?activity_uri ;
              ncit:age ?child_age .
        }""",
        graph="urn:g",
    )
    assert result.row_count == 1
    assert result.rows[0][0].lexical == "H042"
    assert result.rows[0][1].lexical == "12.0"


def test_rodent_fixture_answers_demographics_query(fixture_store):
    from semlink.bench import RODENT_DEMOGRAPHICS_QUERY

    result = run_query(fixture_store, RODENT_DEMOGRAPHICS_QUERY, graph="urn:graph:fixture")
    assert result.row_count == 3
    ids = {row[0].lexical for row in result.rows}
    assert ids == {"R1", "R2", "R3"}


def test_schema_term_definitions_cover_ncit_age():
    defs = schema_term_definitions(load_builtin_schema("rodent-imaging"))
    by_qname = {d["qname"]: d for d in defs}
    assert by_qname["ncit:age"]["terminology"] == "NCI Thesaurus"
    assert by_qname["cuci:animalNumber"]["terminology"] == "Project terminology"


def test_csv_dialect_quoted_fields():
    table = SourceTable.from_csv('key,label,size\n"a,b","with ""quotes""",3\n')
    assert table.rows[0] == ["a,b", 'with "quotes"', "3"]
