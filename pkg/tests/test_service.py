import pytest
from fastapi.testclient import TestClient

from semlink.namespaces import PROV_AGENT, RDF_TYPE
from semlink.service import ServiceConfig, create_app, list_subjects
from semlink.terms import Iri

from conftest import CROSS_SPECIES_QUERY, EXPECTED_EXACT_PAIRS, build_fixture_store


@pytest.fixture(scope="module")
def client():
    store = build_fixture_store()
    app = create_app(store=store)
    with TestClient(app) as c:
        c.app_store = store
        yield c


def test_subjects_lists_every_agent(client):
    body = client.get("/subjects").json()
    store = client.app_store
    agents = {t.subject for t in store.match(None, None, Iri(RDF_TYPE), Iri(PROV_AGENT))}
    assert body["count"] == len(agents) == 7
    species = {row["species"] for row in body["subjects"]}
    assert species == {"Sprague-Dawley", "Homo sapiens"}
    ids = [row["id"] for row in body["subjects"]]
    assert ids == sorted(ids, key=lambda i: i)  # grouped by species, then id ordering
    rows = {row["id"]: row for row in body["subjects"]}
    assert rows["R1"]["data_types"] == ["demographics", "roi-statistics"]
    assert rows["H2"]["data_types"] == ["demographics"]
    assert rows["R2"]["ages"] == ["31"]


def test_subjects_empty_store():
    app = create_app()
    with TestClient(app) as c:
        body = c.get("/subjects").json()
    assert body == {"subjects": [], "count": 0}


def test_query_roundtrip_and_reveal(client):
    body = client.post("/query", json={"sparql": CROSS_SPECIES_QUERY}).json()
    assert body["sparql"] == CROSS_SPECIES_QUERY  # byte-identical reveal text
    assert body["row_count"] == 2
    pairs = {
        (row["rodent_id"]["value"], row["child_id"]["value"]) for row in body["rows"]
    }
    assert pairs == EXPECTED_EXACT_PAIRS
    assert body["elapsed_ms"] > 0
    # the revealed text re-executes to the identical table
    again = client.post("/query", json={"sparql": body["sparql"]}).json()
    assert again["rows"] == body["rows"]
    assert again["vars"] == body["vars"]


def test_query_parse_error_is_400_with_position(client):
    response = client.post("/query", json={"sparql": "SELECT ?x WHERE { ?x ncit:age }"})
    assert response.status_code == 400
    detail = response.json()["detail"]
    assert detail["error"] == "parse"
    assert detail["line"] >= 1 and detail["column"] >= 1


def test_result_cap_advises_limit():
    store = build_fixture_store()
    app = create_app(store=store, config=ServiceConfig(result_cap=1))
    with TestClient(app) as c:
        response = c.post("/query", json={"sparql": "SELECT * WHERE { ?s ?p ?o }"})
    assert response.status_code == 400
    assert "LIMIT" in response.json()["detail"]["message"]


def test_templates_run_counts_rodents(client):
    listing = client.get("/templates").json()["templates"]
    ids = {t["id"] for t in listing}
    assert {"rodent-demographics", "human-assessments", "roi-statistics",
            "heart-rate-samples", "heart-rate-summary"} <= ids

    body = client.post("/templates/rodent-demographics/run", json={"params": {}}).json()
    assert body["row_count"] == 3  # fixture rodent count
    assert "sparql" in body and "?rodent_id" in body["sparql"]
    columns = {c["var"]: c for c in body["columns"]}
    assert columns["rodent_age"]["qname"] == "ncit:age"

    filtered = client.post(
        "/templates/rodent-demographics/run", json={"params": {"subject_id": "R2"}}
    ).json()
    assert filtered["row_count"] == 1
    assert filtered["rows"][0]["rodent_id"]["value"] == "R2"


def test_template_reveal_reexecutes_identically(client):
    body = client.post("/templates/human-assessments/run", json={"params": {}}).json()
    again = client.post("/query", json={"sparql": body["sparql"]}).json()
    assert again["rows"] == body["rows"]


def test_unknown_template_404(client):
    assert client.post("/templates/nope/run", json={"params": {}}).status_code == 404


def test_term_definitions(client):
    ncit_age = client.get("/terms/ncit:age").json()
    assert ncit_age["terminology"] == "NCI Thesaurus"
    cuci = client.get("/terms/cuci:animalNumber").json()
    assert cuci["terminology"] == "Project terminology"
    assert client.get("/terms/unknown:zzz").status_code == 404


def test_maps_catalog(client):
    maps = client.get("/maps").json()["maps"]
    assert {m["name"] for m in maps} == {"human-to-rodent-linear", "rodent-to-human-linear"}
    assert all(m["citation"] for m in maps)


def test_crossspecies_endpoint(client):
    body = client.post(
        "/crossspecies", json={"map": "rodent-to-human-linear", "tolerance": 0.0}
    ).json()
    assert {(p["from_subject"], p["to_subject"]) for p in body["pairs"]} == EXPECTED_EXACT_PAIRS
    wider = client.post(
        "/crossspecies", json={"map": "rodent-to-human-linear", "tolerance": 0.5}
    ).json()
    assert wider["count"] == 3
    assert client.post("/crossspecies", json={"map": "zzz"}).status_code == 404
    assert (
        client.post(
            "/crossspecies", json={"map": "rodent-to-human-linear", "tolerance": -1}
        ).status_code
        == 400
    )


def test_export_sparql_equals_query_csv(client):
    response = client.post("/export", json={"sparql": CROSS_SPECIES_QUERY})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    # byte-for-byte the engine's CSV serialization of the same query
    from semlink import run_query

    expected = run_query(client.app_store, CROSS_SPECIES_QUERY).to_csv()
    assert response.content == expected.encode("utf-8")
    assert response.content.startswith(b"rodent_id,child_id\r\n")


def test_export_selection_demographics(client):
    response = client.post(
        "/export",
        json={"selection": {"subjects": ["R1"], "data_types": ["demographics"]}},
    )
    assert response.status_code == 200
    lines = response.content.decode("utf-8").splitlines()
    assert lines[0].startswith("data_type,")
    assert len(lines) == 2  # header + R1's demographics row
    assert lines[1].startswith("demographics,")
    assert "R1" in lines[1]


def test_export_selection_spanning_species(client):
    multi = client.post(
        "/export",
        json={
            "selection": {
                "subjects": ["R1", "H2"],
                "data_types": ["demographics", "roi-statistics"],
            }
        },
    )
    lines = multi.content.decode("utf-8").splitlines()
    # union rows = rodent demographics (1) + human assessment (1) + roi rows (1)
    assert len(lines) == 1 + 3


def test_export_selection_errors(client):
    assert (
        client.post("/export", json={"selection": {"subjects": [], "data_types": ["x"]}})
        .status_code
        == 400
    )
    response = client.post(
        "/export", json={"selection": {"subjects": ["R1"], "data_types": ["nope"]}}
    )
    assert response.status_code == 400
    assert "nope" in response.json()["detail"]
    assert client.post("/export", json={}).status_code == 400


def test_list_subjects_row_count_equals_distinct_agents(client):
    store = client.app_store
    rows = list_subjects(store)
    agents = {t.subject for t in store.match(None, None, Iri(RDF_TYPE), Iri(PROV_AGENT))}
    assert len(rows) == len(agents)
