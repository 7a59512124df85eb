import pytest

from semlink import GraphStore
from semlink.etl import SourceTable, load_builtin_schema, transform

FIXTURE_GRAPH = "urn:graph:fixture"

#: rodent ages in postnatal days / human ages in postnatal years
RODENT_FIXTURE = [("R1", 7), ("R2", 31), ("R3", 39)]
HUMAN_FIXTURE = [("H1", "0.0"), ("H2", "12.0"), ("H3", "16.5"), ("H4", "20.0")]

RODENT_CSV = (
    "animalNumber,species,age,condition,roiLabel,sliceIndex,hemisphere,areaMm2,faMean\n"
    + "".join(
        f"{rid},Sprague-Dawley,{age},{cond},hippocampus,{i},L,{10 + i}.25,0.4{i}\n"
        for i, ((rid, age), cond) in enumerate(zip(RODENT_FIXTURE, ["CES+", "CES-", "CES+"]))
    )
)

HUMAN_CSV = "subjectID,age\n" + "".join(f"{hid},{age}\n" for hid, age in HUMAN_FIXTURE)

# The cross-species age query: rodent side (with the sequence path), the
# mapped-age BIND, the human side, and the equality filter, as published
# (with the filter's parentheses balanced), wrapped in a SELECT.
CROSS_SPECIES_QUERY = """SELECT ?rodent_id ?child_id WHERE {
?rod_agent a prov:Agent ;
    ncit:species "Sprague-Dawley" ;
    cuci:animalNumber ?rodent_id .
?demo_entity prov:wasGeneratedBy/prov:wasAssociatedWith ?rod_agent ;
    ncit:age ?rodent_age .
BIND(IF(?rodent_age >= 7,(-3.5 + 0.5*?rodent_age),0) as ?equiv_human_age)
?agent_uri rdf:type prov:Agent ;
    ncit:species "Homo sapiens" ;
    ncit:subjectID ?child_id .
?activity_uri prov:wasAssociatedWith ?agent_uri .
?entity prov:wasGeneratedBy ?activity_uri ;
    ncit:age ?child_age .
filter((?child_age = ?equiv_human_age))
}"""

#: (rodent, human) pairs whose ages align exactly under -3.5 + 0.5*age
EXPECTED_EXACT_PAIRS = {("R1", "H1"), ("R2", "H2")}


def build_fixture_store() -> GraphStore:
    store = GraphStore()
    rodent = transform(SourceTable.from_csv(RODENT_CSV), load_builtin_schema("rodent-imaging"))
    human = transform(SourceTable.from_csv(HUMAN_CSV), load_builtin_schema("human-assessment"))
    store.bulk_insert(FIXTURE_GRAPH, rodent)
    store.bulk_insert(FIXTURE_GRAPH, human)
    return store


@pytest.fixture()
def fixture_store() -> GraphStore:
    return build_fixture_store()


@pytest.fixture(scope="session")
def shared_fixture_store() -> GraphStore:
    """Read-only variant for tests that never mutate."""
    return build_fixture_store()
