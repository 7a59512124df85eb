"""Store basics: named graphs, pattern matching, Turtle round-trips.

The store keeps every named graph in three orderings (subject-, predicate-,
and object-first) so any match pattern can start from its longest bound
prefix. Turtle is both the interchange format and the persistence format.
"""

import tempfile

from semlink import GraphStore, parse_turtle, serialize
from semlink.terms import Iri, Literal, Triple

store = GraphStore()

# Parse a small Turtle document. Prefixes declared in the document are merged
# into the store's prefix table; bare numbers become typed literals.
document = """
@prefix ncit: <http://ncicb.nci.nih.gov/xml/owl/EVS/Thesaurus.owl#> .
@prefix prov: <http://www.w3.org/ns/prov#> .

<http://example.org/data/rodent/R1>
    a prov:Agent ;
    ncit:species "Sprague-Dawley" .

<http://example.org/data/rodent/R1/demographics>
    ncit:age 31 ;
    prov:wasGeneratedBy <http://example.org/data/rodent/R1/assessment> .
"""
added = store.load_turtle(document, graph="urn:graph:demo")
print(f"loaded {added} triples")

# Pattern matching: None is a wildcard. Unknown graphs are empty, not errors.
species = store.expand("ncit:species")
for triple in store.match("urn:graph:demo", None, species, None):
    print("species triple:", triple.subject.value, "->", triple.object.lexical)

print("whole graph:", store.count("urn:graph:demo"), "triples")
print("age triples:", store.count(None, None, store.expand("ncit:age"), None))

# Inserting the same triple twice is a no-op (set semantics).
fact = Triple(
    Iri("http://example.org/data/rodent/R1"),
    store.expand("ncit:age"),
    Literal("31", store.expand("xsd:integer").value),
)
print("first insert:", store.insert("urn:graph:demo", fact))
print("second insert:", store.insert("urn:graph:demo", fact))

# Serialization is deterministic (sorted), and parse(serialize(G)) == G.
text = serialize(store.match("urn:graph:demo"), store.prefixes)
print("\n--- serialized graph ---")
print(text)
assert set(parse_turtle(text).triples) == set(store.match("urn:graph:demo"))

# Snapshot persistence: one Turtle file per named graph plus a manifest.
with tempfile.TemporaryDirectory() as snapshot_dir:
    store.save(snapshot_dir)
    restored = GraphStore.load(snapshot_dir)
    assert set(restored.match("urn:graph:demo")) == set(store.match("urn:graph:demo"))
    print("snapshot restored:", restored.size("urn:graph:demo"), "triples")
