import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semlink.namespaces import (
    NCIT,
    RDF_LANGSTRING,
    RDF_TYPE,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from semlink.terms import BlankNode, Iri, Literal, Triple
from semlink.turtle import ParseError, parse_turtle, serialize


def test_prefix_and_integer_abbreviation():
    doc = parse_turtle('@prefix ncit: <http://N#> . <http://ex/a1> ncit:age 12 .')
    assert doc.prefixes == [("ncit", "http://N#")]
    assert doc.triples == [
        Triple(Iri("http://ex/a1"), Iri("http://N#age"), Literal("12", XSD_INTEGER))
    ]


def test_predicate_list_shares_subject():
    text = (
        "@prefix prov: <http://www.w3.org/ns/prov#> .\n"
        f"@prefix ncit: <{NCIT}> .\n"
        '<http://ex/s> a prov:Agent ; ncit:species "Homo sapiens" .\n'
    )
    doc = parse_turtle(text)
    assert len(doc.triples) == 2
    assert {t.subject.value for t in doc.triples} == {"http://ex/s"}
    assert {t.predicate.value for t in doc.triples} == {RDF_TYPE, NCIT + "species"}


def test_object_list_and_comments():
    doc = parse_turtle(
        "# heading comment\n"
        "<http://ex/s> <http://ex/p> 1 , 2 , 3 . # trailing comment\n"
    )
    assert [t.object.lexical for t in doc.triples] == ["1", "2", "3"]


def test_undeclared_prefix_position():
    text = "@prefix a: <http://a#> .\n<http://ex/s> a:x 1 .\n<http://ex/t> foo:bar 2 .\n"
    with pytest.raises(ParseError) as err:
        parse_turtle(text)
    assert err.value.line == 3
    assert "foo" in err.value.message


def test_syntax_error_reports_injected_line():
    good = ["<http://ex/s%d> <http://ex/p> %d ." % (i, i) for i in range(6)]
    for bad_line in (2, 4, 6):
        lines = list(good)
        lines.insert(bad_line - 1, "<http://ex/broken> <http://ex/p ???")
        with pytest.raises(ParseError) as err:
            parse_turtle("\n".join(lines))
        assert err.value.line == bad_line


def test_string_escapes_round_trip():
    tricky = 'he said "hi"\\\n\ttab'
    triples = [Triple(Iri("http://ex/s"), Iri("http://ex/p"), Literal(tricky, XSD_STRING))]
    text = serialize(triples, {})
    assert parse_turtle(text).triples == triples


def test_unicode_escapes():
    doc = parse_turtle('<http://ex/s> <http://ex/p> "caf\\u00E9 \\U0001F600" .')
    assert doc.triples[0].object.lexical == "café 😀"


def test_typed_literals_language_tags_and_blanks():
    text = (
        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
        '_:b0 <http://ex/p> "2017-01-01"^^xsd:date .\n'
        '_:b0 <http://ex/q> "chat"@fr .\n'
        "_:b0 <http://ex/r> _:b1 .\n"
    )
    doc = parse_turtle(text)
    objects = {t.predicate.value: t.object for t in doc.triples}
    assert objects["http://ex/p"].datatype.endswith("date")
    assert objects["http://ex/q"] == Literal("chat", RDF_LANGSTRING, "fr")
    assert objects["http://ex/r"] == BlankNode("b1")
    assert all(t.subject == BlankNode("b0") for t in doc.triples)


def test_numeric_abbreviations():
    doc = parse_turtle("<http://ex/s> <http://ex/p> 5 , 5.5 , .5 , -2 , 1.5e3 , 2E-1 .")
    datatypes = [t.object.datatype for t in doc.triples]
    assert datatypes.count(XSD_INTEGER) == 2
    assert datatypes.count(XSD_DECIMAL) == 2
    assert datatypes.count(XSD_DOUBLE) == 2


def test_serialize_empty_is_prefixes_only():
    text = serialize([], {"ncit": "http://N#"})
    assert text.strip() == "@prefix ncit: <http://N#> ."
    assert parse_turtle(text).triples == []


def test_serializer_deterministic_and_grouped():
    triples = [
        Triple(Iri("http://ex/s"), Iri("http://N#age"), Literal("12", XSD_INTEGER)),
        Triple(Iri("http://ex/s"), Iri("http://N#age"), Literal("13", XSD_INTEGER)),
        Triple(Iri("http://ex/s"), Iri("http://N#name"), Literal("a b", XSD_STRING)),
    ]
    one = serialize(triples, {"ncit": "http://N#"})
    two = serialize(list(reversed(triples)), {"ncit": "http://N#"})
    assert one == two
    assert one.count("ncit:age 12, 13") == 1


def test_parse_is_pure():
    text = '<http://ex/s> <http://ex/p> "x" .'
    assert parse_turtle(text).triples == parse_turtle(text).triples


# -- randomized round-trip ---------------------------------------------------------


def random_turtle_graph(rng: random.Random, size: int) -> list[Triple]:
    subjects = [Iri(f"http://ex/s{i}") for i in range(8)] + [BlankNode(f"n{i}") for i in range(4)]
    predicates = [Iri(f"http://ex/p{i}") for i in range(5)] + [Iri(RDF_TYPE)]
    strings = ["", "plain", 'quote"d', "tab\t", "nl\n", "back\\slash", "café"]

    def random_object():
        roll = rng.random()
        if roll < 0.25:
            return rng.choice(subjects)
        if roll < 0.4:
            return Literal(str(rng.randrange(-50, 50)), XSD_INTEGER)
        if roll < 0.5:
            return Literal(f"{rng.randrange(0, 50)}.{rng.randrange(0, 100):02d}", XSD_DECIMAL)
        if roll < 0.6:
            return Literal(f"{rng.randrange(1, 9)}.{rng.randrange(0, 9)}e{rng.randrange(-3, 4)}", XSD_DOUBLE)
        if roll < 0.75:
            return Literal(rng.choice(strings), XSD_STRING)
        if roll < 0.85:
            return Literal(rng.choice(strings), RDF_LANGSTRING, rng.choice(["en", "fr", "en-US"]))
        return Literal(rng.choice(strings), f"http://ex/dt{rng.randrange(3)}")

    triples = set()
    while len(triples) < size:
        triples.add(Triple(rng.choice(subjects), rng.choice(predicates), random_object()))
    return list(triples)


def test_round_trip_large_random_graph():
    rng = random.Random(99)
    triples = random_turtle_graph(rng, 1000)
    text = serialize(triples, {"ex": "http://ex/", "rdf": RDF_TYPE.rsplit("#", 1)[0] + "#"})
    assert set(parse_turtle(text).triples) == set(triples)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_round_trip_property(seed, size):
    triples = random_turtle_graph(random.Random(seed), size)
    text = serialize(triples, {"ex": "http://ex/"})
    assert set(parse_turtle(text).triples) == set(triples)
