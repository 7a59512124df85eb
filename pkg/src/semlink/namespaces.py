"""Fixed namespace registry shared by the store, ETL schemas, and queries.

All project vocabularies resolve through this single table so that graphs
written by the ETL, queries typed by users, and persisted Turtle files agree
on term IRIs.
"""

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD = "http://www.w3.org/2001/XMLSchema#"
PROV = "http://www.w3.org/ns/prov#"

# NCI Thesaurus, used for general subject/assessment attributes.
NCIT = "http://ncicb.nci.nih.gov/xml/owl/EVS/Thesaurus.owl#"

# Project-local terms that have no equivalent in an existing terminology.
CUCI = "http://example.org/ns/cuci#"

# Base IRI for instance data minted by the ETL.
DATA = "http://example.org/data/"

#: Prefixes registered on every new store and assumed by query parsing when a
#: query does not declare its own.
DEFAULT_PREFIXES: dict[str, str] = {
    "rdf": RDF,
    "xsd": XSD,
    "prov": PROV,
    "ncit": NCIT,
    "cuci": CUCI,
    "data": DATA,
}

#: Graph IRI used when a document is loaded without naming a graph.
DEFAULT_GRAPH = "urn:graph:default"

RDF_TYPE = RDF + "type"
RDF_LANGSTRING = RDF + "langString"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"

PROV_ENTITY = PROV + "Entity"
PROV_ACTIVITY = PROV + "Activity"
PROV_AGENT = PROV + "Agent"
