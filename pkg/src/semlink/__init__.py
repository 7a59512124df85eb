"""semlink: semantic derived-data management.

A self-contained linked-data stack: an indexed in-memory RDF quad store with
Turtle persistence, a SPARQL-subset query engine with a cost-based join
optimizer, declarative PROV-shaped ETL for tabular derived data, cross-species
age mapping, a query benchmark harness with log-log regression analysis, and
an HTTP service exposing the whole thing to interactive clients.
"""

from .store import GraphStore, PrefixError
from .terms import BlankNode, Iri, Literal, Term, TermError, Triple
from .turtle import ParseError, TurtleDocument, parse_turtle, serialize
from .sparql import (
    Plan,
    QueryAlgebra,
    QuerySyntaxError,
    ResultTable,
    execute,
    explain,
    parse_query,
    plan,
)

__version__ = "0.1.0"

__all__ = [
    "GraphStore",
    "PrefixError",
    "Iri",
    "BlankNode",
    "Literal",
    "Term",
    "TermError",
    "Triple",
    "ParseError",
    "TurtleDocument",
    "parse_turtle",
    "serialize",
    "QueryAlgebra",
    "QuerySyntaxError",
    "Plan",
    "ResultTable",
    "parse_query",
    "plan",
    "execute",
    "explain",
    "run_query",
    "__version__",
]


def run_query(store: GraphStore, text: str, graph: str | None = None, optimize: bool = True) -> ResultTable:
    """Parse, plan, and execute a query in one call."""
    algebra = parse_query(text, prefixes=store.prefixes)
    return execute(plan(algebra, store, graph=graph, optimize=optimize), store)
