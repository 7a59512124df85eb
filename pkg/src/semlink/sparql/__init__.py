"""SPARQL-subset query engine: parser, planner, executor, explain."""

from .algebra import QueryAlgebra, Var
from .parser import QuerySyntaxError, parse_query
from .planner import Plan, explain, plan
from .executor import ResultTable, execute

__all__ = [
    "QueryAlgebra",
    "Var",
    "QuerySyntaxError",
    "parse_query",
    "Plan",
    "plan",
    "explain",
    "execute",
    "ResultTable",
]
