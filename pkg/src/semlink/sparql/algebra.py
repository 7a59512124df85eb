"""Query algebra: the parsed, planner-ready form of a query.

The tree mirrors the usual SPARQL translation (BGPs joined left to right,
BIND as Extend, group filters applied around the group, then Group, OrderBy,
Project, Distinct, Slice). Sequence property paths are rewritten during
parsing into chains of triple patterns over fresh variables; rewritten
patterns keep a marker so plans can show the provenance.

Alongside the tree, :class:`QueryAlgebra` keeps the WHERE elements in textual
order — that is what the planner reorders and what defines the unoptimized
baseline plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..terms import Term


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Var, Term]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm
    from_path: bool = False

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object}"

    def variables(self) -> list[Var]:
        return [t for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)]


# -- expressions ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class VarExpr:
    var: Var

    def __str__(self) -> str:
        return str(self.var)


@dataclass(frozen=True, slots=True)
class ConstExpr:
    term: Term

    def __str__(self) -> str:
        return str(self.term)


@dataclass(frozen=True, slots=True)
class UnaryExpr:
    op: str  # '!' or '-'
    operand: "Expr"

    def __str__(self) -> str:
        return f"{self.op}({self.operand})"


@dataclass(frozen=True, slots=True)
class BinaryExpr:
    op: str  # comparison, arithmetic, or logical operator
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True, slots=True)
class IfExpr:
    condition: "Expr"
    then: "Expr"
    otherwise: "Expr"

    def __str__(self) -> str:
        return f"IF({self.condition}, {self.then}, {self.otherwise})"


Expr = Union[VarExpr, ConstExpr, UnaryExpr, BinaryExpr, IfExpr]


def expr_variables(expr: Expr) -> set[Var]:
    if isinstance(expr, VarExpr):
        return {expr.var}
    if isinstance(expr, ConstExpr):
        return set()
    if isinstance(expr, UnaryExpr):
        return expr_variables(expr.operand)
    if isinstance(expr, BinaryExpr):
        return expr_variables(expr.left) | expr_variables(expr.right)
    return (
        expr_variables(expr.condition)
        | expr_variables(expr.then)
        | expr_variables(expr.otherwise)
    )


# -- WHERE-clause elements in textual order ------------------------------------


@dataclass(frozen=True, slots=True)
class FilterOp:
    expr: Expr

    def __str__(self) -> str:
        return f"FILTER{self.expr}"


@dataclass(frozen=True, slots=True)
class ExtendOp:
    var: Var
    expr: Expr

    def __str__(self) -> str:
        return f"BIND({self.expr} AS {self.var})"


Element = Union[TriplePattern, FilterOp, ExtendOp]


# -- tree nodes -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class BGP:
    patterns: tuple[TriplePattern, ...]


@dataclass(frozen=True, slots=True)
class Join:
    left: "Node"
    right: "Node"


@dataclass(frozen=True, slots=True)
class Filter:
    expr: Expr
    input: "Node"


@dataclass(frozen=True, slots=True)
class Extend:
    var: Var
    expr: Expr
    input: "Node"


@dataclass(frozen=True, slots=True)
class AggregateSpec:
    func: str  # COUNT, SUM, AVG, MIN, MAX
    arg: Optional[Var]  # None for COUNT(*)
    alias: Var

    def __str__(self) -> str:
        inner = "*" if self.arg is None else str(self.arg)
        return f"({self.func}({inner}) AS {self.alias})"


@dataclass(frozen=True, slots=True)
class Group:
    keys: tuple[Var, ...]
    aggregates: tuple[AggregateSpec, ...]
    input: "Node"


@dataclass(frozen=True, slots=True)
class OrderCondition:
    expr: Expr
    ascending: bool = True


@dataclass(frozen=True, slots=True)
class OrderBy:
    conditions: tuple[OrderCondition, ...]
    input: "Node"


@dataclass(frozen=True, slots=True)
class Project:
    vars: tuple[Var, ...]
    input: "Node"


@dataclass(frozen=True, slots=True)
class Distinct:
    input: "Node"


@dataclass(frozen=True, slots=True)
class Slice:
    offset: int
    limit: Optional[int]
    input: "Node"


Node = Union[BGP, Join, Filter, Extend, Group, OrderBy, Project, Distinct, Slice]


def count_nodes(node: Node, kind: type) -> int:
    """Number of nodes of ``kind`` in the tree (used by structural tests)."""
    total = 1 if isinstance(node, kind) else 0
    for attr in ("input", "left", "right"):
        child = getattr(node, attr, None)
        if child is not None:
            total += count_nodes(child, kind)
    return total


@dataclass
class QueryAlgebra:
    """Parsed query: algebra tree plus the planner-facing flat form."""

    root: Node
    elements: list[Element] = field(default_factory=list)
    projection: list[Var] = field(default_factory=list)
    select_star: bool = False
    distinct: bool = False
    group_keys: list[Var] = field(default_factory=list)
    aggregates: list[AggregateSpec] = field(default_factory=list)
    order_by: list[OrderCondition] = field(default_factory=list)
    offset: int = 0
    limit: Optional[int] = None
    prefixes: dict[str, str] = field(default_factory=dict)
    text: str = ""

    @property
    def patterns(self) -> list[TriplePattern]:
        return [e for e in self.elements if isinstance(e, TriplePattern)]

    @property
    def filters(self) -> list[FilterOp]:
        return [e for e in self.elements if isinstance(e, FilterOp)]

    @property
    def extends(self) -> list[ExtendOp]:
        return [e for e in self.elements if isinstance(e, ExtendOp)]


def build_tree(algebra: QueryAlgebra) -> Node:
    """Assemble the algebra tree from the flat element list and modifiers.

    Adjacent triple patterns merge into one BGP; a BIND ends the current BGP
    (later patterns join against the extended relation); group FILTERs wrap
    the completed group, which is how a filter can reference a variable bound
    by a textually later BIND.
    """
    node: Optional[Node] = None
    batch: list[TriplePattern] = []
    filters: list[FilterOp] = []

    def flush() -> None:
        nonlocal node, batch
        if batch:
            bgp = BGP(tuple(batch))
            node = bgp if node is None else Join(node, bgp)
            batch = []

    for element in algebra.elements:
        if isinstance(element, TriplePattern):
            batch.append(element)
        elif isinstance(element, ExtendOp):
            flush()
            if node is None:
                node = BGP(())
            node = Extend(element.var, element.expr, node)
        else:
            filters.append(element)
    flush()
    if node is None:
        node = BGP(())
    for f in filters:
        node = Filter(f.expr, node)
    if algebra.group_keys or algebra.aggregates:
        node = Group(tuple(algebra.group_keys), tuple(algebra.aggregates), node)
    if algebra.order_by:
        node = OrderBy(tuple(algebra.order_by), node)
    node = Project(tuple(algebra.projection), node)
    if algebra.distinct:
        node = Distinct(node)
    if algebra.offset or algebra.limit is not None:
        node = Slice(algebra.offset, algebra.limit, node)
    return node
