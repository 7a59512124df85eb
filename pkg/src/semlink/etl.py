"""Declarative tabular-to-PROV transformation.

An object-model schema maps CSV columns onto PROV nodes (entities,
activities, agents), their attributes, and the fixed PROV relations between
them. One engine interprets any number of schema documents; the built-in
schemas cover rodent imaging, human assessment, and heart-rate data.

Transformation is a pure function of (table, schema): per row, each node
template is instantiated into an IRI (placeholder cells percent-encoded),
typed with its PROV class plus any extra type assertions, given one triple
per non-blank attribute cell, and linked by the declared edges. Output is
sorted, so it is reproducible regardless of upstream parallelism.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional
from urllib.parse import quote

from .namespaces import DEFAULT_PREFIXES, PROV, RDF_TYPE, XSD
from .terms import Iri, Literal, TermError, Triple, triple_sort_key, validate_term

#: PROV relation -> (domain kind, range kind)
PROV_RELATIONS: dict[str, tuple[str, str]] = {
    "wasGeneratedBy": ("entity", "activity"),
    "wasAssociatedWith": ("activity", "agent"),
    "used": ("activity", "entity"),
    "wasAttributedTo": ("entity", "agent"),
    "actedOnBehalfOf": ("agent", "agent"),
}

PROV_CLASSES = {
    "entity": Iri(PROV + "Entity"),
    "activity": Iri(PROV + "Activity"),
    "agent": Iri(PROV + "Agent"),
}

_PLACEHOLDER = re.compile(r"\{([^{}]*)\}")

BUILTIN_SCHEMA_NAMES = ("rodent-imaging", "human-assessment", "heart-rate")


class SchemaValidationError(ValueError):
    """Schema rejected; carries every validation problem, not just the first."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class TransformError(ValueError):
    """Table/schema mismatch or row-level datatype coercion failure."""

    def __init__(self, message: str, row: Optional[int] = None,
                 column: Optional[str] = None, value: Optional[str] = None):
        super().__init__(message)
        self.row = row
        self.column = column
        self.value = value


@dataclass(frozen=True)
class AttributeTemplate:
    predicate: str  # qualified name
    column: Optional[str] = None
    constant: Optional[str] = None
    datatype: str = "xsd:string"
    label: str = ""
    definition: str = ""
    terminology: str = ""


@dataclass(frozen=True)
class NodeTemplate:
    id: str
    kind: str  # entity | activity | agent
    iri_template: str
    types: tuple[str, ...] = ()
    attributes: tuple[AttributeTemplate, ...] = ()
    optional: bool = False

    def placeholder_columns(self) -> list[str]:
        return _PLACEHOLDER.findall(self.iri_template)

    def required_columns(self) -> set[str]:
        columns = set(self.placeholder_columns())
        columns.update(a.column for a in self.attributes if a.column)
        return columns


@dataclass(frozen=True)
class EdgeTemplate:
    from_node: str
    relation: str
    to_node: str


@dataclass
class ObjectModelSchema:
    name: str
    namespaces: dict[str, str]
    nodes: list[NodeTemplate]
    edges: list[EdgeTemplate]

    def node(self, node_id: str) -> NodeTemplate:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def expand(self, qname: str) -> Iri:
        prefix, sep, local = qname.partition(":")
        if sep and prefix in self.namespaces:
            return Iri(self.namespaces[prefix] + local)
        raise SchemaValidationError([f"unresolvable qualified name {qname!r}"])


@dataclass
class SourceTable:
    header: list[str]
    rows: list[list[str]]

    @classmethod
    def from_csv(cls, text: str) -> "SourceTable":
        reader = csv.reader(io.StringIO(text))
        records = [row for row in reader]
        if not records:
            return cls(header=[], rows=[])
        header = records[0]
        rows = []
        for i, row in enumerate(records[1:], start=2):
            if len(row) != len(header):
                raise TransformError(
                    f"CSV line {i} has {len(row)} cells, header has {len(header)}",
                    row=i,
                )
            rows.append(row)
        return cls(header=header, rows=rows)

    @classmethod
    def from_records(cls, records: list[dict[str, str]]) -> "SourceTable":
        if not records:
            return cls(header=[], rows=[])
        header = list(records[0].keys())
        return cls(header=header, rows=[[r.get(c, "") for c in header] for r in records])


def load_schema(document: str | dict) -> ObjectModelSchema:
    """Parse and fully validate a schema document (JSON text or dict).

    All validation problems are collected and raised together in a single
    :class:`SchemaValidationError`. Placeholder columns are only checked at
    transform time, when a table header is available.
    """
    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaValidationError([f"invalid JSON: {exc}"]) from exc
    else:
        raw = document

    errors: list[str] = []
    name = raw.get("name") or ""
    if not name:
        errors.append("schema needs a non-empty 'name'")
    namespaces = dict(DEFAULT_PREFIXES)
    namespaces.update(raw.get("namespaces", {}))

    def check_qname(qname: str, context: str) -> None:
        prefix, sep, _ = qname.partition(":")
        if not sep:
            errors.append(f"{context}: {qname!r} is not a qualified name")
        elif prefix not in namespaces:
            errors.append(f"{context}: undeclared prefix {prefix!r} in {qname!r}")

    nodes: list[NodeTemplate] = []
    seen_ids: dict[str, int] = {}
    for i, node_raw in enumerate(raw.get("nodes", [])):
        node_id = node_raw.get("id") or f"<node {i}>"
        if node_id in seen_ids:
            errors.append(
                f"duplicate node id {node_id!r} (nodes {seen_ids[node_id]} and {i})"
            )
        seen_ids.setdefault(node_id, i)
        kind = node_raw.get("kind", "")
        if kind not in PROV_CLASSES:
            errors.append(f"node {node_id!r}: unknown kind {kind!r}")
        template = node_raw.get("iri_template", "")
        if not template:
            errors.append(f"node {node_id!r}: missing iri_template")
        if template.count("{") != template.count("}"):
            errors.append(f"node {node_id!r}: unbalanced braces in iri_template")
        types = tuple(node_raw.get("types", []))
        for qname in types:
            check_qname(qname, f"node {node_id!r} type")
        attributes = []
        for attr_raw in node_raw.get("attributes", []):
            predicate = attr_raw.get("predicate", "")
            check_qname(predicate, f"node {node_id!r} attribute")
            datatype = attr_raw.get("datatype", "xsd:string")
            check_qname(datatype, f"node {node_id!r} attribute {predicate!r} datatype")
            if not attr_raw.get("column") and attr_raw.get("constant") is None:
                errors.append(
                    f"node {node_id!r} attribute {predicate!r}: needs 'column' or 'constant'"
                )
            attributes.append(
                AttributeTemplate(
                    predicate=predicate,
                    column=attr_raw.get("column"),
                    constant=attr_raw.get("constant"),
                    datatype=datatype,
                    label=attr_raw.get("label", ""),
                    definition=attr_raw.get("definition", ""),
                    terminology=attr_raw.get("terminology", ""),
                )
            )
        nodes.append(
            NodeTemplate(
                id=node_id,
                kind=kind,
                iri_template=template,
                types=types,
                attributes=tuple(attributes),
                optional=bool(node_raw.get("optional", False)),
            )
        )

    node_kinds = {n.id: n.kind for n in nodes}
    edges: list[EdgeTemplate] = []
    for edge_raw in raw.get("edges", []):
        relation = edge_raw.get("relation", "")
        from_node = edge_raw.get("from", "")
        to_node = edge_raw.get("to", "")
        if relation not in PROV_RELATIONS:
            errors.append(f"unknown relation {relation!r}")
        for endpoint in (from_node, to_node):
            if endpoint not in node_kinds:
                errors.append(f"edge {relation!r}: unknown node {endpoint!r}")
        if relation in PROV_RELATIONS and from_node in node_kinds and to_node in node_kinds:
            domain, range_ = PROV_RELATIONS[relation]
            if node_kinds[from_node] != domain or node_kinds[to_node] != range_:
                errors.append(
                    f"edge {from_node!r} -{relation}-> {to_node!r} violates "
                    f"domain/range ({domain} -> {range_})"
                )
        edges.append(EdgeTemplate(from_node, relation, to_node))

    if errors:
        raise SchemaValidationError(errors)
    return ObjectModelSchema(name=name, namespaces=namespaces, nodes=nodes, edges=edges)


def _instantiate_iri(template: str, row: dict[str, str]) -> Iri:
    def substitute(match: re.Match) -> str:
        return quote(row.get(match.group(1), ""), safe="")

    return Iri(_PLACEHOLDER.sub(substitute, template))


def _coerce(cell: str, datatype_iri: str, row_num: int, column: str) -> Literal:
    literal = Literal(cell, datatype_iri)
    try:
        validate_term(literal)
    except TermError as exc:
        raise TransformError(
            f"row {row_num}, column {column!r}: cannot coerce {cell!r}: {exc}",
            row=row_num,
            column=column,
            value=cell,
        ) from exc
    return literal


def transform(table: SourceTable, schema: ObjectModelSchema, sort: bool = True) -> list[Triple]:
    """Instantiate the schema against every row; returns sorted triples.

    Nodes marked optional are skipped (with their edges) when the table lacks
    their columns; for required nodes a missing column is a schema/table
    mismatch raised before any output. Blank cells emit no attribute triple.
    ``sort=False`` keeps row order (bulk synthesis paths want subject-contiguous
    output); the default normalizes ordering for reproducible loads.
    """
    header = set(table.header)
    active_nodes: list[NodeTemplate] = []
    skipped: set[str] = set()
    for node in schema.nodes:
        missing = node.required_columns() - header
        if missing and node.optional:
            skipped.add(node.id)
            continue
        if missing:
            raise TransformError(
                f"schema {schema.name!r} node {node.id!r} needs missing "
                f"column(s): {', '.join(sorted(missing))}"
            )
        active_nodes.append(node)
    active_edges = [
        e for e in schema.edges if e.from_node not in skipped and e.to_node not in skipped
    ]

    rdf_type = Iri(RDF_TYPE)
    # Pre-expand all qualified names once; the row loop only formats and coerces.
    compiled = []
    for node in active_nodes:
        type_iris = [PROV_CLASSES[node.kind]] + [schema.expand(q) for q in node.types]
        attrs = [
            (attr, schema.expand(attr.predicate), schema.expand(attr.datatype).value)
            for attr in node.attributes
        ]
        compiled.append((node, type_iris, attrs))
    edge_iris = [(e.from_node, Iri(PROV + e.relation), e.to_node) for e in active_edges]

    triples: list[Triple] = []
    for row_index, cells in enumerate(table.rows, start=1):
        row = dict(zip(table.header, cells))
        iris: dict[str, Iri] = {}
        for node, type_iris, attrs in compiled:
            iri = _instantiate_iri(node.iri_template, row)
            iris[node.id] = iri
            for type_iri in type_iris:
                triples.append(Triple(iri, rdf_type, type_iri))
            for attr, predicate, datatype in attrs:
                if attr.column is not None:
                    cell = row.get(attr.column, "")
                    if cell == "":
                        continue
                else:
                    cell = attr.constant or ""
                literal = _coerce(cell, datatype, row_index, attr.column or "<constant>")
                triples.append(Triple(iri, predicate, literal))
        for from_id, relation, to_id in edge_iris:
            triples.append(Triple(iris[from_id], relation, iris[to_id]))
    if sort:
        triples.sort(key=triple_sort_key)
    return triples


def builtin_schemas() -> list[ObjectModelSchema]:
    """The schemas shipped with the package, loaded from their JSON documents."""
    return [load_builtin_schema(name) for name in BUILTIN_SCHEMA_NAMES]


def load_builtin_schema(name: str) -> ObjectModelSchema:
    if name not in BUILTIN_SCHEMA_NAMES:
        raise KeyError(f"no builtin schema named {name!r}")
    text = resources.files("semlink").joinpath(f"schemas/{name}.json").read_text("utf-8")
    return load_schema(text)


def schema_term_definitions(schema: ObjectModelSchema) -> list[dict]:
    """Tooltip records (qname, label, definition, terminology) from a schema."""
    out = []
    seen = set()
    for node in schema.nodes:
        for attr in node.attributes:
            if attr.predicate in seen or not attr.definition:
                continue
            seen.add(attr.predicate)
            out.append(
                {
                    "qname": attr.predicate,
                    "label": attr.label or attr.predicate.split(":", 1)[-1],
                    "definition": attr.definition,
                    "terminology": attr.terminology or "Project terminology",
                }
            )
    return out
