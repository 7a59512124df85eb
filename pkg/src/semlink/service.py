"""HTTP facade over the store, query engine, ETL vocabulary, and age maps.

JSON API consumed by the web console (and anything else):

    GET  /subjects                   union listing of all agents
    POST /query {sparql}             ad-hoc query; echoes the executed text
    GET  /templates                  templated queries with parameter slots
    POST /templates/{id}/run {params}
    GET  /terms/{qname}              tooltip definition for a vocabulary term
    GET  /maps                       registered age maps with citations
    POST /crossspecies {map, tolerance}
    POST /export {sparql | selection}  text/csv download

The result-size cap (config, default 100,000 rows) turns runaway queries into
a 400 advising LIMIT rather than an unbounded response.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from .bench import (
    HEART_RATE_ALL_QUERY,
    HUMAN_ASSESSMENT_QUERY,
    RODENT_DEMOGRAPHICS_QUERY,
)
from .bridge import MapRegistry, default_registry, equivalent_subjects
from .etl import builtin_schemas, schema_term_definitions
from .namespaces import PROV_AGENT, RDF_TYPE
from .sparql import QuerySyntaxError, ResultTable, execute, parse_query, plan
from .store import GraphStore, PrefixError
from .terms import Iri, Literal

DEFAULT_RESULT_CAP = 100_000


@dataclass
class ServiceConfig:
    port: int = 8080
    data_dir: Optional[str] = None
    result_cap: int = DEFAULT_RESULT_CAP
    graphs: dict[str, str] = field(default_factory=dict)  # graph IRI -> ttl path

    @classmethod
    def load(cls, path: str | Path) -> "ServiceConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            port=raw.get("port", 8080),
            data_dir=raw.get("data_dir"),
            result_cap=raw.get("result_cap", DEFAULT_RESULT_CAP),
            graphs=raw.get("graphs", {}),
        )


@dataclass(frozen=True)
class TermDefinition:
    qname: str
    label: str
    definition: str
    terminology: str


_CORE_DEFINITIONS = [
    TermDefinition("rdf:type", "type", "Asserts the class of a resource.", "RDF vocabulary"),
    TermDefinition(
        "prov:wasGeneratedBy",
        "was generated by",
        "Links an entity to the activity that produced it.",
        "W3C PROV",
    ),
    TermDefinition(
        "prov:wasAssociatedWith",
        "was associated with",
        "Links an activity to the agent responsible for it.",
        "W3C PROV",
    ),
    TermDefinition(
        "prov:used",
        "used",
        "Links an activity to an entity it consumed.",
        "W3C PROV",
    ),
    TermDefinition(
        "prov:wasAttributedTo",
        "was attributed to",
        "Links an entity to the agent it is ascribed to.",
        "W3C PROV",
    ),
]


def build_definitions() -> dict[str, TermDefinition]:
    """Tooltip registry: core PROV/RDF terms plus every built-in schema attribute."""
    registry = {d.qname: d for d in _CORE_DEFINITIONS}
    for schema in builtin_schemas():
        for record in schema_term_definitions(schema):
            registry.setdefault(record["qname"], TermDefinition(**record))
    return registry


@dataclass(frozen=True)
class TemplateSlot:
    name: str
    type: str = "string"
    required: bool = False


@dataclass(frozen=True)
class QueryTemplate:
    """A published query with optional subject filtering.

    ``filter_var`` names the projected variable an optional subject filter
    applies to; ``var_terms`` maps projected variables to vocabulary terms so
    the UI can attach tooltip definitions to result columns.
    """

    id: str
    model: str
    description: str
    text: str
    filter_var: Optional[str] = None
    var_terms: dict[str, str] = field(default_factory=dict)

    @property
    def slots(self) -> list[TemplateSlot]:
        if self.filter_var is None:
            return []
        return [TemplateSlot(name="subject_id", type="string", required=False)]

    def instantiate(self, params: dict[str, str], subjects: Optional[list[str]] = None) -> str:
        unknown = set(params) - {s.name for s in self.slots}
        if unknown:
            raise KeyError(f"unknown template parameter(s): {', '.join(sorted(unknown))}")
        ids = list(subjects or [])
        if params.get("subject_id"):
            ids.append(params["subject_id"])
        if not ids:
            return self.text
        quoted = [f'(?{self.filter_var} = "{_escape(v)}")' for v in ids]
        clause = f"  FILTER({' || '.join(quoted)})\n"
        closing = self.text.rstrip()
        brace = closing.rfind("}")
        return closing[:brace] + clause + closing[brace:]


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


ROI_STATISTICS_QUERY = """SELECT ?rodent_id ?roi ?slice ?area WHERE {
  ?rod_agent a prov:Agent ;
      ncit:species "Sprague-Dawley" ;
      cuci:animalNumber ?rodent_id .
  ?roi_entity prov:wasGeneratedBy/prov:wasAssociatedWith ?rod_agent ;
      cuci:roiLabel ?roi ;
      cuci:sliceIndex ?slice ;
      cuci:areaMm2 ?area .
}"""

HEART_RATE_SAMPLES_QUERY = """SELECT ?subject_id ?timepoint ?bpm WHERE {
  ?subject a prov:Agent ;
      ncit:subjectID ?subject_id .
  ?recording prov:wasAssociatedWith ?subject .
  ?sample prov:wasGeneratedBy ?recording ;
      cuci:timepoint ?timepoint ;
      cuci:beatsPerMinute ?bpm .
}"""


def builtin_templates() -> list[QueryTemplate]:
    return [
        QueryTemplate(
            id="rodent-demographics",
            model="rodent-imaging",
            description="Rodent subjects with their recorded ages (postnatal days).",
            text=RODENT_DEMOGRAPHICS_QUERY,
            filter_var="rodent_id",
            var_terms={"rodent_id": "cuci:animalNumber", "rodent_age": "ncit:age"},
        ),
        QueryTemplate(
            id="human-assessments",
            model="human-assessment",
            description="Human subjects with their assessment ages (postnatal years).",
            text=HUMAN_ASSESSMENT_QUERY,
            filter_var="child_id",
            var_terms={"child_id": "ncit:subjectID", "child_age": "ncit:age"},
        ),
        QueryTemplate(
            id="roi-statistics",
            model="rodent-imaging",
            description="Region-of-interest tracing statistics per subject and slice.",
            text=ROI_STATISTICS_QUERY,
            filter_var="rodent_id",
            var_terms={
                "rodent_id": "cuci:animalNumber",
                "roi": "cuci:roiLabel",
                "slice": "cuci:sliceIndex",
                "area": "cuci:areaMm2",
            },
        ),
        QueryTemplate(
            id="heart-rate-samples",
            model="heart-rate",
            description="Raw heart-rate samples per subject and time point.",
            text=HEART_RATE_SAMPLES_QUERY,
            filter_var="subject_id",
            var_terms={
                "subject_id": "ncit:subjectID",
                "timepoint": "cuci:timepoint",
                "bpm": "cuci:beatsPerMinute",
            },
        ),
        QueryTemplate(
            id="heart-rate-summary",
            model="heart-rate",
            description="Per-subject mean heart rate, computed at query time.",
            text=HEART_RATE_ALL_QUERY,
            filter_var="subject_id",
            var_terms={"subject_id": "ncit:subjectID", "bpm": "cuci:beatsPerMinute"},
        ),
    ]


#: data type name -> templates whose rows constitute that data type
DATA_TYPE_TEMPLATES = {
    "demographics": ("rodent-demographics", "human-assessments"),
    "roi-statistics": ("roi-statistics",),
    "heart-rate": ("heart-rate-samples",),
}


# -- subject listing -------------------------------------------------------------


def _is_number(lex: str) -> bool:
    try:
        float(lex)
        return True
    except ValueError:
        return False


def list_subjects(store: GraphStore) -> list[dict]:
    """One row per agent: id, species, available data types, ages.

    Availability is detected from the schema-shaped subgraphs that reference
    the agent (an age-bearing entity for demographics, tracing statistics for
    roi-statistics, a beats-per-minute sample for heart-rate).
    """
    rdf_type = Iri(RDF_TYPE)
    prov_agent = Iri(PROV_AGENT)
    species_p = store.expand("ncit:species")
    animal_p = store.expand("cuci:animalNumber")
    subject_p = store.expand("ncit:subjectID")
    age_p = store.expand("ncit:age")
    assoc_p = store.expand("prov:wasAssociatedWith")
    gen_p = store.expand("prov:wasGeneratedBy")
    area_p = store.expand("cuci:areaMm2")
    fa_p = store.expand("cuci:faMean")
    bpm_p = store.expand("cuci:beatsPerMinute")

    rows = []
    for triple in store.match(None, None, rdf_type, prov_agent):
        agent = triple.subject
        species = sorted(
            t.object.lexical for t in store.match(None, agent, species_p, None)
            if isinstance(t.object, Literal)
        )
        ids = [t.object.lexical for t in store.match(None, agent, animal_p, None)]
        ids += [t.object.lexical for t in store.match(None, agent, subject_p, None)]
        subject_id = sorted(ids)[0] if ids else str(agent)

        ages: list = []
        data_types: set[str] = set()
        for assoc in store.match(None, None, assoc_p, agent):
            activity = assoc.subject
            for gen in store.match(None, None, gen_p, activity):
                entity = gen.subject
                for t in store.match(None, entity, age_p, None):
                    data_types.add("demographics")
                    ages.append(t.object.lexical)
                if store.count(None, entity, area_p, None) or store.count(None, entity, fa_p, None):
                    data_types.add("roi-statistics")
                if store.count(None, entity, bpm_p, None):
                    data_types.add("heart-rate")
        ages.sort(key=lambda lex: (float(lex), lex) if _is_number(lex) else (float("inf"), lex))
        rows.append(
            {
                "id": subject_id,
                "species": species[0] if species else "",
                "data_types": sorted(data_types),
                "ages": ages,
            }
        )
    rows.sort(key=lambda r: (r["species"], r["id"]))
    return rows


# -- request bodies ----------------------------------------------------------------


class QueryRequest(BaseModel):
    sparql: str


class TemplateRunRequest(BaseModel):
    params: dict[str, str] = {}


class CrossSpeciesRequest(BaseModel):
    map: str
    tolerance: float = 0.0


class SelectionRequest(BaseModel):
    subjects: list[str] = []
    data_types: list[str] = []


class ExportRequest(BaseModel):
    sparql: Optional[str] = None
    selection: Optional[SelectionRequest] = None


# -- app ----------------------------------------------------------------------------


def create_app(
    store: Optional[GraphStore] = None,
    registry: Optional[MapRegistry] = None,
    config: Optional[ServiceConfig] = None,
) -> FastAPI:
    store = store if store is not None else GraphStore()
    registry = registry if registry is not None else default_registry()
    config = config if config is not None else ServiceConfig()
    templates = {t.id: t for t in builtin_templates()}
    definitions = build_definitions()

    app = FastAPI(title="semlink", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store
    app.state.registry = registry
    app.state.config = config

    def run_text(text: str) -> ResultTable:
        try:
            algebra = parse_query(text, prefixes=store.prefixes)
        except QuerySyntaxError as exc:
            raise HTTPException(
                status_code=400,
                detail={
                    "error": "parse",
                    "line": exc.line,
                    "column": exc.column,
                    "message": exc.message,
                    "token": exc.token,
                },
            ) from exc
        except PrefixError as exc:
            raise HTTPException(
                status_code=400, detail={"error": "parse", "message": str(exc)}
            ) from exc
        table = execute(plan(algebra, store), store)
        if table.row_count > config.result_cap:
            raise HTTPException(
                status_code=400,
                detail={
                    "error": "result-cap",
                    "message": (
                        f"result has {table.row_count} rows, over the cap of "
                        f"{config.result_cap}; narrow the query or add LIMIT"
                    ),
                },
            )
        return table

    def table_payload(table: ResultTable, text: str, template: Optional[QueryTemplate] = None):
        payload = {
            "vars": table.vars,
            "rows": table.to_json_rows(),
            "row_count": table.row_count,
            "elapsed_ms": table.elapsed_ms,
            "sparql": text,
        }
        if template is not None:
            columns = []
            for var in table.vars:
                qname = template.var_terms.get(var)
                definition = definitions.get(qname) if qname else None
                if definition is not None:
                    columns.append(asdict(definition) | {"var": var})
            payload["columns"] = columns
        return payload

    @app.get("/subjects")
    def subjects():
        rows = list_subjects(store)
        return {"subjects": rows, "count": len(rows)}

    @app.post("/query")
    def query(body: QueryRequest):
        table = run_text(body.sparql)
        return table_payload(table, body.sparql)

    @app.get("/templates")
    def get_templates():
        return {
            "templates": [
                {
                    "id": t.id,
                    "model": t.model,
                    "description": t.description,
                    "slots": [asdict(s) for s in t.slots],
                    "sparql": t.text,
                }
                for t in templates.values()
            ]
        }

    @app.post("/templates/{template_id}/run")
    def run_template(template_id: str, body: TemplateRunRequest):
        template = templates.get(template_id)
        if template is None:
            raise HTTPException(status_code=404, detail=f"no template {template_id!r}")
        try:
            text = template.instantiate(body.params)
        except KeyError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        table = run_text(text)
        return table_payload(table, text, template)

    @app.get("/terms/{qname}")
    def term(qname: str):
        definition = definitions.get(qname)
        if definition is None:
            raise HTTPException(status_code=404, detail=f"no definition for {qname!r}")
        return asdict(definition)

    @app.get("/maps")
    def maps():
        return {"maps": [asdict(m) for m in registry.list()]}

    @app.post("/crossspecies")
    def crossspecies(body: CrossSpeciesRequest):
        try:
            age_map = registry.get(body.map)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        try:
            pairs = equivalent_subjects(store, age_map, body.tolerance)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "map": body.map,
            "tolerance": body.tolerance,
            "pairs": [asdict(p) for p in pairs],
            "count": len(pairs),
        }

    @app.post("/export")
    def export(body: ExportRequest):
        if body.sparql is not None:
            table = run_text(body.sparql)
            csv_text = table.to_csv()
        elif body.selection is not None:
            csv_text = _export_selection(body.selection)
        else:
            raise HTTPException(status_code=400, detail="provide 'sparql' or 'selection'")
        return Response(
            content=csv_text,
            media_type="text/csv",
            headers={"Content-Disposition": 'attachment; filename="export.csv"'},
        )

    def _export_selection(selection: SelectionRequest) -> str:
        if not selection.subjects or not selection.data_types:
            raise HTTPException(
                status_code=400, detail="selection needs at least one subject and one data type"
            )
        unknown = [d for d in selection.data_types if d not in DATA_TYPE_TEMPLATES]
        if unknown:
            raise HTTPException(
                status_code=400,
                detail=f"unknown data type(s): {', '.join(sorted(unknown))}; "
                f"known: {', '.join(sorted(DATA_TYPE_TEMPLATES))}",
            )
        runs: list[tuple[str, ResultTable]] = []
        header: list[str] = ["data_type"]
        for data_type in sorted(selection.data_types):
            for template_id in DATA_TYPE_TEMPLATES[data_type]:
                template = templates[template_id]
                text = template.instantiate({}, subjects=selection.subjects)
                table = run_text(text)
                runs.append((data_type, table))
                for var in table.vars:
                    if var not in header:
                        header.append(var)
        import csv as _csv
        import io as _io

        out = _io.StringIO()
        writer = _csv.writer(out, lineterminator="\r\n")
        writer.writerow(header)
        for data_type, table in runs:
            positions = {var: header.index(var) for var in table.vars}
            for row in table.rows:
                cells = [""] * len(header)
                cells[0] = data_type
                for var, term in zip(table.vars, row):
                    if term is None:
                        continue
                    cells[positions[var]] = (
                        term.lexical if isinstance(term, Literal) else
                        term.value if isinstance(term, Iri) else f"_:{term.label}"
                    )
                writer.writerow(cells)
        return out.getvalue()

    return app


def load_store_from_config(config: ServiceConfig) -> GraphStore:
    """Store per config: restore the data_dir snapshot, then load extra graphs."""
    if config.data_dir and (Path(config.data_dir) / "manifest.json").exists():
        store = GraphStore.load(config.data_dir)
    else:
        store = GraphStore()
    for graph_iri, ttl_path in config.graphs.items():
        store.load_turtle(Path(ttl_path).read_text(encoding="utf-8"), graph=graph_iri)
    return store
