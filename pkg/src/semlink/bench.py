"""Query benchmark harness: graph synthesis, timed runs, log-log analysis.

Graphs are synthesized at exact triple counts by replicating subjects through
the built-in ETL schemas, so the standard queries return non-empty results at
every size. Timed runs execute strictly serially on one thread; each query
gets one untimed warm-up, then ``repetitions`` wall-clock-timed executions.
The analysis works on natural logarithms of time, graph size, and return-set
size, reporting the three pairwise correlations and the two-predictor OLS
fit (df = (2, n-3)).
"""

from __future__ import annotations

import csv
import io
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .etl import SourceTable, load_builtin_schema, transform
from .sparql import execute, parse_query, plan
from .stats import RegressionReport, fit_two_predictor
from .store import GraphStore

log = logging.getLogger(__name__)

_SHAPE_ALIASES = {
    "rodent": "rodent-imaging",
    "human": "human-assessment",
    "rodent-imaging": "rodent-imaging",
    "human-assessment": "human-assessment",
    "heart-rate": "heart-rate",
}

#: Default benchmark suite graph sizes (triples), smallest to largest.
DEFAULT_SUITE_SIZES = (1564, 13299, 20253, 54499, 96210, 1577291)


@dataclass(frozen=True)
class BenchmarkQuery:
    label: str
    text: str
    graph: str


@dataclass
class BenchmarkSpec:
    queries: list[BenchmarkQuery]
    repetitions: int = 10

    def __post_init__(self):
        if self.repetitions < 2:
            raise ValueError("repetitions must be >= 2 (sample SD is undefined below that)")


@dataclass(frozen=True)
class BenchmarkRecord:
    label: str
    graph_size: int
    return_size: int
    elapsed_ms: float


@dataclass(frozen=True)
class QuerySummary:
    label: str
    graph_size: int
    return_size: int
    mean_ms: float
    sd_ms: float


# -- graph synthesis -----------------------------------------------------------


def _rodent_row(i: int, rng: random.Random) -> dict[str, str]:
    return {
        "animalNumber": f"R{i:06d}",
        "species": "Sprague-Dawley",
        "age": str(7 + rng.randrange(0, 60)),
        "condition": "CES+" if rng.random() < 0.5 else "CES-",
        "roiLabel": rng.choice(("hippocampus", "amygdala", "cortex", "thalamus")),
        "sliceIndex": str(rng.randrange(0, 20)),
        "hemisphere": rng.choice(("L", "R")),
        "areaMm2": f"{rng.uniform(0.5, 30.0):.2f}",
        "faMean": f"{rng.uniform(0.1, 0.9):.3f}",
    }


def _human_row(i: int, rng: random.Random) -> dict[str, str]:
    return {
        "subjectID": f"H{i:06d}",
        "age": f"{rng.randrange(0, 200) / 10:.1f}",
    }


def _heart_rate_row(i: int, rng: random.Random) -> dict[str, str]:
    return {
        "subjectID": f"S{i // 4:06d}",
        "timepoint": str(i % 4),
        "bpm": f"{rng.randrange(550, 1100) / 10:.1f}",
    }


_ROW_MAKERS = {
    "rodent-imaging": _rodent_row,
    "human-assessment": _human_row,
    "heart-rate": _heart_rate_row,
}

_CHUNK_ROWS = 2000


def synth_graph(
    store: GraphStore,
    n_triples: int,
    shape: str,
    graph: Optional[str] = None,
    seed: int = 0,
) -> str:
    """Fill a named graph with exactly ``n_triples`` following a schema shape.

    Subjects are replicated (deterministically per seed) until the target
    count is reached; the final subject may be partial. Raises ValueError when
    the target is below one full replica of the template.
    """
    schema_name = _SHAPE_ALIASES.get(shape)
    if schema_name is None:
        raise ValueError(f"unknown shape {shape!r}; expected one of {sorted(set(_SHAPE_ALIASES))}")
    schema = load_builtin_schema(schema_name)
    row_maker = _ROW_MAKERS[schema_name]
    graph = graph or f"urn:graph:synth-{schema_name}-{n_triples}"
    rng = random.Random(seed)

    first = transform(SourceTable.from_records([row_maker(0, random.Random(seed))]), schema)
    template_min = len(set(first))
    if n_triples < template_min:
        raise ValueError(
            f"target {n_triples} is below the {schema_name} template minimum {template_min}"
        )

    next_index = 0
    while store.size(graph) < n_triples:
        rows = [row_maker(next_index + j, rng) for j in range(_CHUNK_ROWS)]
        next_index += _CHUNK_ROWS
        triples = transform(SourceTable.from_records(rows), schema, sort=False)
        _insert_up_to(store, graph, triples, n_triples)
    return graph


def synth_cross_species_graph(
    store: GraphStore,
    n_triples: int,
    graph: Optional[str] = None,
    seed: int = 0,
) -> str:
    """Mixed rodent + human graph sized exactly; halves the ages align.

    Every other human is given the age the default rodent-to-human map
    assigns to some rodent, so cross-species equivalence queries return rows
    at any size.
    """
    graph = graph or f"urn:graph:synth-cross-{n_triples}"
    rodent_schema = load_builtin_schema("rodent-imaging")
    human_schema = load_builtin_schema("human-assessment")
    rng = random.Random(seed)
    chunk = 64
    next_index = 0
    while store.size(graph) < n_triples:
        # interleave species row by row so truncation keeps both present
        triples = []
        for j in range(chunk):
            i = next_index + j
            rodent = _rodent_row(i, rng)
            if i % 2 == 0:
                # ages that land exactly on the rodent->human line
                age = -3.5 + 0.5 * int(rodent["age"])
                human = {"subjectID": f"H{i:06d}", "age": f"{max(age, 0.0):.1f}"}
            else:
                human = _human_row(i, rng)
            triples += transform(SourceTable.from_records([rodent]), rodent_schema, sort=False)
            triples += transform(SourceTable.from_records([human]), human_schema, sort=False)
        next_index += chunk
        _insert_up_to(store, graph, triples, n_triples)
    return graph


def _insert_up_to(store: GraphStore, graph: str, triples, target: int) -> None:
    """Bulk-insert under one write lock, stopping exactly at ``target`` triples."""
    with store.write():
        g = store._graphs.get(graph)
        size = g.size if g else 0
        for triple in triples:
            if size >= target:
                return
            if store._insert_unlocked(graph, triple):
                size += 1


# -- timed runs ------------------------------------------------------------------


def run_bench(store: GraphStore, spec: BenchmarkSpec) -> list[BenchmarkRecord]:
    """Per query: parse, plan, one untimed warm-up, then timed repetitions.

    A failing query is reported and skipped; the rest of the suite proceeds.
    The return set must be identical across repetitions (the store does not
    change underneath a benchmark).
    """
    records: list[BenchmarkRecord] = []
    for query in spec.queries:
        try:
            algebra = parse_query(query.text, prefixes=store.prefixes)
            query_plan = plan(algebra, store, graph=query.graph)
            warm = execute(query_plan, store)
        except Exception:
            log.exception("benchmark query %r failed; skipping", query.label)
            continue
        graph_size = store.size(query.graph)
        return_size = warm.row_count
        for _ in range(spec.repetitions):
            result = execute(query_plan, store)
            if result.row_count != return_size:
                raise RuntimeError(
                    f"return size changed between repetitions of {query.label!r}: "
                    f"{return_size} then {result.row_count}"
                )
            records.append(
                BenchmarkRecord(
                    label=query.label,
                    graph_size=graph_size,
                    return_size=return_size,
                    elapsed_ms=result.elapsed_ms,
                )
            )
    return records


def summarize(records: list[BenchmarkRecord]) -> list[QuerySummary]:
    """Per-label mean and sample SD (n-1 divisor), in first-seen label order."""
    import statistics

    order: list[str] = []
    by_label: dict[str, list[BenchmarkRecord]] = {}
    for record in records:
        if record.label not in by_label:
            by_label[record.label] = []
            order.append(record.label)
        by_label[record.label].append(record)
    summaries = []
    for label in order:
        group = by_label[label]
        if len(group) < 2:
            raise ValueError(f"label {label!r} needs >= 2 records for a summary")
        times = [r.elapsed_ms for r in group]
        summaries.append(
            QuerySummary(
                label=label,
                graph_size=group[0].graph_size,
                return_size=group[0].return_size,
                mean_ms=statistics.fmean(times),
                sd_ms=statistics.stdev(times),
            )
        )
    return summaries


def summary_table(summaries: list[QuerySummary]) -> str:
    header = f"{'Query':<32}{'Graph Size':>12}{'Return Set':>12}{'Mean (ms)':>12}{'SD (ms)':>10}"
    lines = [header, "-" * len(header)]
    for s in summaries:
        lines.append(
            f"{s.label:<32}{s.graph_size:>12}{s.return_size:>12}"
            f"{s.mean_ms:>12.1f}{s.sd_ms:>10.1f}"
        )
    return "\n".join(lines)


def analyze_loglog(records: list[BenchmarkRecord]) -> RegressionReport:
    """Natural-log transform, pairwise correlations, and the two-predictor OLS."""
    import math

    if len(records) < 4:
        raise ValueError(f"need at least 4 records, got {len(records)}")
    for i, record in enumerate(records):
        for field_name in ("graph_size", "return_size", "elapsed_ms"):
            value = getattr(record, field_name)
            if value <= 0:
                raise ValueError(
                    f"record {i} (label {record.label!r}): {field_name}={value} "
                    "must be strictly positive for the log transform"
                )
    log_size = [math.log(r.graph_size) for r in records]
    log_return = [math.log(r.return_size) for r in records]
    log_time = [math.log(r.elapsed_ms) for r in records]
    return fit_two_predictor(log_size, log_return, log_time)


# -- records CSV -----------------------------------------------------------------

_CSV_FIELDS = ("label", "graph_size", "return_size", "elapsed_ms")


def records_to_csv(records: list[BenchmarkRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(_CSV_FIELDS)
    for r in records:
        writer.writerow([r.label, r.graph_size, r.return_size, repr(r.elapsed_ms)])
    return out.getvalue()


def records_from_csv(text: str) -> list[BenchmarkRecord]:
    reader = csv.DictReader(io.StringIO(text))
    records = []
    for row in reader:
        records.append(
            BenchmarkRecord(
                label=row["label"],
                graph_size=int(row["graph_size"]),
                return_size=int(row["return_size"]),
                elapsed_ms=float(row["elapsed_ms"]),
            )
        )
    return records


def write_records(records: list[BenchmarkRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records), encoding="utf-8")


def read_records(path: str | Path) -> list[BenchmarkRecord]:
    return records_from_csv(Path(path).read_text(encoding="utf-8"))


# -- the default suite -------------------------------------------------------------

RODENT_DEMOGRAPHICS_QUERY = """SELECT ?rodent_id ?rodent_age WHERE {
  ?rod_agent a prov:Agent ;
      ncit:species "Sprague-Dawley" ;
      cuci:animalNumber ?rodent_id .
  ?demo_entity prov:wasGeneratedBy/prov:wasAssociatedWith ?rod_agent ;
      ncit:age ?rodent_age .
}"""

HEART_RATE_SINGLE_QUERY = """SELECT ?subject_id (AVG(?bpm) AS ?mean_bpm) WHERE {
  ?subject a prov:Agent ;
      ncit:subjectID ?subject_id .
  ?recording prov:wasAssociatedWith ?subject .
  ?sample prov:wasGeneratedBy ?recording ;
      cuci:timepoint 0 ;
      cuci:beatsPerMinute ?bpm .
} GROUP BY ?subject_id"""

HUMAN_ASSESSMENT_QUERY = """SELECT ?child_id ?child_age WHERE {
  ?agent_uri rdf:type prov:Agent ;
      ncit:species "Homo sapiens" ;
      ncit:subjectID ?child_id .
  ?activity_uri prov:wasAssociatedWith ?agent_uri .
  ?entity prov:wasGeneratedBy ?activity_uri ;
      ncit:age ?child_age .
}"""

HEART_RATE_ALL_QUERY = """SELECT ?subject_id (AVG(?bpm) AS ?mean_bpm) WHERE {
  ?subject a prov:Agent ;
      ncit:subjectID ?subject_id .
  ?recording prov:wasAssociatedWith ?subject .
  ?sample prov:wasGeneratedBy ?recording ;
      cuci:beatsPerMinute ?bpm .
} GROUP BY ?subject_id"""

RODENT_ROI_QUERY = """SELECT ?rodent_id ?roi ?slice ?area WHERE {
  ?stressor a cuci:EarlyLifeStressor ;
      cuci:condition "CES+" ;
      prov:wasAttributedTo ?rod_agent .
  ?rod_agent cuci:animalNumber ?rodent_id .
  ?roi_entity prov:wasGeneratedBy/prov:wasAssociatedWith ?rod_agent ;
      cuci:roiLabel ?roi ;
      cuci:sliceIndex ?slice ;
      cuci:areaMm2 ?area .
}"""

HUMAN_AGE_BAND_QUERY = """SELECT ?child_id ?child_age WHERE {
  ?agent_uri rdf:type prov:Agent ;
      ncit:species "Homo sapiens" ;
      ncit:subjectID ?child_id .
  ?activity_uri prov:wasAssociatedWith ?agent_uri .
  ?entity prov:wasGeneratedBy ?activity_uri ;
      ncit:age ?child_age .
  FILTER((?child_age >= 12.0) && (?child_age < 13.0))
}"""

_DEFAULT_SUITE = (
    ("rodent-demographics", "rodent-imaging", RODENT_DEMOGRAPHICS_QUERY),
    ("heart-rate-single-timepoint", "heart-rate", HEART_RATE_SINGLE_QUERY),
    ("human-assessment-all", "human-assessment", HUMAN_ASSESSMENT_QUERY),
    ("heart-rate-all-timepoints", "heart-rate", HEART_RATE_ALL_QUERY),
    ("rodent-roi-statistics", "rodent-imaging", RODENT_ROI_QUERY),
    ("human-assessment-age-band", "human-assessment", HUMAN_AGE_BAND_QUERY),
)


def default_suite(
    store: GraphStore,
    sizes: tuple[int, ...] = DEFAULT_SUITE_SIZES,
    repetitions: int = 10,
    seed: int = 0,
) -> BenchmarkSpec:
    """Synthesize the six standard graphs and return the matching spec."""
    if len(sizes) != len(_DEFAULT_SUITE):
        raise ValueError(f"expected {len(_DEFAULT_SUITE)} sizes, got {len(sizes)}")
    queries = []
    for (label, shape, text), size in zip(_DEFAULT_SUITE, sizes):
        graph = f"urn:graph:bench-{label}"
        synth_graph(store, size, shape, graph=graph, seed=seed)
        queries.append(BenchmarkQuery(label=label, text=text, graph=graph))
    return BenchmarkSpec(queries=queries, repetitions=repetitions)
