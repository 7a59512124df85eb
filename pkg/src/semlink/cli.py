"""Command-line entry points.

    semlink etl --schema S.json --input T.csv --graph IRI --out G.ttl
    semlink load FILE.ttl --graph IRI [--data DIR]
    semlink query FILE.rq [--data DIR] [--graph IRI] [--csv|--json]
    semlink bridge equivalents --map NAME --tolerance T [--data DIR]
    semlink bench run (--spec SPEC.json | --builtin) --out RECORDS.csv
    semlink bench analyze --in RECORDS.csv [--json-out REPORT.json]
    semlink serve --config SERVICE.json

``--data`` points at a store snapshot directory (one Turtle file per named
graph plus manifest.json); ``load`` creates it on first use.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import run_query
from .bench import (
    BenchmarkQuery,
    BenchmarkSpec,
    analyze_loglog,
    default_suite,
    read_records,
    run_bench,
    summarize,
    summary_table,
    synth_graph,
    write_records,
)
from .bridge import MapRegistry, default_registry, equivalent_subjects
from .etl import SourceTable, load_schema, transform
from .namespaces import DEFAULT_GRAPH
from .service import ServiceConfig, create_app, load_store_from_config
from .store import GraphStore
from .turtle import serialize


def _open_store(data_dir: str | None) -> GraphStore:
    if data_dir and (Path(data_dir) / "manifest.json").exists():
        return GraphStore.load(data_dir)
    return GraphStore()


def _registry_for(data_dir: str | None) -> MapRegistry:
    if data_dir:
        catalog = Path(data_dir) / "maps.json"
        if catalog.exists():
            return MapRegistry.load(catalog)
    return default_registry()


@click.group()
def main() -> None:
    """Semantic derived-data management."""


@main.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--graph", "graph_iri", default=DEFAULT_GRAPH, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def etl(schema_path: str, input_path: str, graph_iri: str, out_path: str) -> None:
    """Transform a CSV through an object-model schema into Turtle."""
    schema = load_schema(Path(schema_path).read_text(encoding="utf-8"))
    table = SourceTable.from_csv(Path(input_path).read_text(encoding="utf-8"))
    triples = transform(table, schema)
    Path(out_path).write_text(serialize(triples, schema.namespaces), encoding="utf-8")
    click.echo(f"wrote {len(triples)} triples for graph <{graph_iri}> to {out_path}")


@main.command()
@click.argument("ttl_file", type=click.Path(exists=True))
@click.option("--graph", "graph_iri", default=DEFAULT_GRAPH, show_default=True)
@click.option("--data", "data_dir", default="store", show_default=True)
def load(ttl_file: str, graph_iri: str, data_dir: str) -> None:
    """Load a Turtle file into a named graph of the store snapshot."""
    store = _open_store(data_dir)
    added = store.load_turtle(Path(ttl_file).read_text(encoding="utf-8"), graph=graph_iri)
    store.save(data_dir)
    click.echo(f"loaded {added} new triples into <{graph_iri}>; store saved to {data_dir}")


@main.command()
@click.argument("query_file", type=click.Path(exists=True))
@click.option("--data", "data_dir", default="store", show_default=True)
@click.option("--graph", "graph_iri", default=None, help="Restrict to one named graph.")
@click.option("--json", "as_json", is_flag=True, help="Emit a JSON table instead of CSV.")
def query(query_file: str, data_dir: str, graph_iri: str | None, as_json: bool) -> None:
    """Run a query file against the store snapshot."""
    store = _open_store(data_dir)
    table = run_query(store, Path(query_file).read_text(encoding="utf-8"), graph=graph_iri)
    if as_json:
        click.echo(json.dumps({"vars": table.vars, "rows": table.to_json_rows()}, indent=2))
    else:
        sys.stdout.write(table.to_csv())
    click.echo(f"# {table.row_count} rows in {table.elapsed_ms:.1f} ms", err=True)


@main.group()
def bridge() -> None:
    """Cross-species age mapping."""


@bridge.command()
@click.option("--map", "map_name", required=True)
@click.option("--tolerance", type=float, default=0.0, show_default=True)
@click.option("--data", "data_dir", default="store", show_default=True)
@click.option("--graph", "graph_iri", default=None)
def equivalents(map_name: str, tolerance: float, data_dir: str, graph_iri: str | None) -> None:
    """List cross-species subject pairs of equivalent age."""
    store = _open_store(data_dir)
    registry = _registry_for(data_dir)
    age_map = registry.get(map_name)
    pairs = equivalent_subjects(store, age_map, tolerance, graph=graph_iri)
    for p in pairs:
        click.echo(
            f"{p.from_subject}\t{p.from_age} {p.from_units}\t-> "
            f"{p.mapped_age:g} {p.mapped_units}\t{p.to_subject}\t{p.to_age} {p.to_units}"
        )
    click.echo(f"# {len(pairs)} pairs (map {map_name}, tolerance {tolerance})", err=True)


@main.group()
def bench() -> None:
    """Query benchmarking and analysis."""


@bench.command("run")
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None)
@click.option("--builtin", is_flag=True, help="Use the standard six-graph suite.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--data", "data_dir", default=None)
@click.option("--repetitions", type=int, default=None)
def bench_run(spec_path, builtin, out_path, data_dir, repetitions) -> None:
    """Execute a benchmark spec and write the timing records CSV."""
    if builtin == (spec_path is not None):
        raise click.UsageError("use exactly one of --spec or --builtin")
    if builtin:
        store = GraphStore()
        spec = default_suite(store, repetitions=repetitions or 10)
    else:
        raw = json.loads(Path(spec_path).read_text(encoding="utf-8"))
        store = _open_store(data_dir or raw.get("data_dir"))
        for synth in raw.get("synth", []):
            synth_graph(
                store,
                synth["triples"],
                synth["shape"],
                graph=synth.get("graph"),
                seed=synth.get("seed", 0),
            )
        queries = [
            BenchmarkQuery(q["label"], q["query"], q["graph"]) for q in raw["queries"]
        ]
        spec = BenchmarkSpec(queries, repetitions or raw.get("repetitions", 10))
    records = run_bench(store, spec)
    write_records(records, out_path)
    click.echo(summary_table(summarize(records)))
    click.echo(f"# {len(records)} records written to {out_path}", err=True)


@bench.command("analyze")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--json-out", "json_path", type=click.Path(), default=None)
def bench_analyze(in_path: str, json_path: str | None) -> None:
    """Log-log correlation and regression report over a records CSV."""
    records = read_records(in_path)
    click.echo(summary_table(summarize(records)))
    report = analyze_loglog(records)
    click.echo(report.to_text())
    if json_path:
        Path(json_path).write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
        click.echo(f"# report written to {json_path}", err=True)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path: str) -> None:
    """Serve the HTTP API per a JSON config file."""
    import uvicorn

    config = ServiceConfig.load(config_path)
    store = load_store_from_config(config)
    registry = _registry_for(config.data_dir)
    app = create_app(store=store, registry=registry, config=config)
    uvicorn.run(app, host="127.0.0.1", port=config.port)


if __name__ == "__main__":
    main()
