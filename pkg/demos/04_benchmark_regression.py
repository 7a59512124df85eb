"""Benchmark methodology: timed repeated queries and log-log regression.

Synthesizes graphs at chosen sizes, runs each query ten times after a
warm-up, summarizes mean +/- sample SD per query, and regresses log time on
log graph size and log return size (two predictors + intercept, so df is
(2, n-3)). At the published sizes this takes a couple of minutes; this demo
uses scaled-down graphs.
"""

from semlink import GraphStore
from semlink.bench import (
    BenchmarkQuery,
    BenchmarkSpec,
    HEART_RATE_ALL_QUERY,
    HUMAN_ASSESSMENT_QUERY,
    RODENT_DEMOGRAPHICS_QUERY,
    analyze_loglog,
    run_bench,
    summarize,
    summary_table,
    synth_graph,
)

store = GraphStore()
suite = [
    ("rodents-small", "rodent", RODENT_DEMOGRAPHICS_QUERY, 1_564),
    ("humans-medium", "human", HUMAN_ASSESSMENT_QUERY, 20_253),
    ("heart-rate-medium", "heart-rate", HEART_RATE_ALL_QUERY, 54_499),
    ("humans-large", "human", HUMAN_ASSESSMENT_QUERY, 96_210),
]
queries = []
for label, shape, text, size in suite:
    graph = synth_graph(store, size, shape, graph=f"urn:bench:{label}", seed=7)
    print(f"synthesized {store.size(graph):>6} triples for {label}")
    queries.append(BenchmarkQuery(label=label, text=text, graph=graph))

records = run_bench(store, BenchmarkSpec(queries=queries, repetitions=10))
print(f"\n{len(records)} records (4 queries x 10 repetitions)\n")
print(summary_table(summarize(records)))

report = analyze_loglog(records)
print("\n--- log-log analysis ---")
print(report.to_text())
