"""Record service responses as fixtures for the web console's test suite.

Runs the real app factory over the standard cross-species fixture store and
captures the JSON/CSV payloads the UI consumes, so `npm test` in frontend/
exercises byte-exact service behavior without a running Python process.
Re-run after changing the service:  python3 tools/export_ui_fixtures.py
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from conftest import CROSS_SPECIES_QUERY, build_fixture_store  # noqa: E402

from semlink.service import create_app  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app(store=build_fixture_store()))

    def save_json(name: str, payload) -> None:
        (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")

    save_json("subjects.json", client.get("/subjects").json())
    save_json("templates.json", client.get("/templates").json())
    save_json("maps.json", client.get("/maps").json())
    save_json("term_age.json", client.get("/terms/ncit:age").json())

    run = client.post("/templates/rodent-demographics/run", json={"params": {}}).json()
    save_json("template_run.json", run)
    save_json("query_rerun.json", client.post("/query", json={"sparql": run["sparql"]}).json())

    save_json(
        "crossspecies.json",
        client.post(
            "/crossspecies", json={"map": "rodent-to-human-linear", "tolerance": 0.0}
        ).json(),
    )

    selection = {"selection": {"subjects": ["R1"], "data_types": ["demographics"]}}
    save_json("export_selection_request.json", selection)
    (OUT / "export_selection.csv").write_bytes(client.post("/export", json=selection).content)

    union = {
        "selection": {"subjects": ["R1", "H2"], "data_types": ["demographics", "roi-statistics"]}
    }
    save_json("export_union_request.json", union)
    (OUT / "export_union.csv").write_bytes(client.post("/export", json=union).content)
    per_type_counts = {}
    for data_type in union["selection"]["data_types"]:
        single = {"selection": {"subjects": union["selection"]["subjects"], "data_types": [data_type]}}
        body = client.post("/export", json=single).content.decode("utf-8")
        per_type_counts[data_type] = sum(1 for line in body.splitlines()[1:] if line.strip())
    save_json("export_union_counts.json", per_type_counts)

    export_query = {"sparql": CROSS_SPECIES_QUERY}
    save_json("export_query_request.json", export_query)
    (OUT / "export_query.csv").write_bytes(client.post("/export", json=export_query).content)
    save_json(
        "cross_species_query_result.json",
        client.post("/query", json={"sparql": CROSS_SPECIES_QUERY}).json(),
    )

    bad = client.post("/query", json={"sparql": "SELECT ?x WHERE { ?x ncit:age }"})
    save_json("parse_error.json", {"status": bad.status_code, "body": bad.json()})

    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
