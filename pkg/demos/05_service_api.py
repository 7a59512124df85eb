"""The HTTP facade end to end, exercised in-process with a test client.

The same JSON API serves the browser console: subject union listing,
templated queries with reveal text and tooltip columns, cross-species
equivalence, and CSV export driven by checkbox-style selections.
"""

from fastapi.testclient import TestClient

from semlink import GraphStore
from semlink.etl import SourceTable, load_builtin_schema, transform
from semlink.service import create_app

store = GraphStore()
rodents = "animalNumber,species,age,condition,roiLabel,sliceIndex,hemisphere,areaMm2,faMean\n" \
          "R1,Sprague-Dawley,7,CES+,hippocampus,2,L,11.5,0.41\n" \
          "R2,Sprague-Dawley,31,CES-,cortex,5,R,14.0,0.39\n"
humans = "subjectID,age\nH1,0.0\nH2,12.0\n"
store.bulk_insert("urn:g", transform(SourceTable.from_csv(rodents), load_builtin_schema("rodent-imaging")))
store.bulk_insert("urn:g", transform(SourceTable.from_csv(humans), load_builtin_schema("human-assessment")))

client = TestClient(create_app(store=store))

print("--- GET /subjects ---")
for row in client.get("/subjects").json()["subjects"]:
    print(f"  {row['species']:<16} {row['id']:<4} data: {', '.join(row['data_types'])} ages: {row['ages']}")

print("\n--- POST /templates/rodent-demographics/run ---")
body = client.post("/templates/rodent-demographics/run", json={"params": {}}).json()
print(f"  {body['row_count']} rows in {body['elapsed_ms']:.1f} ms")
print("  revealed SPARQL (re-executable verbatim):")
for line in body["sparql"].splitlines():
    print("   |", line)
print("  tooltip columns:", {c["var"]: c["terminology"] for c in body["columns"]})

print("\n--- GET /terms/ncit:age ---")
print(" ", client.get("/terms/ncit:age").json())

print("\n--- POST /crossspecies ---")
pairs = client.post(
    "/crossspecies", json={"map": "rodent-to-human-linear", "tolerance": 0.0}
).json()["pairs"]
for p in pairs:
    print(f"  {p['from_subject']} ({p['from_age']:g}d) ~ {p['to_subject']} ({p['to_age']:g}y)")

print("\n--- POST /export (checkbox selection) ---")
response = client.post(
    "/export",
    json={"selection": {"subjects": ["R1", "H2"], "data_types": ["demographics"]}},
)
print(response.content.decode("utf-8"))
