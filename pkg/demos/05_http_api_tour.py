"""A tour of the HTTP API without leaving the process.

Drives the FastAPI application through an in-process client: upload a CSV,
submit a run, poll its progress, open a mock-backed chat session on the
result, and download the session archive. The same endpoints back the
browser dashboard (see frontend/) and are served by `gp4nldr serve`.
"""

import time

from fastapi.testclient import TestClient

from gp4nldr import wine_dataset
from gp4nldr.data import dataset_to_csv
from gp4nldr.service import create_app

client = TestClient(create_app())

csv_text = dataset_to_csv(wine_dataset()).decode("utf-8")
dataset = client.post(
    "/api/datasets",
    json={"csv": csv_text, "name": "Wine", "label_column": "class"},
).json()
print(f"uploaded dataset {dataset['id']}: {dataset['num_instances']} x "
      f"{dataset['num_features']}")

job_id = client.post(
    "/api/runs",
    json={
        "dataset_id": dataset["id"],
        "config": {
            "population_size": 40,
            "generations": 25,
            "final_dimensions": 2,
            "fitness_id": "gpmal",
            "bloat": {"method": "lexicographic"},
            "seed": 3,
        },
    },
).json()["job_id"]
print(f"submitted run {job_id}")

while True:
    job = client.get(f"/api/runs/{job_id}").json()
    print(f"  state={job['state']} progress={job['progress']}/{job['generations_total']}")
    if job["state"] in ("done", "failed"):
        break
    time.sleep(0.5)

result = client.get(f"/api/runs/{job_id}/result").json()
print("expressions:")
for i, expression in enumerate(result["expressions"], start=1):
    print(f"  dimension {i}: {expression}")
print(f"accuracies: {result['accuracies']}")

session = client.post(
    "/api/chat/sessions", json={"job_id": job_id, "provider": "mock"}
).json()
print(f"\nchat session {session['session_id']} opened; first exchange:")
print(f"  human: {session['messages'][0]['text']}")

answer = client.post(
    f"/api/chat/sessions/{session['session_id']}/messages",
    json={"question": "which features matter most?"},
).json()["answer"]
print(f"  ai (mock): {answer[:70]}...")

archive = client.get(f"/api/chat/sessions/{session['session_id']}/export")
print(f"\nexported archive: {len(archive.content)} bytes "
      f"(re-import with POST /api/sessions/import)")
