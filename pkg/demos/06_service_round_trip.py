"""Boot the HTTP service in-process and exercise its three endpoints.

Equivalent to running ``agriqa serve`` and curling it, but self-contained:
ask twice (with and without rephrasing), then read the history and health.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from agriqa.config import AppConfig
from agriqa.service import create_app

with tempfile.TemporaryDirectory() as tmp:
    config = AppConfig(log_path=Path(tmp) / "queries.jsonl")
    with TestClient(create_app(config)) as client:
        for query, rephrase in [("paddy top dressing", True),
                                ("leaf folder control paddy", False)]:
            body = client.post("/v1/ask", json={"query": query, "rephrase": rephrase}).json()
            print(f"POST /v1/ask {query!r}")
            print(f"  raw:       {body['raw_answer']}")
            print(f"  rephrased: {body['rephrased_answer']}")
            print(f"  status:    {body['rephrase_status']}")
            print()

        history = client.get("/v1/history", params={"limit": 10}).json()
        print(f"GET /v1/history -> {len(history)} entries, newest first:")
        for entry in history:
            print(f"  {entry['id']}  {entry['request']['query']}")

        print(f"\nGET /v1/health -> {client.get('/v1/health').json()}")
        print(f"\nquery log on disk: {config.log_path.read_text().count(chr(10))} lines")
