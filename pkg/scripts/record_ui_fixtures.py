#!/usr/bin/env python3
"""Record real service responses as JSON fixtures for the dashboard tests.

Builds a demo workspace in a temp directory, replays the bundled feeds,
then walks the moderation flow against the in-process API and freezes
every response the frontend contract tests rely on. Rerun after any API
change: the dashboard renders these payloads verbatim.
"""

import dataclasses
import json
import shutil
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from disinfotriage import demo, ingest, pipeline, service
from disinfotriage.store import Archive, model_load

OUT = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"


def build_state(root: Path):
    demo.make_workspace(root)
    cfg = pipeline.load_config(root / "config.conf")
    admitter = ingest.Admitter(window=cfg.dedup_window())
    candidates = list(ingest.candidate_stream(cfg.feeds(), admitter))
    archive = Archive(cfg.archive)
    queue = pipeline.ModerationQueue(cfg.queue)
    asn_table, geo_table = cfg.load_tables()
    pipeline.run_pipeline(
        candidates,
        transport=cfg.make_transport(),
        forest=model_load(cfg.model),
        archive=archive,
        queue=queue,
        asn_table=asn_table,
        geo_table=geo_table,
        workers=cfg.workers,
    )
    archive.close()
    return cfg


def dump_json(name: str, payload) -> None:
    (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def dump_text(name: str, text: str) -> None:
    (OUT / name).write_text(text)


def main() -> int:
    if OUT.exists():
        shutil.rmtree(OUT)
    OUT.mkdir(parents=True)

    with tempfile.TemporaryDirectory() as tmp:
        cfg = build_state(Path(tmp))
        client = TestClient(service.create_app(cfg))

        queue = client.get("/api/queue", params={"state": "pending"}).json()
        dump_json("queue_pending.json", queue)
        pending_ids = [item["id"] for item in queue["items"]]

        for item in queue["items"]:
            dump_json(f"detail_{item['id']}.json", client.get(f"/api/queue/{item['id']}").json())
            dump_json(
                f"record_{item['domain']}.json",
                client.get(f"/api/records/{item['domain']}").json(),
            )

        dump_json("stats.json", client.get("/api/stats").json())
        dump_text("feed_initial.txt", client.get("/feed.txt").text)

        first, second = pending_ids[0], pending_ids[1]
        res = client.post(
            f"/api/queue/{first}/verdict",
            json={"label": "disinformation", "note": "confirmed: recycled bylines, template reuse"},
        )
        assert res.status_code == 200, res.text
        dump_json("verdict_disinformation.json", res.json())
        dump_text("feed_after_disinformation.txt", client.get("/feed.txt").text)
        dump_json(f"detail_{first}_labeled.json", client.get(f"/api/queue/{first}").json())

        conflict = client.post(
            f"/api/queue/{first}/verdict", json={"label": "other", "note": ""}
        )
        assert conflict.status_code == 409, conflict.text
        dump_json("verdict_conflict.json", conflict.json())

        res = client.post(f"/api/queue/{second}/verdict", json={"label": "news", "note": ""})
        assert res.status_code == 200, res.text
        dump_json("verdict_news.json", res.json())
        dump_text("feed_after_news.txt", client.get("/feed.txt").text)

        dump_json("queue_after.json", client.get("/api/queue", params={"state": "pending"}).json())

        dump_json(
            "manifest.json",
            {
                "pending_ids": pending_ids,
                "domains": {str(i["id"]): i["domain"] for i in queue["items"]},
                "disinformation_verdict_id": first,
                "news_verdict_id": second,
                "statuses": {"verdict_conflict.json": 409},
            },
        )

    names = sorted(p.name for p in OUT.iterdir())
    print(f"recorded {len(names)} fixtures in {OUT}:")
    for name in names:
        print(f"  {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
