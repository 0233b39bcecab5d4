"""HTTP API over the persisted run store, plus on-demand scoring.

Endpoints (JSON, UTF-8):

    GET  /api/health
    GET  /api/events?since=ISO8601
    GET  /api/events/{id}
    POST /api/score        {"title"?: str, "text": str}

The store is read through an immutable snapshot that is swapped atomically
when ``latest.json`` changes, so a batch completing mid-request never
yields a torn view.  Pull-mode submissions are never persisted.
"""
from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import AppConfig
from .corpus import parse_timestamp
from .model import Model, load_model, score_text
from .runner import LATEST_POINTER

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunSnapshot:
    run_id: str
    manifest: dict
    events: dict[str, dict]  # event id -> persisted event document

    def summaries(self) -> list[dict]:
        rows = []
        for entry in self.manifest.get("events", []):
            doc = self.events[entry["id"]]
            members = doc.get("members", [])
            rows.append(
                {
                    "id": doc["id"],
                    "window": doc["window"],
                    "member_count": doc["member_count"],
                    "headline": members[0]["title"] if members else "",
                }
            )
        # newest first; within one run all windows match, so id breaks ties
        rows.sort(key=lambda r: (r["window"]["end"], r["id"]), reverse=True)
        return rows


class RunStore:
    """Loads the latest persisted run; reloads happen off to the side and
    swap in atomically."""

    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self._snapshot: RunSnapshot | None = None
        self._lock = threading.Lock()

    def _latest_run_id(self) -> str | None:
        pointer = self.data_dir / LATEST_POINTER
        if not pointer.exists():
            return None
        try:
            return json.loads(pointer.read_text(encoding="utf-8")).get("run_id")
        except (OSError, json.JSONDecodeError):
            logger.warning("unreadable %s", pointer)
            return None

    def _load_run(self, run_id: str) -> RunSnapshot:
        run_dir = self.data_dir / "runs" / run_id
        manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
        events = {}
        for entry in manifest.get("events", []):
            doc = json.loads((run_dir / entry["file"]).read_text(encoding="utf-8"))
            events[doc["id"]] = doc
        return RunSnapshot(run_id=run_id, manifest=manifest, events=events)

    def snapshot(self) -> RunSnapshot | None:
        """Current snapshot, refreshed when the latest pointer moved."""
        run_id = self._latest_run_id()
        current = self._snapshot
        if run_id is None:
            return current
        if current is not None and current.run_id == run_id:
            return current
        with self._lock:
            # somebody else may have finished the reload while we waited
            current = self._snapshot
            if current is not None and current.run_id == run_id:
                return current
            loaded = self._load_run(run_id)
            self._snapshot = loaded
            return loaded


class ScoreRequest(BaseModel):
    text: str = ""
    title: str | None = None


def create_app(
    config: AppConfig | None = None,
    model: Model | None = None,
    store: RunStore | None = None,
) -> FastAPI:
    config = config or AppConfig()
    if model is None and config.service.model_path:
        model = load_model(config.service.model_path)
    store = store or RunStore(config.resolved_data_dir())

    app = FastAPI(title="newswatch", docs_url=None, redoc_url=None)
    app.state.model = model
    app.state.store = store

    @app.exception_handler(HTTPException)
    async def _http_error(_request: Request, exc: HTTPException):
        return JSONResponse(status_code=exc.status_code, content={"error": str(exc.detail)})

    @app.get("/api/health")
    def health():
        snap = store.snapshot()
        return {
            "status": "ok",
            "run_id": snap.run_id if snap else None,
            "model_loaded": app.state.model is not None,
        }

    @app.get("/api/events")
    def events(since: str | None = None):
        snap = store.snapshot()
        if snap is None:
            return []
        rows = snap.summaries()
        if since:
            try:
                cutoff = parse_timestamp(since)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=f"bad since timestamp: {exc}")
            rows = [r for r in rows if parse_timestamp(r["window"]["end"]) > cutoff]
        return rows

    @app.get("/api/events/{event_id}")
    def event_detail(event_id: str):
        snap = store.snapshot()
        if snap is None or event_id not in snap.events:
            raise HTTPException(status_code=404, detail=f"unknown event id: {event_id}")
        return snap.events[event_id]

    @app.post("/api/score")
    def score(payload: ScoreRequest):
        if app.state.model is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        text = payload.text or ""
        if not text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        if len(text.encode("utf-8")) > config.service.max_score_bytes:
            raise HTTPException(
                status_code=413,
                detail=f"text exceeds {config.service.max_score_bytes} bytes",
            )
        index, bucket, contributions = score_text(app.state.model, text, payload.title)
        return {
            "propaganda_index": index,
            "bin": bucket,
            "family_contributions": contributions,
        }

    webui_dir = config.service.webui_dir
    if webui_dir and Path(webui_dir).is_dir():
        app.mount("/", StaticFiles(directory=webui_dir, html=True), name="webui")

    return app


def serve(config: AppConfig, host: str = "127.0.0.1") -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=host, port=config.service.port, log_level="info")
