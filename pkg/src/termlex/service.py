"""HTTP service exposing the annotation workflow to the browser UI.

State is plain files under a data directory: manifest.json plus one
labels/<rater_id>.csv per rater, in the same format the CLI reads, so
the service and the kappa/export commands always agree. A submission is
acknowledged only after its row is fsynced (write-then-acknowledge);
resubmitting an identical record is a no-op, which makes client-side
offline queues safe to flush after reconnects.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import agreement as agreement_mod
from .annotations import (
    AnnotationRecord,
    append_annotation,
    load_manifest,
    merge_raters,
    parse_annotations,
)
from .errors import TermlexError

_RATER_ID_RE = re.compile(r"^[A-Za-z0-9._-]{1,64}$")


@dataclass
class ServiceConfig:
    data_dir: Path
    schema: str = "V2"
    raters: tuple[str, ...] | None = None  # optional allowlist
    static_dir: str | Path | None = None


class _Incomplete(Exception):
    def __init__(self, progress: dict, total: int):
        self.progress = progress
        self.total = total
        super().__init__("annotation incomplete")


class AnnotationStore:
    """File-backed store for one annotation campaign."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.manifest = load_manifest(self.data_dir / "manifest.json")
        self.labels_dir = self.data_dir / "labels"
        self.labels_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _rater_path(self, rater_id: str) -> Path:
        return self.labels_dir / f"{rater_id}.csv"

    def check_rater(self, rater_id: str) -> None:
        if not _RATER_ID_RE.fullmatch(rater_id or ""):
            raise TermlexError(
                "rater_id must be 1-64 characters of letters, digits, . _ -"
            )
        if self.config.raters is not None and rater_id not in self.config.raters:
            raise KeyError(rater_id)

    def records_for(self, rater_id: str) -> list[AnnotationRecord]:
        path = self._rater_path(rater_id)
        if not path.exists():
            return []
        return parse_annotations(path, self.config.schema)

    def known_raters(self) -> list[str]:
        if self.config.raters is not None:
            return sorted(self.config.raters)
        return sorted(p.stem for p in self.labels_dir.glob("*.csv"))

    def progress(self) -> dict:
        with self._lock:
            per_rater = {
                rater: len(self.records_for(rater)) for rater in self.known_raters()
            }
        return {"total": self.manifest.size, "raters": per_rater}

    def unlabeled_terms(self, rater_id: str) -> list[str]:
        with self._lock:
            done = {r.term for r in self.records_for(rater_id)}
        return [t for t in self.manifest.terms if t not in done]

    def submit(self, record: AnnotationRecord) -> str:
        """Persist one record; returns 'ok' or 'duplicate' (idempotent)."""
        if record.schema != self.config.schema:
            raise TermlexError(
                f"service runs schema {self.config.schema}, record is {record.schema}"
            )
        self.check_rater(record.rater_id)
        if record.term not in self.manifest.terms:
            raise KeyError(record.term)
        with self._lock:
            existing = {r.term: r for r in self.records_for(record.rater_id)}
            if record.term in existing:
                if existing[record.term] == record:
                    return "duplicate"
                raise FileExistsError(record.term)
            append_annotation(record, self._rater_path(record.rater_id))
        return "ok"

    def agreement(self, mapping: str, subset_size: int | None = None) -> dict:
        with self._lock:
            raters = self.known_raters()
            per_rater = {rater: self.records_for(rater) for rater in raters}
        progress = {rater: len(records) for rater, records in per_rater.items()}
        total = self.manifest.size
        if len(raters) < 2 or any(count < total for count in progress.values()):
            raise _Incomplete(progress, total)
        all_records = [rec for records in per_rater.values() for rec in records]
        matrix = merge_raters(all_records, self.manifest)
        report = agreement_mod.agreement_for(matrix, mapping)
        payload = {"kappa": report.kappa, "report": report.to_dict()}
        if subset_size is not None:
            subsets = agreement_mod.kappa_subsets(matrix, mapping, subset_size)
            payload["subsets"] = [
                {"raters": list(r), "kappa": k} for r, k in subsets
            ]
            best = subsets[0]
            payload["best_subset"] = {"raters": list(best[0]), "kappa": best[1]}
        return payload


def record_to_json(record: AnnotationRecord) -> dict:
    obj = {"rater_id": record.rater_id, "term": record.term, "schema": record.schema}
    if record.schema == "V1":
        obj["categories"] = list(record.v1_categories)
    else:
        obj["class"] = record.v2_class
        obj["tags"] = sorted(record.v2_tags)
    return obj


def record_from_json(obj) -> AnnotationRecord:
    if not isinstance(obj, dict):
        raise TermlexError("body must be a JSON object")
    for name in ("rater_id", "term", "schema"):
        if not isinstance(obj.get(name), str) or not obj.get(name):
            raise TermlexError(f"field '{name}' must be a non-empty string")
    schema = obj["schema"]
    if schema == "V1":
        categories = obj.get("categories")
        if not isinstance(categories, list) or not all(isinstance(c, str) for c in categories):
            raise TermlexError("field 'categories' must be a list of strings")
        return AnnotationRecord(
            rater_id=obj["rater_id"],
            term=obj["term"],
            schema="V1",
            v1_categories=tuple(categories),
        )
    if schema == "V2":
        if not isinstance(obj.get("class"), str):
            raise TermlexError("field 'class' must be a string")
        tags = obj.get("tags", [])
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise TermlexError("field 'tags' must be a list of strings")
        return AnnotationRecord(
            rater_id=obj["rater_id"],
            term=obj["term"],
            schema="V2",
            v2_class=obj["class"],
            v2_tags=frozenset(tags),
        )
    raise TermlexError(f"field 'schema' must be V1 or V2, got {schema!r}")


def create_app(config: ServiceConfig) -> FastAPI:
    store = AnnotationStore(config)
    app = FastAPI(title="termlex annotation service")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/api/manifest")
    def get_manifest():
        m = store.manifest
        return {
            "sample_id": m.sample_id,
            "seed": m.seed,
            "size": m.size,
            "ranking_digest": m.ranking_digest,
            "terms": m.terms,
            "schema": store.config.schema,
        }

    @app.get("/api/terms")
    def get_terms(rater: str = Query(...)):
        try:
            store.check_rater(rater)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown rater {rater!r}")
        except TermlexError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"rater_id": rater, "terms": store.unlabeled_terms(rater)}

    @app.get("/api/labels")
    def get_labels(rater: str = Query(...)):
        try:
            store.check_rater(rater)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown rater {rater!r}")
        except TermlexError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        records = store.records_for(rater)
        return {"rater_id": rater, "records": [record_to_json(r) for r in records]}

    @app.post("/api/labels")
    def post_label(body: dict):
        try:
            record = record_from_json(body)
            status = store.submit(record)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=f"unknown rater or term: {exc}")
        except FileExistsError as exc:
            raise HTTPException(
                status_code=409,
                detail=f"term {exc} already labeled differently by this rater",
            )
        except TermlexError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"status": status}

    @app.get("/api/agreement")
    def get_agreement(mapping: str = Query(...), subset_size: int | None = Query(None)):
        try:
            return store.agreement(mapping, subset_size)
        except _Incomplete as inc:
            return JSONResponse(
                status_code=409,
                content={
                    "detail": "annotation incomplete",
                    "total": inc.total,
                    "raters": inc.progress,
                },
            )
        except TermlexError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/api/progress")
    def get_progress():
        return store.progress()

    if config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.static_dir), html=True), name="ui")

    return app


def serve(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8765) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
