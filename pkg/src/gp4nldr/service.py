"""HTTP API: datasets, background evolutionary runs, examples, chat sessions.

State lives in memory (plus the example archives bundled as package
assets): a dataset registry, a job registry executing runs on a small
worker pool, and a chat-session registry. All error responses share the
shape ``{"code": ..., "message": ..., "field"?: ...}``.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import llm_client
from .archive import ArchiveError, SessionArchive, VersionMismatch
from .data import Dataset, DatasetError, load_csv
from .evolution import BloatControl, RunConfig, RunResult, run_experiment
from .explain import (
    DEFAULT_WORD_LIMIT,
    ChatSession,
    advance_session,
    load_rag_settings,
)
from .rag import VectorStore, build_store_from_dir

__all__ = ["app", "create_app"]

EXAMPLE_IDS = ("wine", "dermatology", "coil20")
ENV_BACKGROUND_DIR = "GP4NLDR_BACKGROUND_DIR"

_CONFIG_FIELDS = (
    "population_size",
    "generations",
    "final_dimensions",
    "fitness_id",
    "seed",
    "max_depth",
    "tournament_size",
    "crossover_rate",
    "mutation_rate",
    "elitism_count",
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field

    def body(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.field:
            body["field"] = self.field
        return body


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Job:
    id: str
    state: str = "queued"  # queued -> running -> done | failed
    progress: int = 0
    generations_total: int = 0
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)
    fitness_history: list[float] = field(default_factory=list)
    result: RunResult | None = None
    error: str | None = None


@dataclass
class SessionState:
    session: ChatSession
    result: RunResult
    provider: Any
    lock: threading.Lock = field(default_factory=threading.Lock)


class DatasetUpload(BaseModel):
    csv: str
    name: str = "dataset"
    has_header: bool = True
    label_column: int | str = "last"


class BloatBody(BaseModel):
    method: str = "none"
    order_fitness_first: bool = True
    p_smaller: float = 0.7
    p_tarpeian: float = 0.3


class RunConfigBody(BaseModel):
    population_size: int = 100
    generations: int = 100
    final_dimensions: int = 2
    fitness_id: str = "gpmal"
    bloat: BloatBody = BloatBody()
    seed: int = 0
    max_depth: int = 8
    tournament_size: int = 7
    crossover_rate: float = 0.8
    mutation_rate: float = 0.15
    elitism_count: int = 1


class RunSubmission(BaseModel):
    dataset_id: str
    config: RunConfigBody = RunConfigBody()


class SessionRequest(BaseModel):
    job_id: str | None = None
    example_id: str | None = None
    word_limit: int = DEFAULT_WORD_LIMIT
    model_id: str = llm_client.DEFAULT_MODEL
    provider: str = "http"  # "http" | "mock"
    api_key: str | None = None
    base_url: str | None = None
    mock_script: list[str] | None = None


class QuestionBody(BaseModel):
    question: str


def _build_config(body: RunConfigBody) -> RunConfig:
    try:
        bloat = BloatControl(
            method=body.bloat.method,
            order_fitness_first=body.bloat.order_fitness_first,
            p_smaller=body.bloat.p_smaller,
            p_tarpeian=body.bloat.p_tarpeian,
        )
        return RunConfig(
            population_size=body.population_size,
            generations=body.generations,
            final_dimensions=body.final_dimensions,
            fitness_id=body.fitness_id,
            bloat=bloat,
            seed=body.seed,
            max_depth=body.max_depth,
            tournament_size=body.tournament_size,
            crossover_rate=body.crossover_rate,
            mutation_rate=body.mutation_rate,
            elitism_count=body.elitism_count,
        )
    except ValueError as exc:
        message = str(exc)
        field_name = next(
            (f for f in _CONFIG_FIELDS if message.startswith(f)), None
        )
        if field_name is None and any(
            hint in message for hint in ("bloat", "p_smaller", "p_tarpeian")
        ):
            field_name = "bloat"
        raise ApiError(400, "invalid_config", message, field=field_name) from exc


def _result_summary(result: RunResult) -> dict:
    return {
        "dataset_name": result.dataset_name,
        "final_dimensions": result.config.final_dimensions,
        "fitness_id": result.config.fitness_id,
        "generations": result.config.generations,
        "population_size": result.config.population_size,
        "bloat_method": result.config.bloat.method,
        "best_fitness": result.best_individual.fitness,
        "accuracy_original": result.accuracy_original,
        "accuracy_embedding": result.accuracy_embedding,
    }


def _session_payload(session_id: str, state: SessionState) -> dict:
    return {
        "session_id": session_id,
        "run_ref": state.session.run_ref,
        "word_limit": state.session.word_limit,
        "model_id": state.session.model_id,
        "messages": [
            {"role": m.role, "text": m.text, "timestamp": m.timestamp}
            for m in state.session.messages
        ],
    }


def create_app(
    *,
    background_dir: str | None = None,
    max_concurrent_jobs: int = 2,
    ui_dir: str | None = None,
) -> FastAPI:
    """Build a fresh application with empty registries.

    ``ui_dir`` (a directory holding the built dashboard's index.html)
    is mounted at the root so the browser app shares the API's origin.
    """
    app = FastAPI(title="gp4nldr", version="0.1.0")

    datasets: dict[str, Dataset] = {}
    jobs: dict[str, Job] = {}
    sessions: dict[str, SessionState] = {}
    examples: dict[str, SessionArchive] = {}
    registry_lock = threading.Lock()
    job_semaphore = threading.Semaphore(max_concurrent_jobs)
    store_holder: dict[str, VectorStore] = {}

    def background_store() -> VectorStore:
        if "store" not in store_holder:
            settings = load_rag_settings()
            directory = background_dir or os.environ.get(ENV_BACKGROUND_DIR)
            if directory is None:
                directory = str(resources.files("gp4nldr").joinpath("assets/background"))
            store_holder["store"] = build_store_from_dir(
                directory, settings.chunk_chars, settings.overlap_chars
            )
        return store_holder["store"]

    def load_example(example_id: str) -> SessionArchive:
        if example_id not in EXAMPLE_IDS:
            raise ApiError(404, "not_found", f"unknown example {example_id!r}")
        if example_id not in examples:
            try:
                payload = (
                    resources.files("gp4nldr")
                    .joinpath(f"assets/examples/{example_id}.json")
                    .read_bytes()
                )
            except FileNotFoundError:
                raise ApiError(
                    404, "not_found", f"example {example_id!r} asset is missing"
                ) from None
            examples[example_id] = SessionArchive.from_bytes(payload)
        return examples[example_id]

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = [str(part) for part in first.get("loc", []) if part != "body"]
        return JSONResponse(
            status_code=400,
            content={
                "code": "invalid_request",
                "message": first.get("msg", "invalid request"),
                "field": ".".join(loc) or None,
            },
        )

    @app.exception_handler(llm_client.ProviderError)
    async def handle_provider_error(request: Request, exc: llm_client.ProviderError):
        mapping = {
            llm_client.AuthFailure: (401, "auth_failure"),
            llm_client.RateLimited: (429, "rate_limited"),
            llm_client.ProviderTimeout: (504, "timeout"),
            llm_client.MalformedResponse: (502, "malformed_response"),
        }
        status, code = mapping.get(type(exc), (502, "provider_error"))
        return JSONResponse(status_code=status, content={"code": code, "message": str(exc)})

    # ---------------------------------------------------------------- datasets

    @app.post("/api/datasets")
    def upload_dataset(body: DatasetUpload):
        try:
            dataset = load_csv(
                body.csv,
                has_header=body.has_header,
                label_column=body.label_column,
                name=body.name,
            )
        except DatasetError as exc:
            raise ApiError(400, "invalid_dataset", str(exc)) from exc
        with registry_lock:
            dataset_id = f"ds-{len(datasets) + 1}"
            datasets[dataset_id] = dataset
        return {
            "id": dataset_id,
            "name": dataset.name,
            "num_instances": dataset.num_instances,
            "num_features": dataset.num_features,
            "feature_names": list(dataset.feature_names),
            "class_names": list(dataset.class_names),
        }

    def get_dataset(dataset_id: str) -> Dataset:
        dataset = datasets.get(dataset_id)
        if dataset is None:
            raise ApiError(404, "not_found", f"unknown dataset {dataset_id!r}")
        return dataset

    @app.get("/api/datasets/{dataset_id}/preview")
    def preview_dataset(dataset_id: str):
        dataset = get_dataset(dataset_id)
        head = slice(0, 10)
        return {
            "name": dataset.name,
            "feature_names": list(dataset.feature_names),
            "rows": np.asarray(dataset.rows[head]).tolist(),
            "scaled": np.asarray(dataset.scaled[head]).tolist(),
            "labels": list(dataset.labels[head]),
            "num_instances": dataset.num_instances,
            "num_features": dataset.num_features,
        }

    # -------------------------------------------------------------------- runs

    def execute_job(job: Job, dataset: Dataset, config: RunConfig) -> None:
        with job_semaphore:
            with registry_lock:
                job.state = "running"
                job.updated_at = _now()

            def on_progress(done: int, best: float) -> None:
                with registry_lock:
                    job.progress = done
                    job.fitness_history.append(best)
                    job.updated_at = _now()

            try:
                result = run_experiment(dataset, config, progress=on_progress)
            except Exception as exc:  # surfaced via the job record
                with registry_lock:
                    job.state = "failed"
                    job.error = str(exc)
                    job.updated_at = _now()
                return
            with registry_lock:
                job.state = "done"
                job.result = result
                job.updated_at = _now()

    @app.post("/api/runs", status_code=202)
    def submit_run(body: RunSubmission):
        dataset = get_dataset(body.dataset_id)
        config = _build_config(body.config)
        job = Job(id=uuid.uuid4().hex[:12], generations_total=config.generations)
        with registry_lock:
            jobs[job.id] = job
        worker = threading.Thread(
            target=execute_job, args=(job, dataset, config), daemon=True
        )
        worker.start()
        return {"job_id": job.id}

    def get_job_record(job_id: str) -> Job:
        job = jobs.get(job_id)
        if job is None:
            raise ApiError(404, "not_found", f"unknown job {job_id!r}")
        return job

    @app.get("/api/runs/{job_id}")
    def get_job(job_id: str):
        job = get_job_record(job_id)
        with registry_lock:
            return {
                "id": job.id,
                "state": job.state,
                "progress": job.progress,
                "generations_total": job.generations_total,
                "created_at": job.created_at,
                "updated_at": job.updated_at,
                "fitness_history": list(job.fitness_history),
                "error": job.error,
                "result_summary": _result_summary(job.result) if job.result else None,
            }

    @app.get("/api/runs/{job_id}/result")
    def get_job_result(job_id: str):
        job = get_job_record(job_id)
        if job.state == "failed":
            raise ApiError(409, "job_failed", job.error or "run failed")
        if job.state != "done" or job.result is None:
            raise ApiError(409, "job_not_done", f"job is {job.state}")
        return SessionArchive(result=job.result).to_dict()

    # ---------------------------------------------------------------- examples

    @app.get("/api/examples")
    def list_examples():
        entries = []
        for example_id in EXAMPLE_IDS:
            archive = load_example(example_id)
            entries.append({"id": example_id, **_result_summary(archive.result)})
        return {"examples": entries}

    @app.get("/api/examples/{example_id}")
    def get_example(example_id: str):
        return load_example(example_id).to_dict()

    # -------------------------------------------------------------------- chat

    def build_provider(body: SessionRequest):
        if body.provider == "mock":
            script = list(body.mock_script) if body.mock_script else None
            return llm_client.mock_provider(script, echo=True)
        if body.provider != "http":
            raise ApiError(400, "invalid_request", f"unknown provider {body.provider!r}", field="provider")
        overrides: dict[str, Any] = {"model_id": body.model_id}
        if body.api_key is not None:
            overrides["api_key"] = body.api_key
        if body.base_url is not None:
            overrides["base_url"] = body.base_url
        cfg = llm_client.ProviderConfig.from_env(**overrides)
        if not cfg.api_key:
            raise ApiError(401, "auth_failure", "an API key is required", field="api_key")
        return llm_client.HttpChatProvider(cfg)

    def resolve_result(body: SessionRequest) -> tuple[str, RunResult]:
        if (body.job_id is None) == (body.example_id is None):
            raise ApiError(
                400, "invalid_request", "provide exactly one of job_id or example_id"
            )
        if body.example_id is not None:
            archive = load_example(body.example_id)
            return f"example:{body.example_id}", archive.result
        job = get_job_record(body.job_id)
        if job.state != "done" or job.result is None:
            raise ApiError(409, "job_not_done", f"job is {job.state}")
        return f"run:{body.job_id}", job.result

    @app.post("/api/chat/sessions", status_code=201)
    def create_session(body: SessionRequest):
        run_ref, result = resolve_result(body)
        try:
            session = ChatSession(
                run_ref=run_ref, word_limit=body.word_limit, model_id=body.model_id
            )
        except ValueError as exc:
            raise ApiError(400, "invalid_request", str(exc), field="word_limit") from exc
        provider = build_provider(body)
        state = SessionState(session=session, result=result, provider=provider)
        advance_session(state.session, None, background_store(), state.result, provider)
        with registry_lock:
            session_id = uuid.uuid4().hex[:12]
            sessions[session_id] = state
        return _session_payload(session_id, state)

    def get_session_state(session_id: str) -> SessionState:
        state = sessions.get(session_id)
        if state is None:
            raise ApiError(404, "not_found", f"unknown chat session {session_id!r}")
        return state

    @app.post("/api/chat/sessions/{session_id}/messages")
    def post_message(session_id: str, body: QuestionBody):
        state = get_session_state(session_id)
        with state.lock:  # one in-flight exchange per session
            answer = advance_session(
                state.session, body.question, background_store(), state.result,
                state.provider,
            )
        return {"answer": answer, **_session_payload(session_id, state)}

    @app.get("/api/chat/sessions/{session_id}/export")
    def export_session(session_id: str):
        state = get_session_state(session_id)
        archive = SessionArchive.from_session(state.result, state.session)
        return JSONResponse(
            content=archive.to_dict(),
            headers={
                "Content-Disposition": f'attachment; filename="{session_id}.json"'
            },
        )

    @app.post("/api/sessions/import", status_code=201)
    async def import_session(request: Request, provider: str = "mock"):
        payload = await request.body()
        try:
            archive = SessionArchive.from_bytes(payload)
        except VersionMismatch as exc:
            raise ApiError(400, "version_mismatch", str(exc)) from exc
        except ArchiveError as exc:
            raise ApiError(400, "invalid_archive", str(exc)) from exc
        run_ref = f"import:{archive.result.dataset_name}"
        session = archive.to_session(run_ref)
        # a real provider needs a key: taken from the Authorization header
        # (never from the archive, which must stay key-free)
        auth = request.headers.get("authorization", "")
        api_key = auth.removeprefix("Bearer ").strip() if auth else None
        request_body = SessionRequest(
            example_id=None,
            job_id=None,
            provider=provider,
            model_id=archive.model_id,
            word_limit=archive.word_limit,
            api_key=api_key,
        )
        if provider == "mock":
            session_provider = llm_client.mock_provider(None, echo=True)
        else:
            session_provider = build_provider(request_body)
        state = SessionState(
            session=session, result=archive.result, provider=session_provider
        )
        with registry_lock:
            session_id = uuid.uuid4().hex[:12]
            sessions[session_id] = state
        return _session_payload(session_id, state)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


app = create_app()
