"""HTTP service exposing sessions, questions, answers, representation views,
assessment, and export.

Persistence is write-ahead: every state-changing user input is appended to
the session's log file (fsync'd) before the response is sent. Recovery
replays recorded inputs through the engine, which is deterministic with the
stub provider, so a restarted service continues exactly where it stopped.
"""

# note: no `from __future__ import annotations` here — the request models are
# defined inside create_app, and FastAPI must resolve their annotations live
import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from . import assessment as assess
from . import engine as eng
from .design_space import DesignSpace, load_design_space
from .engine import Answer, EngineConfig, Mode, Session, Stage, Terminated
from .provider import ProviderConfig, ProviderContract, ProviderFailure, make_provider

logger = logging.getLogger(__name__)

LOG_SCHEMA = "session-inputs/1"


class ServiceError(Exception):
    pass


class UnknownSession(ServiceError):
    pass


class CorruptLog(ServiceError):
    pass


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8400
    design_space_path: Optional[str] = None
    store_dir: str = "./sessions"
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    idle_timeout_s: float = 3600.0
    provider_concurrency: int = 8

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ServiceConfig":
        with open(path, encoding="utf-8") as fp:
            raw = json.load(fp)
        provider = ProviderConfig(**raw.pop("provider", {}))
        engine = EngineConfig(**raw.pop("engine", {}))
        return cls(provider=provider, engine=engine, **raw)


@dataclass
class SessionHolder:
    session: Session
    rows: Optional[list[assess.AssessmentRow]] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Append-only per-session input logs, replayed on boot. A corrupt log
    quarantines only its own session."""

    def __init__(
        self,
        store_dir: Union[str, Path],
        space: DesignSpace,
        provider_config: ProviderConfig,
        engine_config: EngineConfig,
    ):
        self.dir = Path(store_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.space = space
        self.provider_config = provider_config
        self.engine_config = engine_config
        self.holders: dict[str, SessionHolder] = {}
        self.quarantined: dict[str, str] = {}
        self._registry_lock = threading.Lock()

    def _log_path(self, session_id: str) -> Path:
        return self.dir / f"{session_id}.log"

    def _append(self, session_id: str, event: dict) -> None:
        path = self._log_path(session_id)
        with open(path, "a", encoding="utf-8") as fp:
            fp.write(json.dumps(event, sort_keys=True) + "\n")
            fp.flush()
            os.fsync(fp.fileno())

    def create(self, goal: str, seed: Optional[int] = None) -> SessionHolder:
        session_id = uuid.uuid4().hex[:12]
        seed = seed if seed is not None else int.from_bytes(os.urandom(4), "big")
        provider = make_provider(self.provider_config)
        session = eng.start_session(
            goal, self.space, provider, seed=seed, session_id=session_id,
            config=self.engine_config,
        )
        holder = SessionHolder(session)
        header = {"schema": LOG_SCHEMA, "session_id": session_id}
        self._append(session_id, header)
        self._append(session_id, {"type": "start", "goal": goal, "seed": seed})
        with self._registry_lock:
            self.holders[session_id] = holder
        return holder

    def get(self, session_id: str) -> SessionHolder:
        with self._registry_lock:
            holder = self.holders.get(session_id)
        if holder:
            return holder
        if session_id in self.quarantined:
            raise CorruptLog(self.quarantined[session_id])
        path = self._log_path(session_id)
        if not path.exists():
            raise UnknownSession(session_id)
        holder = self._replay_file(path)
        with self._registry_lock:
            self.holders[session_id] = holder
        return holder

    def record(self, holder: SessionHolder, event: dict) -> None:
        """Durably append one accepted input before the response goes out."""
        self._append(holder.session.id, event)

    def recover_all(self) -> None:
        for path in sorted(self.dir.glob("*.log")):
            session_id = path.stem
            try:
                holder = self._replay_file(path)
            except Exception as exc:
                logger.error("quarantining session %s: %s", session_id, exc)
                self.quarantined[session_id] = str(exc)
                continue
            self.holders[session_id] = holder

    def _replay_file(self, path: Path) -> SessionHolder:
        events = []
        with open(path, encoding="utf-8") as fp:
            for i, line in enumerate(fp):
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    if i == 0:
                        raise CorruptLog(f"unreadable header: {exc}")
                    # a torn final line means a crash mid-append; anything
                    # before it is still a valid prefix of the session
                    raise CorruptLog(f"corrupt entry at line {i + 1}: {exc}")
        if not events or events[0].get("schema") != LOG_SCHEMA:
            raise CorruptLog("missing or unsupported log header")
        header, inputs = events[0], events[1:]
        return self._replay_inputs(header["session_id"], inputs)

    def _replay_inputs(self, session_id: str, inputs: list[dict]) -> SessionHolder:
        holder: Optional[SessionHolder] = None
        for event in inputs:
            holder = self._apply_input(session_id, holder, event)
        if holder is None:
            raise CorruptLog("log contains no start event")
        return holder

    def _apply_input(
        self, session_id: str, holder: Optional[SessionHolder], event: dict
    ) -> SessionHolder:
        etype = event.get("type")
        if etype == "start":
            provider = make_provider(self.provider_config)
            session = eng.start_session(
                event["goal"], self.space, provider, seed=event["seed"],
                session_id=session_id, config=self.engine_config,
            )
            return SessionHolder(session)
        if holder is None:
            raise CorruptLog(f"input {etype!r} before start")
        session = holder.session
        if etype == "requirements":
            eng.set_requirements(session, event["requirements"])
        elif etype == "next_question":
            eng.next_question(session)
        elif etype == "answer":
            eng.submit_answer(session, Answer.from_dict(event["answer"]))
        elif etype == "mode":
            eng.set_mode(session, Mode(event["mode"]))
        elif etype == "stop":
            eng.stop(session)
        elif etype == "resume":
            eng.resume_questions(session)
            holder.rows = None
        elif etype == "assessment":
            eng.begin_assessment(session)
            holder.rows = assess.build_assessment(session)
        elif etype == "assessment_edit":
            if holder.rows is None:
                raise CorruptLog("assessment edit before assessment build")
            holder.rows = assess.edit_assessment(holder.rows, event["edit"])
            session.assessment_edits.append(event["edit"])
        else:
            raise CorruptLog(f"unknown input type {etype!r}")
        return holder


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------


def create_app(config: Optional[ServiceConfig] = None):
    from fastapi import FastAPI, HTTPException, Query, Request
    from fastapi.responses import JSONResponse, PlainTextResponse, Response
    from pydantic import BaseModel

    config = config or ServiceConfig()
    if config.design_space_path:
        space = load_design_space(config.design_space_path)
    else:
        from .design_space import load_default_space

        space = load_default_space()

    store = SessionStore(config.store_dir, space, config.provider, config.engine)
    store.recover_all()

    app = FastAPI(title="privacy-elicit")
    app.state.store = store

    class CreateSession(BaseModel):
        goal: str
        seed: Optional[int] = None

    class RequirementsBody(BaseModel):
        requirements: list[str]

    class AnswerBody(BaseModel):
        question_id: str
        variant: str
        selected: list[int] = []
        custom: Optional[str] = None
        revised: Optional[dict] = None

    class ModeBody(BaseModel):
        mode: str

    class EditBody(BaseModel):
        edit: dict

    def _holder(session_id: str) -> SessionHolder:
        try:
            return store.get(session_id)
        except UnknownSession:
            raise HTTPException(404, f"unknown session {session_id!r}")
        except CorruptLog as exc:
            raise HTTPException(500, f"session log quarantined: {exc}")

    def _conflict(exc: Exception):
        raise HTTPException(409, str(exc))

    def _overview(session: Session) -> dict:
        graph = session.graph
        return {
            "data_flow": [
                {"id": i, "kind": graph.nodes[i].kind.value, "label": graph.nodes[i].label}
                for i in graph.data_flow
            ],
            "interactions": [
                {
                    "id": i,
                    "kind": graph.nodes[i].kind.value,
                    "label": graph.nodes[i].label,
                    "attached_to": t,
                }
                for i, t in graph.attachments.items()
            ],
        }

    def _detail(session: Session) -> dict:
        return {
            i: {
                "label": n.label,
                "kind": n.kind.value,
                "decisions": {k: v.to_dict() for k, v in n.decisions.items()},
            }
            for i, n in session.graph.nodes.items()
        }

    def _session_view(holder: SessionHolder) -> dict:
        s = holder.session
        return {
            "session_id": s.id,
            "stage": s.stage.value,
            "mode": s.mode.value,
            "questions_asked": s.questions_asked,
            "question_limit": s.config.hard_limit,
            "terminated": s.terminated.value if s.terminated else None,
            "requirements": s.requirements,
            "domain_labels": sorted(s.domain_labels),
            "graph": _overview(s),
        }

    @app.exception_handler(ProviderFailure)
    async def provider_failure_handler(request: Request, exc: ProviderFailure):
        return JSONResponse(
            status_code=502,
            content={"error": "provider_failure", "reason": str(exc)},
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        if not body.goal.strip():
            raise HTTPException(422, "design goal must be non-empty")
        holder = store.create(body.goal, body.seed)
        return {
            "session_id": holder.session.id,
            "requirements": holder.session.requirements,
            "initial_graph": _overview(holder.session),
            "domain_labels": sorted(holder.session.domain_labels),
        }

    @app.put("/sessions/{session_id}/requirements")
    def put_requirements(session_id: str, body: RequirementsBody):
        holder = _holder(session_id)
        with holder.lock:
            try:
                eng.set_requirements(holder.session, body.requirements)
            except eng.StageError as exc:
                _conflict(exc)
            store.record(holder, {"type": "requirements", "requirements": body.requirements})
        return {"stage": holder.session.stage.value}

    @app.get("/sessions/{session_id}/question")
    def get_question(session_id: str):
        holder = _holder(session_id)
        with holder.lock:
            generated = holder.session.current is None and holder.session.terminated is None
            try:
                result = eng.next_question(holder.session)
            except eng.StageError as exc:
                _conflict(exc)
            if generated:
                store.record(holder, {"type": "next_question"})
        if isinstance(result, Terminated):
            return {"terminated": True, "reason": result.reason.value}
        return {
            "terminated": False,
            "question": result.to_dict(),
            "progress": {
                "asked": holder.session.questions_asked,
                "limit": holder.session.config.hard_limit,
            },
        }

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerBody):
        holder = _holder(session_id)
        answer = Answer.from_dict(body.model_dump())
        with holder.lock:
            before = len(holder.session.graph.events)
            try:
                eng.submit_answer(holder.session, answer)
            except (eng.StaleQuestion, eng.StageError) as exc:
                _conflict(exc)
            except eng.OptionOutOfRange as exc:
                raise HTTPException(422, str(exc))
            store.record(holder, {"type": "answer", "answer": answer.to_dict()})
            delta = [e.to_dict() for e in holder.session.graph.events[before:]]
        return {
            "graph_delta": delta,
            "graph": _overview(holder.session),
            "progress": {
                "asked": holder.session.questions_asked,
                "limit": holder.session.config.hard_limit,
            },
        }

    @app.post("/sessions/{session_id}/mode")
    def post_mode(session_id: str, body: ModeBody):
        holder = _holder(session_id)
        try:
            mode = Mode(body.mode)
        except ValueError:
            raise HTTPException(422, f"unknown mode {body.mode!r}")
        with holder.lock:
            eng.set_mode(holder.session, mode)
            store.record(holder, {"type": "mode", "mode": mode.value})
        return {"mode": mode.value}

    @app.post("/sessions/{session_id}/stop")
    def post_stop(session_id: str):
        holder = _holder(session_id)
        with holder.lock:
            try:
                eng.stop(holder.session)
            except eng.StageError as exc:
                _conflict(exc)
            store.record(holder, {"type": "stop"})
        return {"terminated": holder.session.terminated.value}

    @app.post("/sessions/{session_id}/resume")
    def post_resume(session_id: str):
        holder = _holder(session_id)
        with holder.lock:
            try:
                eng.resume_questions(holder.session)
            except (eng.StageError, eng.BudgetExhausted) as exc:
                _conflict(exc)
            holder.rows = None
            store.record(holder, {"type": "resume"})
        return {"stage": holder.session.stage.value}

    @app.get("/sessions/{session_id}/representation")
    def get_representation(session_id: str):
        holder = _holder(session_id)
        return {
            "overview": _overview(holder.session),
            "detail": _detail(holder.session),
            "session": _session_view(holder),
        }

    @app.post("/sessions/{session_id}/assessment")
    def post_assessment(session_id: str):
        holder = _holder(session_id)
        with holder.lock:
            try:
                eng.begin_assessment(holder.session)
            except eng.StageError as exc:
                _conflict(exc)
            holder.rows = assess.build_assessment(holder.session)
            store.record(holder, {"type": "assessment"})
            rows = [r.to_dict() for r in holder.rows]
        return {"rows": rows}

    @app.patch("/sessions/{session_id}/assessment")
    def patch_assessment(session_id: str, body: EditBody):
        holder = _holder(session_id)
        with holder.lock:
            if holder.rows is None:
                _conflict(ServiceError("assessment not built yet"))
            try:
                holder.rows = assess.edit_assessment(holder.rows, body.edit)
            except assess.InvalidEdit as exc:
                raise HTTPException(422, str(exc))
            holder.session.assessment_edits.append(body.edit)
            store.record(holder, {"type": "assessment_edit", "edit": body.edit})
            rows = [r.to_dict() for r in holder.rows]
        return {"rows": rows}

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str, format: str = Query("csv")):
        holder = _holder(session_id)
        with holder.lock:
            if holder.rows is None:
                _conflict(ServiceError("assessment not built yet"))
            try:
                data = assess.export_worksheet(holder.rows, format)
            except assess.AssessmentError as exc:
                raise HTTPException(422, str(exc))
        if format == "csv":
            return Response(content=data, media_type="text/csv")
        return Response(
            content=data,
            media_type="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
        )

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(_holder(session_id))

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
