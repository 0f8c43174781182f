"""HTTP session service for the interactive correction loop.

The engine keeps one session per client interaction, keyed by an opaque id.
Every feedback request extends the validated prefix through the same
constrained search the simulator uses, so human and simulated corrections
exercise identical machinery. Requests for one session are serialized;
distinct sessions run concurrently against the shared read-only scorer.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .decoder import Hypothesis, SearchConfig, beam_search, constrained_search
from .errors import SessionStateError, UnknownSourceError
from .metrics import InteractionTrace, KsmrConvention, effort_counts, ksmr
from .seqcore import FeedbackSignal, PrefixConstraint, SourceContext, Vocabulary, split_prefix


class CreateRequest(BaseModel):
    text: str | None = None
    sample_id: str | None = None


class FeedbackRequest(BaseModel):
    position: int
    character: str


@dataclass
class Session:
    id: str
    source: SourceContext
    hypothesis: Hypothesis
    constraint: PrefixConstraint
    trace: InteractionTrace = field(default_factory=InteractionTrace)
    created: float = 0.0
    last_activity: float = 0.0
    accepted: bool = False
    final_ksmr: float | None = None
    last_latency_ms: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def view(self, convention: KsmrConvention) -> dict:
        keystrokes, mouse = effort_counts(self.trace, convention)
        if not self.accepted:
            mouse -= 1 if convention.count_acceptance else 0
        return {
            "id": self.id,
            "hypothesis": self.hypothesis.render(),
            "validated_prefix_chars": self.constraint.char_length,
            "keystrokes": keystrokes,
            "mouse_actions": mouse,
            "accepted": self.accepted,
            "last_latency_ms": self.last_latency_ms,
        }


class InteractiveEngine:
    """Session bookkeeping around one scorer. Thread safe."""

    def __init__(
        self,
        scorer,
        search: SearchConfig = SearchConfig(),
        samples: dict[str, SourceContext] | None = None,
        ksmr_convention: KsmrConvention = KsmrConvention(),
        ttl_seconds: float = 1800.0,
        clock=time.monotonic,
    ):
        self.scorer = scorer
        self.search = search
        self.samples = samples or {}
        self.convention = ksmr_convention
        self.ttl = ttl_seconds
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()

    @property
    def vocab(self) -> Vocabulary:
        return self.scorer.vocab

    def _resolve_source(self, text: str | None, sample_id: str | None) -> SourceContext:
        if (text is None) == (sample_id is None):
            raise ValueError("provide exactly one of text or sample_id")
        if text is not None:
            return SourceContext.from_text(text, self.vocab)
        if sample_id not in self.samples:
            raise UnknownSourceError(f"unknown sample id {sample_id!r}")
        return self.samples[sample_id]

    def create(self, text: str | None = None, sample_id: str | None = None) -> Session:
        source = self._resolve_source(text, sample_id)
        started = self.clock()
        hypothesis = beam_search(self.scorer, source, self.search)
        latency = (self.clock() - started) * 1000.0
        now = self.clock()
        session = Session(
            id=uuid.uuid4().hex,
            source=source,
            hypothesis=hypothesis,
            constraint=PrefixConstraint.make_empty(self.vocab),
            created=now,
            last_activity=now,
            last_latency_ms=latency,
        )
        with self._registry_lock:
            self._sessions[session.id] = session
        return session

    def _get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
            if session is not None and self.clock() - session.last_activity > self.ttl:
                del self._sessions[session_id]
                session = None
        if session is None:
            raise UnknownSourceError(f"no session {session_id!r}")
        return session

    def get(self, session_id: str) -> dict:
        return self._get(session_id).view(self.convention)

    def feedback(self, session_id: str, position: int, character: str) -> dict:
        session = self._get(session_id)
        with session.lock:
            if session.accepted:
                raise SessionStateError("session already accepted")
            current = session.hypothesis.render()
            if not 0 <= position <= len(current):
                raise ValueError(
                    f"position {position} outside hypothesis of length {len(current)}"
                )
            signal = FeedbackSignal(position, character)
            constraint = split_prefix(current, signal, self.vocab)
            started = self.clock()
            hypothesis = constrained_search(self.scorer, session.source, constraint, self.search)
            latency = (self.clock() - started) * 1000.0
            assert hypothesis.render().startswith(constraint.render()), \
                "constrained search violated its prefix"
            session.hypothesis = hypothesis
            session.constraint = constraint
            session.trace.add_event(position, character)
            session.trace.latencies_ms.append(latency)
            session.last_latency_ms = latency
            session.last_activity = self.clock()
            view = session.view(self.convention)
            view["latency_ms"] = latency
            return view

    def accept(self, session_id: str) -> dict:
        session = self._get(session_id)
        with session.lock:
            if not session.accepted:
                session.trace.accept_with(session.hypothesis.render())
                session.accepted = True
                session.final_ksmr = ksmr(session.trace, self.convention)
                session.last_activity = self.clock()
            return {"trace": session.trace.to_dict(), "ksmr": session.final_ksmr}

    def delete(self, session_id: str) -> None:
        with self._registry_lock:
            if session_id not in self._sessions:
                raise UnknownSourceError(f"no session {session_id!r}")
            del self._sessions[session_id]


def create_app(engine: InteractiveEngine, ui_dir: str | None = None) -> FastAPI:
    """FastAPI application exposing the engine as a JSON API plus the static
    UI bundle under /ui when a build directory is available."""
    app = FastAPI(title="ipredict session service")
    app.state.engine = engine

    def _wrap(callable_, *args):
        try:
            return callable_(*args)
        except UnknownSourceError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except SessionStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/sessions")
    def create_session(request: CreateRequest):
        session = _wrap(engine.create, request.text, request.sample_id)
        view = session.view(engine.convention)
        view["latency_ms"] = session.last_latency_ms
        return view

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _wrap(engine.get, session_id)

    @app.post("/sessions/{session_id}/feedback")
    def post_feedback(session_id: str, request: FeedbackRequest):
        return _wrap(engine.feedback, session_id, request.position, request.character)

    @app.post("/sessions/{session_id}/accept")
    def accept_session(session_id: str):
        return _wrap(engine.accept, session_id)

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        _wrap(engine.delete, session_id)

    @app.get("/samples")
    def list_samples():
        return {"samples": sorted(engine.samples)}

    @app.get("/", include_in_schema=False)
    def root():
        return RedirectResponse(url="/ui/")

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/ui/", include_in_schema=False)
        def ui_placeholder():
            return HTMLResponse(
                "<html><body><p>No UI bundle found. Build the frontend and pass "
                "--ui-dir (or place it at frontend/dist).</p></body></html>"
            )

    return app
