"""HTTP API for interactive sessions.

One logical writer per session (a lock per session id); reads serve the
latest committed state. Every mutation appends to the event log before
the response goes out, so a crash at any point replays to exactly the
state the client last saw.
"""

from __future__ import annotations

import dataclasses
import threading
import uuid
from typing import Any

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from scenebelief import wire
from scenebelief.agent import (
    FinalResult,
    Phase,
    PhaseError,
    PolicyError,
    SessionState,
    StaleAnswerError,
    build_transcript,
    finalize,
    init_session,
    step,
)
from scenebelief.backends import (
    BackendConfig,
    BackendError,
    ExtractionError,
    generate_image,
)
from scenebelief.graph import AnswerError, EditRejected, to_prompt
from scenebelief.profiles import PRESETS, AgentProfile
from scenebelief.questions import Answer, AnswerKind, QuestionError
from scenebelief.reports import transcript_to_wire
from scenebelief.service.events import (
    EventStore,
    ReplayError,
    created_payload,
    finalized_payload,
    replay,
    turn_payload,
)


class CreateSessionBody(BaseModel):
    prompt: str
    profile: str
    max_turns: int | None = None


class AnswerBody(BaseModel):
    question_id: str
    kind: str
    value: str = ""


def state_to_wire(state: SessionState) -> dict[str, Any]:
    """The session wire form consumed by the UI."""
    body: dict[str, Any] = {
        "session_id": state.id,
        "profile": {
            "name": state.profile.name,
            "asks_questions": state.profile.asks_questions,
            "exposes_graph": state.profile.exposes_graph,
            "accepts_graph_edits": state.profile.accepts_graph_edits,
            "max_turns": state.profile.max_turns,
        },
        "phase": state.phase.value,
        "turn": state.turns[-1].index if state.turns else None,
        "version": state.graph.version,
        "prompt_preview": state.final_prompt if state.phase is Phase.FINALIZED
        else to_prompt(state.graph),
        "open_questions": [wire.question_to_wire(q) for q in state.open_questions],
        "answered": _answered_history(state),
    }
    if state.profile.exposes_graph:
        body["graph"] = wire.graph_to_wire(state.graph)
    if state.final_prompt is not None:
        body["final_prompt"] = state.final_prompt
    if state.image is not None:
        body["image"] = {"uri": state.image.uri, "content_type": state.image.content_type,
                         "prompt_digest": state.image.prompt_digest}
    if state.image_error is not None:
        body["image_error"] = state.image_error
    return body


def _answered_history(state: SessionState) -> list[dict[str, Any]]:
    questions_by_id = {q.id: q for turn in state.turns for q in turn.questions}
    answered = []
    for _, event in state.events:
        if isinstance(event, Answer):
            question = questions_by_id.get(event.question_id)
            if question is not None:
                answered.append({"question": wire.question_to_wire(question),
                                 "answer": wire.answer_to_wire(event)})
    return answered


class SessionRegistry:
    """Live session cache backed by the event store; lazy crash recovery."""

    def __init__(self, store: EventStore) -> None:
        self.store = store
        self._states: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def get(self, session_id: str) -> SessionState | None:
        state = self._states.get(session_id)
        if state is not None:
            return state
        if self.store.exists(session_id):
            state = replay(self.store, session_id)
            self._states[session_id] = state
            return state
        return None

    def put(self, state: SessionState) -> None:
        self._states[state.id] = state


def create_app(cfg: BackendConfig, data_dir: str,
               profiles: dict[str, AgentProfile] | None = None, *,
               per_turn_generate: bool = False, generate_count: int = 1,
               verify_replay: bool = False) -> FastAPI:
    """Build the service app.

    ``per_turn_generate`` lets POST /generate produce an image from the
    current prompt without closing the session, so the user can keep
    refining. ``verify_replay`` re-folds the event log after every
    mutation and asserts it matches live state (test mode).
    """
    app = FastAPI(title="scenebelief session service")
    store = EventStore(data_dir)
    registry = SessionRegistry(store)
    known_profiles = dict(PRESETS if profiles is None else profiles)

    app.state.registry = registry
    app.state.backend_config = cfg

    def _error(status: int, detail: str, **extra: Any) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": detail, **extra})

    def _check_replay(session_id: str) -> None:
        if not verify_replay:
            return
        from scenebelief import dsl
        from scenebelief.service.events import replay as replay_log

        live = registry.get(session_id)
        replayed = replay_log(store, session_id)
        assert live is not None
        assert dsl.print_graph(replayed.graph) == dsl.print_graph(live.graph)
        assert replayed.phase is live.phase
        assert [q.id for q in replayed.open_questions] == \
            [q.id for q in live.open_questions]

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> Any:
        if not body.prompt.strip():
            return _error(400, "prompt must be non-empty")
        if body.profile not in known_profiles:
            return _error(400, f"unknown profile {body.profile!r}",
                          known_profiles=sorted(known_profiles))
        profile = known_profiles[body.profile]
        if body.max_turns is not None and profile.max_turns != 0:
            profile = dataclasses.replace(profile, max_turns=body.max_turns)
        session_id = f"s-{uuid.uuid4().hex[:12]}"
        try:
            state = init_session(profile, body.prompt, cfg, session_id=session_id)
        except ExtractionError as exc:
            return _error(502, cfg.scrub(str(exc)),
                          diagnostics=[{"line": d.span.line, "column": d.span.column,
                                        "code": d.code, "message": d.message}
                                       for d in exc.diagnostics])
        except BackendError as exc:
            return _error(502, cfg.scrub(str(exc)), diagnostics=[])
        with registry.lock_for(session_id):
            store.append(session_id, "created", created_payload(state))
            if state.turns:
                store.append(session_id, "turn-emitted", turn_payload(state))
            if state.phase is Phase.FINALIZED:
                store.append(session_id, "finalized", finalized_payload(state))
            registry.put(state)
            _check_replay(session_id)
        return {"session_id": session_id, "state": state_to_wire(state)}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> Any:
        state = registry.get(session_id)
        if state is None:
            return _error(404, f"unknown session {session_id!r}")
        return {"session_id": session_id, "state": state_to_wire(state)}

    @app.get("/sessions/{session_id}/transcript")
    def get_transcript(session_id: str) -> Any:
        state = registry.get(session_id)
        if state is None:
            return _error(404, f"unknown session {session_id!r}")
        final_prompt = state.final_prompt if state.final_prompt is not None \
            else to_prompt(state.graph)
        return transcript_to_wire(build_transcript(state, final_prompt))

    @app.post("/sessions/{session_id}/answers")
    def post_answer(session_id: str, body: AnswerBody) -> Any:
        with registry.lock_for(session_id):
            state = registry.get(session_id)
            if state is None:
                return _error(404, f"unknown session {session_id!r}")
            if state.phase is Phase.FINALIZED:
                return _error(410, "session already finalized")
            try:
                answer = Answer(question_id=body.question_id,
                                kind=AnswerKind(body.kind), value=body.value)
            except ValueError as exc:
                return _error(400, f"bad answer kind: {exc}")
            try:
                new_state, emitted = step(state, answer)
            except StaleAnswerError as exc:
                return _error(409, str(exc))
            except (QuestionError, AnswerError, ValueError) as exc:
                return _error(409, str(exc))
            store.append(session_id, "answer", wire.answer_to_wire(answer))
            if isinstance(emitted, FinalResult):
                store.append(session_id, "finalized", finalized_payload(new_state))
            else:
                store.append(session_id, "turn-emitted", turn_payload(new_state))
            registry.put(new_state)
            _check_replay(session_id)
            return {"session_id": session_id, "state": state_to_wire(new_state)}

    @app.post("/sessions/{session_id}/edits")
    def post_edit(session_id: str, body: dict) -> Any:
        with registry.lock_for(session_id):
            state = registry.get(session_id)
            if state is None:
                return _error(404, f"unknown session {session_id!r}")
            if state.phase is Phase.FINALIZED:
                return _error(410, "session already finalized")
            try:
                edit = wire.edit_from_wire(body)
            except wire.WireError as exc:
                return _error(422, str(exc))
            try:
                new_state, emitted = step(state, edit)
            except PolicyError as exc:
                return _error(403, str(exc))
            except EditRejected as exc:
                return _error(422, str(exc),
                              violations=[{"rule": v.rule, "node": v.node,
                                           "detail": v.detail} for v in exc.violations])
            store.append(session_id, "edit", wire.edit_to_wire(edit))
            if isinstance(emitted, FinalResult):
                store.append(session_id, "finalized", finalized_payload(new_state))
            else:
                store.append(session_id, "turn-emitted", turn_payload(new_state))
            registry.put(new_state)
            _check_replay(session_id)
            return {"session_id": session_id, "state": state_to_wire(new_state)}

    def _image_payload(image) -> dict[str, Any]:
        return {"uri": image.uri, "content_type": image.content_type,
                "prompt_digest": image.prompt_digest}

    @app.post("/sessions/{session_id}/generate")
    def post_generate(session_id: str) -> Any:
        with registry.lock_for(session_id):
            state = registry.get(session_id)
            if state is None:
                return _error(404, f"unknown session {session_id!r}")
            if per_turn_generate and state.phase is Phase.AWAITING_USER:
                # mid-dialog regeneration: image from the current prompt,
                # session stays open for further refinement
                prompt = to_prompt(state.graph)
                body = {"prompt": prompt, "state": state_to_wire(state)}
                try:
                    images = [generate_image(cfg, prompt)
                              for _ in range(max(1, generate_count))]
                    body["images"] = [_image_payload(img) for img in images]
                    body["image"] = body["images"][0]
                except BackendError as exc:
                    body["image_error"] = cfg.scrub(str(exc))
                return body
            try:
                new_state, result = finalize(state, cfg, force=True)
            except PhaseError as exc:
                return _error(409, str(exc))
            store.append(session_id, "finalized", finalized_payload(new_state))
            registry.put(new_state)
            _check_replay(session_id)
            body = {"prompt": result.prompt, "state": state_to_wire(new_state)}
            if result.image is not None:
                extra = [generate_image(cfg, result.prompt)
                         for _ in range(max(0, generate_count - 1))]
                body["images"] = [_image_payload(img)
                                  for img in [result.image, *extra]]
                body["image"] = _image_payload(result.image)
            if result.image_error is not None:
                body["image_error"] = result.image_error
            return body

    return app
