"""Append-only per-session event logs with crash replay.

Each session is one newline-delimited JSON file under the data
directory; folding its events from seq 0 reproduces the exact live
state. Timestamps are recorded for operators but excluded from replay
equality, which is defined on the canonical graph print, the phase and
the open-question set.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from scenebelief import dsl, wire
from scenebelief.agent import Phase, SessionState, finalize, open_session, step
from scenebelief.backends import ImageHandle
from scenebelief.profiles import AgentProfile

EVENT_KINDS = ("created", "turn-emitted", "answer", "edit", "finalized", "backend-error")


class ReplayError(Exception):
    def __init__(self, message: str, seq: int) -> None:
        super().__init__(f"{message} (seq {seq})")
        self.seq = seq


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    at: float
    kind: str
    payload: dict[str, Any]

    def to_json(self) -> str:
        return json.dumps({"seq": self.seq, "at": self.at, "kind": self.kind,
                           "payload": self.payload},
                          sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class EventStore:
    """One append-only JSONL file per session id."""

    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._counts: dict[str, int] = {}

    def _path(self, session_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in session_id)
        return self.data_dir / f"{safe}.events.jsonl"

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).is_file()

    def session_ids(self) -> list[str]:
        return sorted(path.name[:-len(".events.jsonl")]
                      for path in self.data_dir.glob("*.events.jsonl"))

    def append(self, session_id: str, kind: str, payload: dict[str, Any]) -> SessionEvent:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        if session_id not in self._counts:
            self._counts[session_id] = len(self.read(session_id)) \
                if self.exists(session_id) else 0
        event = SessionEvent(seq=self._counts[session_id], at=time.time(),
                             kind=kind, payload=payload)
        path = self._path(session_id)
        with path.open("a", encoding="utf-8") as handle:
            handle.write(event.to_json() + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        self._counts[session_id] = event.seq + 1
        return event

    def read(self, session_id: str) -> list[SessionEvent]:
        path = self._path(session_id)
        if not path.is_file():
            raise ReplayError(f"no event log for session {session_id!r}", 0)
        events: list[SessionEvent] = []
        with path.open("r", encoding="utf-8") as handle:
            for index, line in enumerate(handle):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                    event = SessionEvent(seq=int(raw["seq"]), at=float(raw["at"]),
                                         kind=str(raw["kind"]), payload=raw["payload"])
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ReplayError(f"corrupt event record: {exc}", index) from exc
                if event.seq != index:
                    raise ReplayError(
                        f"sequence gap: expected seq {index}, found {event.seq}", index)
                events.append(event)
        return events


def created_payload(state: SessionState) -> dict[str, Any]:
    """Everything replay needs to rebuild the post-extraction state."""
    return {
        "session_id": state.id,
        "prompt": state.starting_prompt,
        "profile": {
            "name": state.profile.name,
            "asks_questions": state.profile.asks_questions,
            "exposes_graph": state.profile.exposes_graph,
            "accepts_graph_edits": state.profile.accepts_graph_edits,
            "questions_per_turn": state.profile.questions_per_turn,
            "max_turns": state.profile.max_turns,
        },
        "graph": dsl.print_graph(state.graph),
        "graph_version": state.graph.version,
        "extraction_retries": state.extraction_retries,
    }


def turn_payload(state: SessionState) -> dict[str, Any]:
    turn = state.turns[-1]
    return {"index": turn.index, "graph_digest": turn.graph_digest,
            "question_ids": [q.id for q in turn.questions]}


def finalized_payload(state: SessionState) -> dict[str, Any]:
    payload: dict[str, Any] = {"prompt": state.final_prompt or ""}
    if state.image is not None:
        payload["image"] = {"uri": state.image.uri,
                            "content_type": state.image.content_type,
                            "prompt_digest": state.image.prompt_digest}
    if state.image_error is not None:
        payload["image_error"] = state.image_error
    return payload


def _state_from_created(payload: dict[str, Any]) -> SessionState:
    profile = AgentProfile(**payload["profile"])
    graph = dsl.parse_graph(payload["graph"])
    graph = replace(graph, version=int(payload.get("graph_version", 0)))
    return open_session(profile, str(payload["prompt"]), graph,
                        session_id=str(payload["session_id"]),
                        extraction_retries=int(payload.get("extraction_retries", 0)))


def replay(store: EventStore, session_id: str) -> SessionState:
    """Fold the event log back into the exact pre-crash session state."""
    events = store.read(session_id)
    if not events:
        raise ReplayError("event log is empty", 0)
    if events[0].kind != "created":
        raise ReplayError(f"first event must be 'created', found {events[0].kind!r}", 0)
    state = _state_from_created(events[0].payload)
    for event in events[1:]:
        if event.kind == "created":
            raise ReplayError("second 'created' event in one session", event.seq)
        if event.kind in ("turn-emitted", "backend-error"):
            continue  # derived or log-only; turns are recomputed deterministically
        if event.kind == "answer":
            state, _ = step(state, wire.answer_from_wire(event.payload))
        elif event.kind == "edit":
            state, _ = step(state, wire.edit_from_wire(event.payload))
        elif event.kind == "finalized":
            if state.phase is not Phase.FINALIZED:
                state, _ = finalize(state, force=True)
            stored_prompt = str(event.payload.get("prompt", ""))
            if state.final_prompt != stored_prompt:
                raise ReplayError(
                    f"replayed final prompt diverges from log: "
                    f"{state.final_prompt!r} != {stored_prompt!r}", event.seq)
            image = None
            if "image" in event.payload:
                raw = event.payload["image"]
                image = ImageHandle(uri=raw.get("uri"),
                                    content_type=str(raw.get("content_type", "")),
                                    prompt_digest=str(raw.get("prompt_digest", "")))
            state = replace(state, image=image,
                            image_error=event.payload.get("image_error"))
        else:
            raise ReplayError(f"unknown event kind {event.kind!r}", event.seq)
    return state
