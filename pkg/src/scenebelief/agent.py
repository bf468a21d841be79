"""Dialog orchestrator.

Builds the initial belief graph from the starting prompt through the
backend gateway, runs the question/answer/edit turn loop, and compiles
the final enriched prompt. Session state is an immutable value: every
transition returns a new state, which is what makes transcripts and
event-sourced replay exact.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

from scenebelief import dsl
from scenebelief.backends import (
    BackendConfig,
    ExtractionOutcome,
    ImageHandle,
    extract_graph_detailed,
    generate_image,
)
from scenebelief.graph import (
    BeliefGraph,
    GraphEdit,
    NodeRef,
    apply_edit,
    to_prompt,
)
from scenebelief.profiles import AgentProfile
from scenebelief.questions import (
    Answer,
    AnswerKind,
    ClarificationQuestion,
    QuestionConfig,
    incorporate,
    make_question,
    rank_nodes,
    should_stop,
)


class AgentError(Exception):
    pass


class PhaseError(AgentError):
    """Operation not allowed in the session's current phase."""


class PolicyError(AgentError):
    """The profile forbids this kind of event."""


class StaleAnswerError(AgentError):
    """The answered question is no longer open."""


class Phase(str, Enum):
    INITIALIZING = "initializing"
    AWAITING_USER = "awaiting_user"
    FINALIZED = "finalized"


SessionEventInput = Union[Answer, GraphEdit]


def graph_digest(graph: BeliefGraph) -> str:
    return hashlib.sha256(dsl.print_graph(graph).encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class AgentTurn:
    index: int
    questions: tuple[ClarificationQuestion, ...]
    prompt_preview: str
    graph_digest: str
    graph_snapshot: BeliefGraph | None = None


@dataclass(frozen=True)
class Transcript:
    session_id: str
    profile_name: str
    starting_prompt: str
    turns: tuple[AgentTurn, ...]
    events: tuple[tuple[int, SessionEventInput], ...]
    final_prompt: str
    graph_digests: tuple[str, ...]
    wall_clock_s: tuple[float, ...] = ()


@dataclass(frozen=True)
class FinalResult:
    prompt: str
    transcript: Transcript
    image: ImageHandle | None = None
    image_error: str | None = None


@dataclass(frozen=True)
class SessionState:
    id: str
    profile: AgentProfile
    starting_prompt: str
    graph: BeliefGraph
    phase: Phase
    turns: tuple[AgentTurn, ...] = ()
    events: tuple[tuple[int, SessionEventInput], ...] = ()
    suppressed: frozenset[NodeRef] = frozenset()
    open_questions: tuple[ClarificationQuestion, ...] = ()
    final_prompt: str | None = None
    image: ImageHandle | None = None
    image_error: str | None = None
    extraction_retries: int = 0

    @property
    def question_config(self) -> QuestionConfig:
        return QuestionConfig(max_turns=self.profile.max_turns,
                              questions_per_turn=self.profile.questions_per_turn)

    def turns_used(self) -> int:
        return len(self.turns)


def _default_session_id(profile: AgentProfile, starting_prompt: str) -> str:
    digest = hashlib.sha256(f"{profile.name}|{starting_prompt}".encode("utf-8"))
    return f"s-{digest.hexdigest()[:12]}"


def _fresh_questions(graph: BeliefGraph, profile: AgentProfile,
                     suppressed: frozenset[NodeRef]) -> tuple[ClarificationQuestion, ...]:
    if not profile.asks_questions:
        return ()
    nodes = rank_nodes(graph, profile.questions_per_turn, suppressed=suppressed)
    return tuple(make_question(graph, node) for node in nodes)


def _make_turn(index: int, graph: BeliefGraph, profile: AgentProfile,
               questions: tuple[ClarificationQuestion, ...]) -> AgentTurn:
    return AgentTurn(
        index=index,
        questions=questions,
        prompt_preview=to_prompt(graph),
        graph_digest=graph_digest(graph),
        graph_snapshot=graph if profile.exposes_graph else None,
    )


def open_session(profile: AgentProfile, starting_prompt: str, graph: BeliefGraph,
                 *, session_id: str | None = None, extraction_retries: int = 0,
                 ) -> SessionState:
    """Open a session around an already-extracted graph.

    Zero-turn profiles finalize immediately; everyone else gets turn 0
    with fresh questions and waits for the user. Deterministic given
    the graph, which is what lets event replay rebuild exact state.
    """
    state = SessionState(
        id=session_id or _default_session_id(profile, starting_prompt),
        profile=profile,
        starting_prompt=starting_prompt,
        graph=graph,
        phase=Phase.INITIALIZING,
        extraction_retries=extraction_retries,
    )
    if profile.max_turns == 0:
        return replace(state, phase=Phase.FINALIZED, final_prompt=to_prompt(graph))
    questions = _fresh_questions(graph, profile, state.suppressed)
    turn = _make_turn(0, graph, profile, questions)
    return replace(state, phase=Phase.AWAITING_USER, turns=(turn,),
                   open_questions=questions)


def init_session(profile: AgentProfile, starting_prompt: str, cfg: BackendConfig,
                 session_id: str | None = None) -> SessionState:
    """Extract the initial graph from the backend and open the session."""
    if not starting_prompt:
        raise ValueError("starting prompt must be non-empty")
    outcome: ExtractionOutcome = extract_graph_detailed(cfg, starting_prompt)
    return open_session(profile, starting_prompt, outcome.graph,
                        session_id=session_id, extraction_retries=outcome.retry_count)


def step(state: SessionState,
         event: SessionEventInput) -> tuple[SessionState, AgentTurn | FinalResult]:
    """Process one user event and either emit the next turn or finalize."""
    if state.phase is not Phase.AWAITING_USER:
        raise PhaseError(f"session {state.id} is {state.phase.value}, not awaiting the user")

    suppressed = state.suppressed
    if isinstance(event, Answer):
        matching = [q for q in state.open_questions if q.id == event.question_id]
        if not matching:
            raise StaleAnswerError(f"question {event.question_id!r} is not open")
        question = matching[0]
        graph = incorporate(state.graph, question, event)
        if event.kind is AnswerKind.DECLINE:
            suppressed = suppressed | {question.node}
    elif isinstance(event, GraphEdit):
        if not state.profile.accepts_graph_edits:
            raise PolicyError(f"profile {state.profile.name!r} does not accept graph edits")
        graph = apply_edit(state.graph, event)
    else:
        raise AgentError(f"unsupported event type {type(event).__name__}")

    consumed_turn = state.turns[-1].index if state.turns else 0
    state = replace(state, graph=graph, suppressed=suppressed,
                    events=state.events + ((consumed_turn, event),))

    if should_stop(graph, state.question_config, state.turns_used(), suppressed=suppressed):
        final_state, result = finalize(state)
        return final_state, result

    questions = _fresh_questions(graph, state.profile, suppressed)
    turn = _make_turn(state.turns_used(), graph, state.profile, questions)
    state = replace(state, turns=state.turns + (turn,), open_questions=questions)
    return state, turn


def build_transcript(state: SessionState, final_prompt: str,
                     wall_clock_s: tuple[float, ...] = ()) -> Transcript:
    return Transcript(
        session_id=state.id,
        profile_name=state.profile.name,
        starting_prompt=state.starting_prompt,
        turns=state.turns,
        events=state.events,
        final_prompt=final_prompt,
        graph_digests=tuple(turn.graph_digest for turn in state.turns),
        wall_clock_s=wall_clock_s,
    )


def finalize(state: SessionState, cfg: BackendConfig | None = None,
             *, force: bool = False) -> tuple[SessionState, FinalResult]:
    """Compile the final prompt, optionally generate an image, close the session.

    Idempotent once finalized: repeat calls return the same prompt and
    reuse the stored image handle. An image failure is recorded on the
    result; the prompt always survives.
    """
    if state.phase is Phase.FINALIZED:
        if (cfg is not None and cfg.has_t2i
                and state.image is None and state.image_error is None):
            try:
                image = generate_image(cfg, state.final_prompt or "")
                state = replace(state, image=image)
            except Exception as exc:  # noqa: BLE001 - failure is data, prompt survives
                state = replace(state, image_error=str(exc))
        transcript = build_transcript(state, state.final_prompt or "")
        return state, FinalResult(prompt=state.final_prompt or "", transcript=transcript,
                                  image=state.image, image_error=state.image_error)
    if state.phase is not Phase.AWAITING_USER:
        raise PhaseError(f"cannot finalize a session in phase {state.phase.value}")
    if not force and not should_stop(state.graph, state.question_config,
                                     state.turns_used(), suppressed=state.suppressed):
        raise PhaseError("session still has open questions; pass force=True to cut it short")

    prompt = to_prompt(state.graph)
    image: ImageHandle | None = None
    image_error: str | None = None
    if cfg is not None and cfg.has_t2i:
        try:
            image = generate_image(cfg, prompt)
        except Exception as exc:  # noqa: BLE001 - failure is data, prompt survives
            image_error = str(exc)

    state = replace(state, phase=Phase.FINALIZED, final_prompt=prompt,
                    open_questions=(), image=image, image_error=image_error)
    transcript = build_transcript(state, prompt)
    return state, FinalResult(prompt=prompt, transcript=transcript,
                              image=image, image_error=image_error)
