"""Simulated users for batch evaluation.

Oracle mode answers from a zero-uncertainty ground-truth graph; LLM
mode asks a chat backend given the goal caption. Oracle noise is
decline-only and keyed by (seed, question id), so repeating a question
repeats its answer.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from scenebelief import dsl
from scenebelief.backends import BackendConfig, ChatRequest, complete
from scenebelief.graph import (
    BeliefGraph,
    EntityStatus,
    NodeKind,
    iter_nodes,
    node_uncertainty,
)
from scenebelief.questions import Answer, AnswerKind, ClarificationQuestion


class UserMode(str, Enum):
    ORACLE = "oracle"
    LLM = "llm"


class GroundTruthError(Exception):
    pass


@dataclass(frozen=True)
class GroundTruth:
    """The goal image as a fully resolved belief graph plus its caption."""

    graph: BeliefGraph
    caption: str

    def __post_init__(self) -> None:
        for entity in self.graph.entities.values():
            if entity.status is EntityStatus.IMPLICIT:
                raise GroundTruthError(
                    f"ground truth entity {entity.id!r} is implicit; "
                    "truth statuses must be explicit or denied")
        for node in iter_nodes(self.graph):
            if node_uncertainty(self.graph, node) != 0.0:
                raise GroundTruthError(f"ground truth node {node.key()} is uncertain")


def load_ground_truth(bgraph_path: str | Path,
                      caption_path: str | Path | None = None) -> GroundTruth:
    """Load a truth graph plus its sidecar caption file."""
    bgraph_path = Path(bgraph_path)
    graph = dsl.parse_graph(bgraph_path.read_text(encoding="utf-8"))
    if caption_path is None:
        caption_path = bgraph_path.parent / (bgraph_path.stem + ".caption.txt")
    caption = Path(caption_path).read_text(encoding="utf-8").strip()
    return GroundTruth(graph=graph, caption=caption)


@dataclass(frozen=True)
class UserModel:
    mode: UserMode
    truth: GroundTruth
    noise: float = 0.0
    seed: int = 0
    backend: BackendConfig | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.noise < 1.0:
            raise ValueError(f"noise must be in [0,1), got {self.noise}")
        if self.mode is UserMode.LLM and self.backend is None:
            raise ValueError("llm mode requires a chat backend config")


def seeded(user: UserModel, seed: int) -> UserModel:
    return replace(user, seed=seed)


def _noise_draw(seed: int, question_id: str) -> float:
    """Uniform [0,1) draw that is a pure function of (seed, question id)."""
    digest = hashlib.sha256(f"{seed}:{question_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def _norm(text: str) -> str:
    return " ".join(text.lower().split())


def answer(user: UserModel, question: ClarificationQuestion) -> Answer:
    """Answer one clarification question."""
    if user.mode is UserMode.LLM:
        return _llm_answer(user, question)
    if user.noise > 0.0 and _noise_draw(user.seed, question.id) < user.noise:
        return Answer(question.id, AnswerKind.DECLINE)
    return _oracle_answer(user, question)


def _value_as_answer(question: ClarificationQuestion, value: str) -> Answer:
    if value in question.options:
        return Answer(question.id, AnswerKind.OPTION, value)
    return Answer(question.id, AnswerKind.FREE_TEXT, value)


def _oracle_answer(user: UserModel, question: ClarificationQuestion) -> Answer:
    truth = user.truth.graph
    node = question.node

    if node.kind is NodeKind.ENTITY_PRESENCE:
        entity = truth.entities.get(node.entity or "")
        if entity is None or entity.status is EntityStatus.DENIED:
            return Answer(question.id, AnswerKind.OPTION, "absent")
        return Answer(question.id, AnswerKind.OPTION, "present")

    if node.kind is NodeKind.ATTRIBUTE:
        entity = truth.entities.get(node.entity or "")
        if entity is None or entity.status is EntityStatus.DENIED:
            return Answer(question.id, AnswerKind.DECLINE)
        dist = entity.attributes.get(node.attribute or "")
        if dist is None:
            return Answer(question.id, AnswerKind.DECLINE)
        return _value_as_answer(question, dist.argmax)

    relation = truth.relations.get(node.relation or "")
    if relation is None:
        return Answer(question.id, AnswerKind.DECLINE)
    for endpoint in (relation.subject, relation.object):
        entity = truth.entities.get(endpoint)
        if entity is None or entity.status is EntityStatus.DENIED:
            return Answer(question.id, AnswerKind.DECLINE)
    return _value_as_answer(question, relation.predicate.argmax)


def _llm_answer(user: UserModel, question: ClarificationQuestion) -> Answer:
    assert user.backend is not None
    options = "\n".join(f"- {label}" for label in question.options)
    request = ChatRequest(
        system=("You are a user describing the image you want. Answer the "
                "agent's question with a short phrase. If one of the listed "
                "options matches your goal, repeat it verbatim."),
        user=(f"Goal image: {user.truth.caption}\n\n"
              f"Question: {question.text}\nOptions:\n{options}\nAnswer:"),
        tag="sim-user",
    )
    response = _norm(complete(user.backend, request))
    if not response:
        return Answer(question.id, AnswerKind.DECLINE)
    for label in question.options:
        if _norm(label) == response:
            return Answer(question.id, AnswerKind.OPTION, label)
    return Answer(question.id, AnswerKind.FREE_TEXT, response)
