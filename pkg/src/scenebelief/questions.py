"""Clarification question engine.

Ranks uncertain belief nodes by normalized entropy, renders one
deterministic question per node with options in distribution order plus
an always-available free-text field, folds answers back into the graph,
and lints questions against the issue rubric used for rater review.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from scenebelief.graph import (
    BeliefGraph,
    BeliefGraphError,
    Distribution,
    EntityStatus,
    NodeKind,
    NodeLookupError,
    NodeRef,
    apply_answer,
    is_settled,
    node_uncertainty,
    resolve,
)

# Below this normalized entropy a belief counts as settled and is not
# worth a question.
ASK_THRESHOLD = 0.1


class QuestionError(BeliefGraphError):
    """Raised on contract violations around questions and answers."""


class AnswerKind(str, Enum):
    OPTION = "option"
    FREE_TEXT = "free_text"
    DECLINE = "decline"


class LintCode(str, Enum):
    REFERENCES_MISSING_ENTITY = "references-missing-entity"
    ALREADY_RESOLVED = "already-resolved"
    DUPLICATE_OF_PREVIOUS = "duplicate-of-previous"
    COMPOUND_QUESTION = "compound-question"
    EMPTY_OR_MALFORMED = "empty-or-malformed"


@dataclass(frozen=True)
class ClarificationQuestion:
    """One rendered question; options and their probabilities are frozen
    in distribution order at ask time so the UI shows percentages without
    recomputing anything."""

    id: str
    node: NodeRef
    text: str
    options: tuple[str, ...]
    option_probs: tuple[float, ...]
    asked_at_version: int
    free_text_allowed: bool = True


@dataclass(frozen=True)
class Answer:
    question_id: str
    kind: AnswerKind
    value: str = ""


@dataclass(frozen=True)
class LintIssue:
    code: LintCode
    question_id: str
    detail: str


@dataclass(frozen=True)
class QuestionConfig:
    max_turns: int
    ask_threshold: float = ASK_THRESHOLD
    questions_per_turn: int = 1


def candidate_nodes(graph: BeliefGraph) -> list[NodeRef]:
    """Nodes that can meaningfully be asked about.

    Attributes of denied entities and relations touching a denied
    entity are excluded: they no longer affect the picture.
    """
    denied = {entity.id for entity in graph.entities.values()
              if entity.status is EntityStatus.DENIED}
    refs: list[NodeRef] = []
    for entity_id, entity in graph.entities.items():
        refs.append(NodeRef.presence(entity_id))
        if entity_id in denied:
            continue
        for attr_name in entity.attributes:
            refs.append(NodeRef.attr(entity_id, attr_name))
    for relation in graph.relations.values():
        if relation.subject in denied or relation.object in denied:
            continue
        refs.append(NodeRef.rel(relation.id))
    return refs


def rank_nodes(graph: BeliefGraph, k: int, *, ask_threshold: float = ASK_THRESHOLD,
               suppressed: frozenset[NodeRef] | set[NodeRef] = frozenset()) -> list[NodeRef]:
    """Top-k askable nodes: uncertainty descending, canonical key ascending."""
    if k <= 0:
        raise QuestionError(f"k must be positive, got {k}")
    scored = [(node_uncertainty(graph, node), node) for node in candidate_nodes(graph)
              if node not in suppressed]
    eligible = [(u, node) for u, node in scored if u >= ask_threshold]
    eligible.sort(key=lambda pair: (-pair[0], pair[1].key()))
    return [node for _, node in eligible[:k]]


def _enumerate_options(labels: tuple[str, ...]) -> str:
    numbered = [f"{i}. {label}" for i, label in enumerate(labels, start=1)]
    if len(numbered) == 1:
        return numbered[0]
    return ", ".join(numbered[:-1]) + ", or " + numbered[-1]


def make_question(graph: BeliefGraph, node: NodeRef, *,
                  ask_threshold: float = ASK_THRESHOLD) -> ClarificationQuestion:
    """Render the deterministic question for one uncertain node.

    Options always follow distribution order; a chat backend may later
    paraphrase the sentence but never reorder or reword the options.
    """
    uncertainty = node_uncertainty(graph, node)
    if uncertainty < ask_threshold:
        raise QuestionError(f"node {node.key()} is already settled "
                            f"(uncertainty {uncertainty:.3f})")
    question_id = f"q{graph.version}:{node.key()}"
    if node.kind is NodeKind.ENTITY_PRESENCE:
        entity = graph.entity(node.entity or "")
        presence = entity.presence
        weighted = sorted([("present", presence), ("absent", 1.0 - presence)],
                          key=lambda pair: (-pair[1], pair[0]))
        options = tuple(label for label, _ in weighted)
        probs = tuple(prob for _, prob in weighted)
        text = f"Should the image include the {entity.name}?"
    elif node.kind is NodeKind.ATTRIBUTE:
        entity = graph.entity(node.entity or "")
        dist = resolve(graph, node)
        assert isinstance(dist, Distribution)
        options = dist.labels()
        probs = tuple(o.prob for o in dist.options)
        text = (f"Is the {entity.name} {node.attribute}: "
                f"{_enumerate_options(options)}?")
    else:
        relation = graph.relation(node.relation or "")
        subject = graph.entity(relation.subject)
        obj = graph.entity(relation.object)
        options = relation.predicate.labels()
        probs = tuple(o.prob for o in relation.predicate.options)
        text = (f"How does the {subject.name} relate to the {obj.name}: "
                f"{_enumerate_options(options)}?")
    return ClarificationQuestion(id=question_id, node=node, text=text, options=options,
                                 option_probs=probs, asked_at_version=graph.version)


def incorporate(graph: BeliefGraph, question: ClarificationQuestion,
                answer: Answer) -> BeliefGraph:
    """Fold an answer into the graph.

    Declines leave the graph untouched; the caller owns the per-session
    suppression set that keeps declined nodes out of future rankings.
    """
    if answer.question_id != question.id:
        raise QuestionError(f"answer targets {answer.question_id!r}, "
                            f"question is {question.id!r}")
    try:
        resolve(graph, question.node)
    except NodeLookupError as exc:
        raise QuestionError(f"question {question.id!r} is stale: {exc}") from exc
    if answer.kind is AnswerKind.DECLINE:
        return graph
    if answer.kind is AnswerKind.OPTION and answer.value not in question.options:
        raise QuestionError(f"option answer {answer.value!r} is not one of "
                            f"{list(question.options)}")
    return apply_answer(graph, question.node, answer.value)


def lint_question(question: ClarificationQuestion, graph: BeliefGraph,
                  history: list[ClarificationQuestion] | tuple[ClarificationQuestion, ...] = (),
                  ) -> list[LintIssue]:
    """Flag rubric issues; an empty list means the question is clean."""
    issues: list[LintIssue] = []

    malformed = []
    if not question.text.strip():
        malformed.append("question text is empty")
    elif "?" not in question.text:
        malformed.append("question text has no question mark")
    if not question.options:
        malformed.append("question has no options")
    elif len(set(question.options)) != len(question.options):
        malformed.append("question repeats an option")
    for detail in malformed:
        issues.append(LintIssue(LintCode.EMPTY_OR_MALFORMED, question.id, detail))

    resolved_target = None
    try:
        resolved_target = resolve(graph, question.node)
    except NodeLookupError as exc:
        issues.append(LintIssue(LintCode.REFERENCES_MISSING_ENTITY, question.id, str(exc)))
    if resolved_target is not None and is_settled(graph, question.node):
        issues.append(LintIssue(LintCode.ALREADY_RESOLVED, question.id,
                                f"node {question.node.key()} is already a point mass"))

    for prior in history:
        if prior.id != question.id and prior.node.key() == question.node.key():
            issues.append(LintIssue(LintCode.DUPLICATE_OF_PREVIOUS, question.id,
                                    f"node already asked as {prior.id!r}"))
            break

    if question.text.count("?") > 1:
        issues.append(LintIssue(LintCode.COMPOUND_QUESTION, question.id,
                                "question asks more than one thing"))
    return issues


def should_stop(graph: BeliefGraph, config: QuestionConfig, turns_used: int, *,
                suppressed: frozenset[NodeRef] | set[NodeRef] = frozenset()) -> bool:
    """True when the turn budget is used up or nothing is left to ask."""
    if turns_used < 0:
        raise QuestionError(f"turns_used must be non-negative, got {turns_used}")
    if turns_used >= config.max_turns:
        return True
    return not rank_nodes(graph, 1, ask_threshold=config.ask_threshold, suppressed=suppressed)
