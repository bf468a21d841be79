"""Structured wire mapping for graphs, questions, answers and edits.

Mechanical, lossless translation between the in-memory value types and
plain JSON-able records. Field names mirror the `.bgraph` vocabulary.
Distribution options are (label, prob) arrays in distribution order so
clients can render them without re-sorting; the documented schema ships
in docs/wire-schema.json.
"""

from __future__ import annotations

from typing import Any

from scenebelief.graph import (
    BeliefGraph,
    Distribution,
    EditOp,
    Entity,
    EntityStatus,
    GraphEdit,
    NodeKind,
    NodeRef,
    Option,
    Relation,
)
from scenebelief.questions import Answer, AnswerKind, ClarificationQuestion


class WireError(ValueError):
    """Malformed wire payload."""


def distribution_to_wire(dist: Distribution) -> list[list[Any]]:
    return [[option.value, option.prob] for option in dist.options]


def distribution_from_wire(payload: Any) -> Distribution:
    if not isinstance(payload, list) or not payload:
        raise WireError("distribution must be a non-empty array of [label, prob] pairs")
    options = []
    for item in payload:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise WireError(f"bad distribution option {item!r}")
        options.append(Option(str(item[0]), float(item[1])))
    return Distribution(tuple(options))


def entity_to_wire(entity: Entity) -> dict[str, Any]:
    return {
        "id": entity.id,
        "name": entity.name,
        "status": entity.status.value,
        "presence": entity.presence,
        "attributes": [{"name": name, "options": distribution_to_wire(dist)}
                       for name, dist in sorted(entity.attributes.items())],
    }


def entity_from_wire(payload: dict[str, Any]) -> Entity:
    try:
        attributes = {str(attr["name"]): distribution_from_wire(attr["options"])
                      for attr in payload.get("attributes", [])}
        return Entity(
            id=str(payload["id"]),
            name=str(payload.get("name", payload["id"])),
            status=EntityStatus(payload["status"]),
            presence=float(payload["presence"]),
            attributes=attributes,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise WireError(f"bad entity payload: {exc}") from exc


def relation_to_wire(relation: Relation) -> dict[str, Any]:
    return {
        "id": relation.id,
        "subject": relation.subject,
        "object": relation.object,
        "description": relation.description,
        "containment": relation.containment,
        "alt": distribution_to_wire(relation.predicate),
    }


def relation_from_wire(payload: dict[str, Any]) -> Relation:
    try:
        return Relation(
            id=str(payload["id"]),
            subject=str(payload["subject"]),
            object=str(payload["object"]),
            description=str(payload.get("description", "")),
            predicate=distribution_from_wire(payload["alt"]),
            containment=bool(payload.get("containment", False)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise WireError(f"bad relation payload: {exc}") from exc


def graph_to_wire(graph: BeliefGraph) -> dict[str, Any]:
    return {
        "prompt": graph.origin_prompt,
        "version": graph.version,
        "entities": [entity_to_wire(graph.entities[entity_id])
                     for entity_id in sorted(graph.entities)],
        "relations": [relation_to_wire(graph.relations[relation_id])
                      for relation_id in sorted(graph.relations)],
    }


def graph_from_wire(payload: dict[str, Any]) -> BeliefGraph:
    entities = {}
    for raw in payload.get("entities", []):
        entity = entity_from_wire(raw)
        entities[entity.id] = entity
    relations = {}
    for raw in payload.get("relations", []):
        relation = relation_from_wire(raw)
        relations[relation.id] = relation
    return BeliefGraph(
        origin_prompt=str(payload.get("prompt", "")),
        entities=entities,
        relations=relations,
        version=int(payload.get("version", 0)),
    )


def node_to_wire(node: NodeRef) -> dict[str, Any]:
    wire: dict[str, Any] = {"kind": node.kind.value}
    if node.entity is not None:
        wire["entity"] = node.entity
    if node.attribute is not None:
        wire["attribute"] = node.attribute
    if node.relation is not None:
        wire["relation"] = node.relation
    return wire


def node_from_wire(payload: dict[str, Any]) -> NodeRef:
    try:
        return NodeRef(
            kind=NodeKind(payload["kind"]),
            entity=payload.get("entity"),
            attribute=payload.get("attribute"),
            relation=payload.get("relation"),
        )
    except (KeyError, ValueError) as exc:
        raise WireError(f"bad node payload: {exc}") from exc


def question_to_wire(question: ClarificationQuestion) -> dict[str, Any]:
    return {
        "id": question.id,
        "node": node_to_wire(question.node),
        "text": question.text,
        "options": list(question.options),
        "option_probs": list(question.option_probs),
        "free_text_allowed": question.free_text_allowed,
        "asked_at_version": question.asked_at_version,
    }


def question_from_wire(payload: dict[str, Any]) -> ClarificationQuestion:
    try:
        options = tuple(str(o) for o in payload["options"])
        probs = payload.get("option_probs")
        return ClarificationQuestion(
            id=str(payload["id"]),
            node=node_from_wire(payload["node"]),
            text=str(payload["text"]),
            options=options,
            option_probs=(tuple(float(p) for p in probs) if probs is not None
                          else (0.0,) * len(options)),
            asked_at_version=int(payload["asked_at_version"]),
            free_text_allowed=bool(payload.get("free_text_allowed", True)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise WireError(f"bad question payload: {exc}") from exc


def answer_to_wire(answer: Answer) -> dict[str, Any]:
    return {"question_id": answer.question_id, "kind": answer.kind.value,
            "value": answer.value}


def answer_from_wire(payload: dict[str, Any]) -> Answer:
    try:
        return Answer(
            question_id=str(payload["question_id"]),
            kind=AnswerKind(payload["kind"]),
            value=str(payload.get("value", "")),
        )
    except (KeyError, ValueError) as exc:
        raise WireError(f"bad answer payload: {exc}") from exc


def edit_to_wire(edit: GraphEdit) -> dict[str, Any]:
    wire: dict[str, Any] = {"op": edit.op.value}
    if edit.entity is not None:
        wire["entity"] = entity_to_wire(edit.entity)
    if edit.relation is not None:
        wire["relation"] = relation_to_wire(edit.relation)
    for name in ("entity_id", "relation_id", "attribute", "value", "presence"):
        attr = getattr(edit, name)
        if attr is not None:
            wire[name] = attr
    if edit.status is not None:
        wire["status"] = edit.status.value
    if edit.distribution is not None:
        wire["distribution"] = distribution_to_wire(edit.distribution)
    return wire


def edit_from_wire(payload: dict[str, Any]) -> GraphEdit:
    try:
        op = EditOp(payload["op"])
    except (KeyError, ValueError) as exc:
        raise WireError(f"bad edit op: {exc}") from exc
    try:
        return GraphEdit(
            op=op,
            entity=entity_from_wire(payload["entity"]) if "entity" in payload else None,
            relation=relation_from_wire(payload["relation"]) if "relation" in payload else None,
            entity_id=payload.get("entity_id"),
            relation_id=payload.get("relation_id"),
            status=EntityStatus(payload["status"]) if "status" in payload else None,
            presence=float(payload["presence"]) if "presence" in payload else None,
            attribute=payload.get("attribute"),
            value=payload.get("value"),
            distribution=(distribution_from_wire(payload["distribution"])
                          if "distribution" in payload else None),
        )
    except (ValueError, TypeError) as exc:
        raise WireError(f"bad edit payload: {exc}") from exc
