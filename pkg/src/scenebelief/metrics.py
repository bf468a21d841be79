"""Graph-vs-ground-truth correspondence metrics.

Precision/recall/F1 over three categories: entity names, (entity,
attribute, argmax value) triples, and (subject, argmax predicate,
object) triples. Matching uses normalized names only; no stemming or
synonyms, so a score is always explainable by eye.
"""

from __future__ import annotations

from dataclasses import dataclass

from scenebelief.graph import BeliefGraph, EntityStatus

PRESENCE_FLOOR = 0.5


def normalize_name(name: str) -> str:
    return " ".join(name.lower().split())


@dataclass(frozen=True)
class CategoryScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsTriple:
    entities: CategoryScore
    attributes: CategoryScore
    relations: CategoryScore

    def perfect(self) -> bool:
        return (self.entities.f1 == 1.0 and self.attributes.f1 == 1.0
                and self.relations.f1 == 1.0)


def _score(predicted: set, truth: set) -> CategoryScore:
    matched = len(predicted & truth)
    if predicted:
        precision = matched / len(predicted)
    else:
        precision = 1.0 if not truth else 0.0
    if truth:
        recall = matched / len(truth)
    else:
        recall = 1.0 if not predicted else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return CategoryScore(precision, recall, f1)


def _included_entities(graph: BeliefGraph, truth_side: bool) -> dict[str, str]:
    """Map entity id -> normalized name for the entities that count.

    Predicted graphs include entities believed present (presence at or
    above the floor); truth graphs include exactly the explicit ones.
    """
    included: dict[str, str] = {}
    for entity in graph.entities.values():
        if truth_side:
            keep = entity.status is EntityStatus.EXPLICIT
        else:
            keep = entity.presence >= PRESENCE_FLOOR
        if keep:
            included[entity.id] = normalize_name(entity.name)
    return included


def _triples(graph: BeliefGraph, included: dict[str, str]
             ) -> tuple[set[tuple[str, str, str]], set[tuple[str, str, str]]]:
    attributes = {(included[entity_id], normalize_name(attr_name),
                   normalize_name(dist.argmax))
                  for entity_id, entity in graph.entities.items() if entity_id in included
                  for attr_name, dist in entity.attributes.items()}
    relations = {(included[relation.subject], normalize_name(relation.predicate.argmax),
                  included[relation.object])
                 for relation in graph.relations.values()
                 if relation.subject in included and relation.object in included}
    return attributes, relations


def graph_metrics(predicted: BeliefGraph, truth: BeliefGraph) -> MetricsTriple:
    """Score a predicted graph against a zero-uncertainty truth graph."""
    predicted_entities = _included_entities(predicted, truth_side=False)
    truth_entities = _included_entities(truth, truth_side=True)
    predicted_attrs, predicted_rels = _triples(predicted, predicted_entities)
    truth_attrs, truth_rels = _triples(truth, truth_entities)
    return MetricsTriple(
        entities=_score(set(predicted_entities.values()), set(truth_entities.values())),
        attributes=_score(predicted_attrs, truth_attrs),
        relations=_score(predicted_rels, truth_rels),
    )
