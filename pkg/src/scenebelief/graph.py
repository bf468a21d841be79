"""Probabilistic belief-graph scene model.

The graph factors the agent's belief about the intended picture into
entities (with presence probabilities), per-entity attribute value
distributions, and inter-entity relations with predicate distributions.
All types are immutable values: every mutating operation returns a new
graph with a bumped version, so graphs can be shared freely across
threads and snapshotted without copying.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence

PROB_TOLERANCE = 1e-6

# Inclusion floors for prompt compilation: entities the agent believes
# more absent than present are omitted, as are attribute values the
# agent would not bet on.
PRESENCE_FLOOR = 0.5
ATTR_FLOOR = 0.5

PRESENCE_OPTIONS = ("present", "absent")


class BeliefGraphError(Exception):
    """Base class for belief-graph errors."""


class DistributionError(BeliefGraphError):
    """Raised when a distribution cannot be constructed."""


class NodeLookupError(BeliefGraphError):
    """Raised when a NodeRef does not resolve in the graph."""


class AnswerError(BeliefGraphError):
    """Raised when an answer value is unusable for the target node."""


class EditRejected(BeliefGraphError):
    """Raised when an edit would break graph invariants; the graph is unchanged."""

    def __init__(self, message: str, violations: Sequence["Violation"] = ()) -> None:
        super().__init__(message)
        self.violations = list(violations)


class InvalidGraphError(BeliefGraphError):
    """Raised when an operation requires a valid graph but validate() is non-empty."""


class EntityStatus(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    DENIED = "denied"


class NodeKind(str, Enum):
    ENTITY_PRESENCE = "entity-presence"
    ATTRIBUTE = "attribute"
    RELATION_PREDICATE = "relation-predicate"


class EditOp(str, Enum):
    ADD_ENTITY = "add-entity"
    REMOVE_ENTITY = "remove-entity"
    SET_STATUS = "set-status"
    SET_ATTRIBUTE_VALUE = "set-attribute-value"
    SET_ATTRIBUTE_DISTRIBUTION = "set-attribute-distribution"
    SET_RELATION_PREDICATE = "set-relation-predicate"
    ADD_RELATION = "add-relation"
    REMOVE_RELATION = "remove-relation"


class Option(NamedTuple):
    value: str
    prob: float


def _sorted_options(options: Iterable[Option]) -> tuple[Option, ...]:
    return tuple(sorted(options, key=lambda o: (-o.prob, o.value)))


@dataclass(frozen=True)
class Distribution:
    """An ordered categorical distribution over text labels.

    Options are kept sorted by probability descending, ties broken by
    label ascending, so the first option is always the argmax and the
    rendering order for questions and the UI is fixed at construction.
    """

    options: tuple[Option, ...]

    def __post_init__(self) -> None:
        opts = _sorted_options(Option(v, float(p)) for v, p in self.options)
        if not opts:
            raise DistributionError("distribution needs at least one option")
        seen: set[str] = set()
        for value, prob in opts:
            if not value:
                raise DistributionError("option labels must be non-empty")
            if value in seen:
                raise DistributionError(f"duplicate option label {value!r}")
            seen.add(value)
            if not (0.0 <= prob <= 1.0):
                raise DistributionError(f"probability {prob} for {value!r} outside [0,1]")
        total = sum(p for _, p in opts)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise DistributionError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "options", opts)

    @property
    def argmax(self) -> str:
        return self.options[0].value

    @property
    def argmax_prob(self) -> float:
        return self.options[0].prob

    def labels(self) -> tuple[str, ...]:
        return tuple(o.value for o in self.options)

    def prob_of(self, value: str) -> float:
        for option in self.options:
            if option.value == value:
                return option.prob
        return 0.0

    def is_point_mass(self) -> bool:
        return self.options[0].prob == 1.0

    def collapse(self, value: str) -> "Distribution":
        """Collapse onto ``value`` with probability 1.

        A listed value becomes a single point-mass option; a novel value
        is inserted and the previous options are retained at probability
        zero, keeping the rejected alternatives visible.
        """
        if not value:
            raise AnswerError("cannot collapse onto an empty value")
        if value in self.labels():
            return Distribution((Option(value, 1.0),))
        kept = tuple(Option(v, 0.0) for v, _ in self.options)
        return Distribution((Option(value, 1.0),) + kept)

    def entropy(self) -> float:
        """Shannon entropy in bits."""
        return -sum(p * math.log2(p) for _, p in self.options if p > 0.0)

    def normalized_entropy(self) -> float:
        """Entropy divided by its maximum for this arity, in [0,1]."""
        n = len(self.options)
        if n < 2:
            return 0.0
        return min(1.0, self.entropy() / math.log2(n))


def normalize(raw: Sequence[tuple[str, float]]) -> Distribution:
    """Build a Distribution from non-negative weights."""
    if not raw:
        raise DistributionError("cannot normalize an empty option list")
    for value, weight in raw:
        if weight < 0:
            raise DistributionError(f"negative weight {weight} for {value!r}")
    total = float(sum(w for _, w in raw))
    if total <= 0:
        raise DistributionError("weights must not all be zero")
    return Distribution(tuple(Option(v, w / total) for v, w in raw))


def point_mass(value: str) -> Distribution:
    return Distribution((Option(value, 1.0),))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@dataclass(frozen=True)
class Entity:
    """One thing the picture may contain.

    ``status`` couples with ``presence``: explicit entities (literally
    mentioned by the user) are certainly present, denied ones certainly
    absent, and implicit ones carry an open-interval presence belief.
    """

    id: str
    name: str
    status: EntityStatus
    presence: float
    attributes: dict[str, Distribution] = field(default_factory=dict)

    def with_attribute(self, name: str, dist: Distribution) -> "Entity":
        attrs = dict(self.attributes)
        attrs[name] = dist
        return replace(self, attributes=attrs)

    def with_status(self, status: EntityStatus, presence: float) -> "Entity":
        return replace(self, status=status, presence=presence)


def explicit_entity(entity_id: str, name: str | None = None,
                    attributes: dict[str, Distribution] | None = None) -> Entity:
    return Entity(entity_id, name or entity_id, EntityStatus.EXPLICIT, 1.0,
                  dict(attributes or {}))


def implicit_entity(entity_id: str, name: str | None = None, presence: float = 0.5,
                    attributes: dict[str, Distribution] | None = None) -> Entity:
    return Entity(entity_id, name or entity_id, EntityStatus.IMPLICIT, presence,
                  dict(attributes or {}))


@dataclass(frozen=True)
class Relation:
    """A directed relation between two entities with an uncertain predicate."""

    id: str
    subject: str
    object: str
    description: str
    predicate: Distribution
    containment: bool = False


@dataclass(frozen=True)
class BeliefGraph:
    """The agent's belief state over possible pictures."""

    origin_prompt: str
    entities: dict[str, Entity] = field(default_factory=dict)
    relations: dict[str, Relation] = field(default_factory=dict)
    version: int = 0

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise NodeLookupError(f"unknown entity {entity_id!r}") from None

    def relation(self, relation_id: str) -> Relation:
        try:
            return self.relations[relation_id]
        except KeyError:
            raise NodeLookupError(f"unknown relation {relation_id!r}") from None

    def with_entity(self, entity: Entity) -> "BeliefGraph":
        entities = dict(self.entities)
        entities[entity.id] = entity
        return replace(self, entities=entities, version=self.version + 1)

    def with_relation(self, relation: Relation) -> "BeliefGraph":
        relations = dict(self.relations)
        relations[relation.id] = relation
        return replace(self, relations=relations, version=self.version + 1)


@dataclass(frozen=True)
class NodeRef:
    """Uniform address for a questionable belief node."""

    kind: NodeKind
    entity: str | None = None
    attribute: str | None = None
    relation: str | None = None

    def key(self) -> str:
        """Canonical sort key; total order over all node kinds."""
        if self.kind is NodeKind.ENTITY_PRESENCE:
            return f"entity-presence/{self.entity}"
        if self.kind is NodeKind.ATTRIBUTE:
            return f"attribute/{self.entity}/{self.attribute}"
        return f"relation-predicate/{self.relation}"

    @staticmethod
    def presence(entity_id: str) -> "NodeRef":
        return NodeRef(NodeKind.ENTITY_PRESENCE, entity=entity_id)

    @staticmethod
    def attr(entity_id: str, attribute: str) -> "NodeRef":
        return NodeRef(NodeKind.ATTRIBUTE, entity=entity_id, attribute=attribute)

    @staticmethod
    def rel(relation_id: str) -> "NodeRef":
        return NodeRef(NodeKind.RELATION_PREDICATE, relation=relation_id)


@dataclass(frozen=True)
class GraphEdit:
    """One direct user edit to the belief graph.

    Only the fields relevant to ``op`` are set; see ``apply_edit`` for
    the per-op payload contract.
    """

    op: EditOp
    entity: Entity | None = None
    relation: Relation | None = None
    entity_id: str | None = None
    relation_id: str | None = None
    status: EntityStatus | None = None
    presence: float | None = None
    attribute: str | None = None
    value: str | None = None
    distribution: Distribution | None = None


@dataclass(frozen=True)
class Violation:
    """One broken invariant found by validate()."""

    rule: str
    node: str
    detail: str


def new_graph(origin_prompt: str) -> BeliefGraph:
    return BeliefGraph(origin_prompt=origin_prompt)


def validate(graph: BeliefGraph) -> list[Violation]:
    """Check every graph invariant; violations are data, not errors."""
    found: list[Violation] = []

    def bad(rule: str, node: str, detail: str) -> None:
        found.append(Violation(rule, node, detail))

    for key, entity in graph.entities.items():
        if key != entity.id:
            bad("id-key-mismatch", key, f"entity keyed {key!r} carries id {entity.id!r}")
        if not entity.id:
            bad("empty-id", key, "entity id must be non-empty")
        if not entity.name:
            bad("empty-name", entity.id, "entity name must be non-empty")
        if entity.status is EntityStatus.EXPLICIT and entity.presence != 1.0:
            bad("explicit-presence-must-be-1", entity.id,
                f"explicit entity has presence {entity.presence}")
        elif entity.status is EntityStatus.DENIED and entity.presence != 0.0:
            bad("denied-presence-must-be-0", entity.id,
                f"denied entity has presence {entity.presence}")
        elif entity.status is EntityStatus.IMPLICIT and not 0.0 < entity.presence < 1.0:
            bad("implicit-presence-open-interval", entity.id,
                f"implicit entity has presence {entity.presence}")
        for attr_name, dist in entity.attributes.items():
            node = f"{entity.id}.{attr_name}"
            if not attr_name:
                bad("empty-attribute-name", entity.id, "attribute name must be non-empty")
            found.extend(_check_distribution(dist, node))

    for key, relation in graph.relations.items():
        if key != relation.id:
            bad("id-key-mismatch", key, f"relation keyed {key!r} carries id {relation.id!r}")
        if relation.subject == relation.object:
            bad("self-relation", relation.id, "relation endpoints must differ")
        for endpoint in (relation.subject, relation.object):
            if endpoint not in graph.entities:
                bad("dangling-endpoint", relation.id, f"endpoint {endpoint!r} not in graph")
        found.extend(_check_distribution(relation.predicate, relation.id))

    return found


def _check_distribution(dist: Distribution, node: str) -> list[Violation]:
    found: list[Violation] = []
    total = 0.0
    seen: set[str] = set()
    previous = None
    for value, prob in dist.options:
        total += prob
        if not value:
            found.append(Violation("empty-option-label", node, "option label is empty"))
        if value in seen:
            found.append(Violation("duplicate-option", node, f"option {value!r} repeated"))
        seen.add(value)
        if not (0.0 <= prob <= 1.0):
            found.append(Violation("probability-range", node, f"{value!r} has prob {prob}"))
        if previous is not None and previous.prob < prob:
            found.append(Violation("unsorted-options", node, "options not in descending order"))
        elif previous is not None and previous.prob == prob and previous.value > value:
            found.append(Violation("unsorted-options", node, "tie not broken lexicographically"))
        previous = Option(value, prob)
    if abs(total - 1.0) > PROB_TOLERANCE:
        found.append(Violation("probability-sum", node, f"probabilities sum to {total}"))
    return found


def iter_nodes(graph: BeliefGraph) -> Iterator[NodeRef]:
    """All addressable belief nodes, in canonical key order."""
    refs: list[NodeRef] = []
    for entity in graph.entities.values():
        refs.append(NodeRef.presence(entity.id))
        for attr_name in entity.attributes:
            refs.append(NodeRef.attr(entity.id, attr_name))
    for relation in graph.relations.values():
        refs.append(NodeRef.rel(relation.id))
    refs.sort(key=lambda r: r.key())
    return iter(refs)


def resolve(graph: BeliefGraph, node: NodeRef) -> Distribution | float:
    """Return the node's distribution, or the presence probability for presence nodes."""
    if node.kind is NodeKind.ENTITY_PRESENCE:
        return graph.entity(node.entity or "").presence
    if node.kind is NodeKind.ATTRIBUTE:
        entity = graph.entity(node.entity or "")
        try:
            return entity.attributes[node.attribute or ""]
        except KeyError:
            raise NodeLookupError(
                f"entity {entity.id!r} has no attribute {node.attribute!r}") from None
    return graph.relation(node.relation or "").predicate


def node_uncertainty(graph: BeliefGraph, node: NodeRef) -> float:
    """Normalized Shannon entropy of the node's belief, in [0,1].

    Presence nodes use binary entropy of the presence probability;
    distribution nodes use entropy divided by log2 of the option count.
    """
    target = resolve(graph, node)
    if isinstance(target, float):
        return binary_entropy(target)
    return target.normalized_entropy()


def is_settled(graph: BeliefGraph, node: NodeRef) -> bool:
    """True when the node's belief is a point mass (no remaining uncertainty)."""
    target = resolve(graph, node)
    if isinstance(target, float):
        return target in (0.0, 1.0)
    return target.is_point_mass()


def collapse_relation(relation: Relation, chosen_value: str) -> Relation:
    """Collapse the predicate and rewrite the description to match.

    The description sentence mentions the old predicate; once the user
    commits to a different one the sentence is updated in place so the
    UI and the compiled prompt stay consistent.
    """
    description = rewrite_description(relation.description, relation.predicate,
                                      chosen_value)
    return replace(relation, description=description,
                   predicate=relation.predicate.collapse(chosen_value))


def apply_answer(graph: BeliefGraph, node: NodeRef, chosen_value: str) -> BeliefGraph:
    """Commit an answer: collapse the target node onto ``chosen_value``.

    Presence answers accept only "present"/"absent" and flip the entity
    status to explicit/denied accordingly. Attribute and relation
    answers collapse the distribution, inserting novel free-text values.
    """
    if not chosen_value:
        raise AnswerError("answer value must be non-empty")
    if node.kind is NodeKind.ENTITY_PRESENCE:
        entity = graph.entity(node.entity or "")
        if chosen_value not in PRESENCE_OPTIONS:
            raise AnswerError(
                f"presence answers must be one of {PRESENCE_OPTIONS}, got {chosen_value!r}")
        if chosen_value == "present":
            updated = entity.with_status(EntityStatus.EXPLICIT, 1.0)
        else:
            updated = entity.with_status(EntityStatus.DENIED, 0.0)
        return graph.with_entity(updated)
    if node.kind is NodeKind.ATTRIBUTE:
        dist = resolve(graph, node)
        assert isinstance(dist, Distribution)
        entity = graph.entity(node.entity or "")
        return graph.with_entity(entity.with_attribute(node.attribute or "",
                                                       dist.collapse(chosen_value)))
    relation = graph.relation(node.relation or "")
    return graph.with_relation(collapse_relation(relation, chosen_value))


def apply_edit(graph: BeliefGraph, edit: GraphEdit) -> BeliefGraph:
    """Apply a direct graph edit atomically.

    Any edit whose result would fail validate() is rejected with
    EditRejected and the input graph is left untouched.
    """
    result = _apply_edit_unchecked(graph, edit)
    violations = validate(result)
    if violations:
        raise EditRejected(
            f"edit {edit.op.value} would violate: "
            + "; ".join(f"{v.rule}@{v.node}" for v in violations),
            violations)
    return result


def _require(value, what: str):
    if value is None:
        raise EditRejected(f"edit payload is missing {what}")
    return value


def _apply_edit_unchecked(graph: BeliefGraph, edit: GraphEdit) -> BeliefGraph:
    op = edit.op
    if op is EditOp.ADD_ENTITY:
        entity = _require(edit.entity, "entity")
        if entity.id in graph.entities:
            raise EditRejected(f"entity {entity.id!r} already exists")
        return graph.with_entity(entity)

    if op is EditOp.REMOVE_ENTITY:
        entity_id = _require(edit.entity_id, "entity_id")
        graph.entity(entity_id)
        for relation in graph.relations.values():
            if entity_id in (relation.subject, relation.object):
                raise EditRejected(
                    f"cannot remove {entity_id!r}: relation {relation.id!r} still references it",
                    [Violation("dangling-endpoint", relation.id,
                               f"would dangle on removal of {entity_id!r}")])
        entities = {k: v for k, v in graph.entities.items() if k != entity_id}
        return replace(graph, entities=entities, version=graph.version + 1)

    if op is EditOp.SET_STATUS:
        entity = graph.entity(_require(edit.entity_id, "entity_id"))
        status = _require(edit.status, "status")
        if status is EntityStatus.EXPLICIT:
            presence = 1.0
        elif status is EntityStatus.DENIED:
            presence = 0.0
        else:
            presence = edit.presence if edit.presence is not None else 0.5
        return graph.with_entity(entity.with_status(status, presence))

    if op is EditOp.SET_ATTRIBUTE_VALUE:
        entity = graph.entity(_require(edit.entity_id, "entity_id"))
        attribute = _require(edit.attribute, "attribute")
        value = _require(edit.value, "value")
        current = entity.attributes.get(attribute)
        dist = current.collapse(value) if current is not None else point_mass(value)
        return graph.with_entity(entity.with_attribute(attribute, dist))

    if op is EditOp.SET_ATTRIBUTE_DISTRIBUTION:
        entity = graph.entity(_require(edit.entity_id, "entity_id"))
        attribute = _require(edit.attribute, "attribute")
        dist = _require(edit.distribution, "distribution")
        return graph.with_entity(entity.with_attribute(attribute, dist))

    if op is EditOp.SET_RELATION_PREDICATE:
        relation = graph.relation(_require(edit.relation_id, "relation_id"))
        value = _require(edit.value, "value")
        return graph.with_relation(collapse_relation(relation, value))

    if op is EditOp.ADD_RELATION:
        relation = _require(edit.relation, "relation")
        if relation.id in graph.relations:
            raise EditRejected(f"relation {relation.id!r} already exists")
        for endpoint in (relation.subject, relation.object):
            if endpoint not in graph.entities:
                raise EditRejected(f"relation endpoint {endpoint!r} does not exist")
        return graph.with_relation(relation)

    if op is EditOp.REMOVE_RELATION:
        relation_id = _require(edit.relation_id, "relation_id")
        graph.relation(relation_id)
        relations = {k: v for k, v in graph.relations.items() if k != relation_id}
        return replace(graph, relations=relations, version=graph.version + 1)

    raise EditRejected(f"unknown edit op {op!r}")


def diff(a: BeliefGraph, b: BeliefGraph) -> list[GraphEdit]:
    """Edits that transform ``a`` into ``b`` (version aside).

    Both graphs must come from the same session: the origin prompt is
    not editable, so it has to agree. Prefers targeted set-* edits;
    entities whose name changed or whose attribute set shrank are
    rebuilt via remove+add, with any relations touching them lifted out
    and re-added around the rebuild.
    """
    if a.origin_prompt != b.origin_prompt:
        raise ValueError("diff requires graphs with the same origin prompt")
    rebuild: set[str] = set()
    surviving_edits: list[GraphEdit] = []
    for entity_id in sorted(a.entities):
        if entity_id not in b.entities:
            continue
        ea, eb = a.entities[entity_id], b.entities[entity_id]
        if ea == eb:
            continue
        if ea.name != eb.name or set(ea.attributes) - set(eb.attributes):
            rebuild.add(entity_id)
            continue
        if (ea.status, ea.presence) != (eb.status, eb.presence):
            surviving_edits.append(GraphEdit(EditOp.SET_STATUS, entity_id=entity_id,
                                             status=eb.status, presence=eb.presence))
        for attr_name in sorted(eb.attributes):
            if ea.attributes.get(attr_name) != eb.attributes[attr_name]:
                surviving_edits.append(GraphEdit(
                    EditOp.SET_ATTRIBUTE_DISTRIBUTION, entity_id=entity_id,
                    attribute=attr_name, distribution=eb.attributes[attr_name]))

    remove_relations: list[GraphEdit] = []
    predicate_edits: list[GraphEdit] = []
    add_relations: list[GraphEdit] = []
    dropped: set[str] = set()
    for relation_id in sorted(a.relations):
        ra = a.relations[relation_id]
        rb = b.relations.get(relation_id)
        touches_rebuild = bool({ra.subject, ra.object} & rebuild)
        if rb is not None and ra == rb and not touches_rebuild:
            continue
        if rb is not None and not touches_rebuild and _predicate_only_change(ra, rb):
            predicate_edits.append(GraphEdit(EditOp.SET_RELATION_PREDICATE,
                                             relation_id=relation_id, value=rb.predicate.argmax))
            continue
        remove_relations.append(GraphEdit(EditOp.REMOVE_RELATION, relation_id=relation_id))
        dropped.add(relation_id)
    for relation_id in sorted(b.relations):
        if relation_id not in a.relations or relation_id in dropped:
            add_relations.append(GraphEdit(EditOp.ADD_RELATION, relation=b.relations[relation_id]))

    remove_entities = [GraphEdit(EditOp.REMOVE_ENTITY, entity_id=entity_id)
                       for entity_id in sorted(set(a.entities) - set(b.entities) | rebuild)]
    add_entities = [GraphEdit(EditOp.ADD_ENTITY, entity=b.entities[entity_id])
                    for entity_id in sorted(set(b.entities) - set(a.entities) | rebuild)]

    return (remove_relations + remove_entities + add_entities
            + surviving_edits + predicate_edits + add_relations)


def _predicate_only_change(ra: Relation, rb: Relation) -> bool:
    if (ra.subject, ra.object, ra.containment) != (rb.subject, rb.object, rb.containment):
        return False
    return collapse_relation(ra, rb.predicate.argmax) == rb


def apply_edits(graph: BeliefGraph, edits: Iterable[GraphEdit]) -> BeliefGraph:
    for edit in edits:
        graph = apply_edit(graph, edit)
    return graph


def to_prompt(graph: BeliefGraph) -> str:
    """Compile the graph into the enriched generation prompt.

    Deterministic: entities sorted by id with argmax attribute values,
    relation descriptions rewritten onto their argmax predicate.
    Entities below the presence floor (including denied ones) are
    skipped, as are relations touching a skipped entity.
    """
    violations = validate(graph)
    if violations:
        raise InvalidGraphError(
            "cannot compile an invalid graph: "
            + "; ".join(f"{v.rule}@{v.node}" for v in violations))

    included: list[Entity] = [graph.entities[entity_id] for entity_id in sorted(graph.entities)
                              if graph.entities[entity_id].presence >= PRESENCE_FLOOR]
    included_ids = {entity.id for entity in included}

    entity_bits: list[str] = []
    for entity in included:
        qualifiers = [f"{name}: {dist.argmax}" for name, dist in sorted(entity.attributes.items())
                      if dist.argmax_prob >= ATTR_FLOOR]
        if qualifiers:
            entity_bits.append(f"{entity.name} ({', '.join(qualifiers)})")
        else:
            entity_bits.append(entity.name)

    relation_bits: list[str] = []
    for relation_id in sorted(graph.relations):
        relation = graph.relations[relation_id]
        if relation.subject in included_ids and relation.object in included_ids:
            relation_bits.append(_rewrite_description(relation))

    sections = [graph.origin_prompt]
    if entity_bits:
        sections.append("Scene: " + "; ".join(entity_bits))
    if relation_bits:
        sections.append("Relations: " + "; ".join(relation_bits))
    return " | ".join(section for section in sections if section)


def rewrite_description(description: str, predicate: Distribution, target: str) -> str:
    """Rewrite a relation sentence onto the ``target`` predicate label.

    Replaces the first word-boundary occurrence of a competing predicate
    label; when the sentence mentions no known label at all the target
    is appended parenthetically rather than guessed into place.
    """
    if re.search(rf"\b{re.escape(target)}\b", description):
        return description
    for value, _ in predicate.options:
        if value == target:
            continue
        rewritten, count = re.subn(rf"\b{re.escape(value)}\b", target, description, count=1)
        if count:
            return rewritten
    return f"{description} ({target})"


def _rewrite_description(relation: Relation) -> str:
    return rewrite_description(relation.description, relation.predicate,
                               relation.predicate.argmax)


def distributions_equivalent(a: Distribution, b: Distribution,
                             prob_tol: float = PROB_TOLERANCE) -> bool:
    """Label-set equality with per-label probability tolerance.

    Order-insensitive on purpose: near-ties may legitimately reorder
    across a serialization round trip.
    """
    map_a = {v: p for v, p in a.options}
    map_b = {v: p for v, p in b.options}
    if set(map_a) != set(map_b):
        return False
    return all(abs(map_a[v] - map_b[v]) <= prob_tol for v in map_a)


def graphs_equivalent(a: BeliefGraph, b: BeliefGraph, *, prob_tol: float = PROB_TOLERANCE,
                      ignore_version: bool = True) -> bool:
    """Structural graph equality with probability tolerance."""
    if a.origin_prompt != b.origin_prompt:
        return False
    if not ignore_version and a.version != b.version:
        return False
    if set(a.entities) != set(b.entities) or set(a.relations) != set(b.relations):
        return False
    for entity_id, ea in a.entities.items():
        eb = b.entities[entity_id]
        if (ea.name, ea.status) != (eb.name, eb.status):
            return False
        if abs(ea.presence - eb.presence) > prob_tol:
            return False
        if set(ea.attributes) != set(eb.attributes):
            return False
        for attr_name, dist in ea.attributes.items():
            if not distributions_equivalent(dist, eb.attributes[attr_name], prob_tol):
                return False
    for relation_id, ra in a.relations.items():
        rb = b.relations[relation_id]
        if (ra.subject, ra.object, ra.description, ra.containment) != \
                (rb.subject, rb.object, rb.description, rb.containment):
            return False
        if not distributions_equivalent(ra.predicate, rb.predicate, prob_tol):
            return False
    return True
