"""Shared test fixtures and seeded random graph generators."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from scenebelief.graph import (
    BeliefGraph,
    Distribution,
    Entity,
    EntityStatus,
    Option,
    Relation,
    normalize,
    point_mass,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"

_WORDS = [
    "cat", "ball", "table", "mug", "dog", "tree", "lamp", "boat", "cloud",
    "river", "chair", "window", "plate", "bird", "hat", "box", "door",
]
_ATTR_NAMES = ["color", "size", "material", "pose", "texture", "style", "count"]
_VALUES = [
    "black", "white", "red", "small", "large", "wood", "metal", "round",
    "a ball of wool", "a tennis ball", "two words", 'quo"ted', "naïve",
    "with\ttab", "0leading-digit",
]
_PREDICATES = ["on", "under", "next to", "behind", "inside", "holds", "plays with"]


def random_distribution(rng: random.Random, max_options: int = 5) -> Distribution:
    count = rng.randint(1, max_options)
    labels = rng.sample(_VALUES, count)
    weights = [rng.uniform(0.05, 1.0) for _ in range(count)]
    return normalize(list(zip(labels, weights)))


def random_entity(rng: random.Random, entity_id: str, max_attrs: int = 4) -> Entity:
    roll = rng.random()
    if roll < 0.5:
        status, presence = EntityStatus.EXPLICIT, 1.0
    elif roll < 0.85:
        status, presence = EntityStatus.IMPLICIT, rng.uniform(0.01, 0.99)
    else:
        status, presence = EntityStatus.DENIED, 0.0
    attrs = {}
    for attr_name in rng.sample(_ATTR_NAMES, rng.randint(0, max_attrs)):
        attrs[attr_name] = random_distribution(rng)
    name = entity_id if rng.random() < 0.5 else rng.choice(_WORDS)
    return Entity(entity_id, name, status, presence, attrs)


def random_graph(rng: random.Random, max_entities: int = 10, max_attrs: int = 4,
                 max_relations: int = 4) -> BeliefGraph:
    entity_count = rng.randint(0, max_entities)
    entities = {}
    for i in range(entity_count):
        entity_id = f"{rng.choice(_WORDS)}{i}"
        entities[entity_id] = random_entity(rng, entity_id, max_attrs)
    relations = {}
    ids = sorted(entities)
    if len(ids) >= 2:
        for i in range(rng.randint(0, max_relations)):
            subject, obj = rng.sample(ids, 2)
            predicate = random_distribution(rng, max_options=4)
            description_bits = [rng.choice(_WORDS), predicate.argmax, rng.choice(_WORDS)]
            relations[f"rel{i}"] = Relation(
                f"rel{i}", subject, obj, "the " + " ".join(description_bits),
                predicate, rng.random() < 0.3)
    prompt = " ".join(rng.sample(_WORDS, rng.randint(0, 4)))
    return BeliefGraph(origin_prompt=prompt, entities=entities, relations=relations)


def random_truth_graph(rng: random.Random, max_entities: int = 10,
                       shared_name_pool: list[str] | None = None) -> BeliefGraph:
    """Zero-uncertainty graph: point masses, statuses explicit or denied."""
    pool = shared_name_pool or _WORDS
    entity_count = rng.randint(0, max_entities)
    entities = {}
    for i in range(entity_count):
        entity_id = f"t{i}"
        status = EntityStatus.EXPLICIT if rng.random() < 0.8 else EntityStatus.DENIED
        attrs = {name: point_mass(rng.choice(_VALUES))
                 for name in rng.sample(_ATTR_NAMES, rng.randint(0, 3))}
        entities[entity_id] = Entity(entity_id, rng.choice(pool), status,
                                     1.0 if status is EntityStatus.EXPLICIT else 0.0,
                                     attrs)
    relations = {}
    ids = sorted(entities)
    if len(ids) >= 2:
        for i in range(rng.randint(0, 3)):
            subject, obj = rng.sample(ids, 2)
            relations[f"r{i}"] = Relation(f"r{i}", subject, obj,
                                          f"the {subject} thing",
                                          point_mass(rng.choice(_PREDICATES)), False)
    return BeliefGraph(origin_prompt="goal", entities=entities, relations=relations)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)


@pytest.fixture
def cat_ball_graph() -> BeliefGraph:
    """The worked example: explicit cat, implicit ball with a type split."""
    cat = Entity("cat", "cat", EntityStatus.EXPLICIT, 1.0,
                 {"color": normalize([("black", 0.6), ("orange", 0.4)])})
    ball = Entity("ball", "ball", EntityStatus.IMPLICIT, 0.7,
                  {"type": Distribution((Option("a ball of wool", 0.55),
                                         Option("a tennis ball", 0.45)))})
    relation = Relation("r1", "cat", "ball", "the cat plays with the ball",
                        Distribution((Option("plays with", 0.9),
                                      Option("sits next to", 0.1))))
    return BeliefGraph(origin_prompt="A cat playing with a ball",
                       entities={"cat": cat, "ball": ball},
                       relations={"r1": relation})


@pytest.fixture
def mug_table_graph() -> BeliefGraph:
    mug = Entity("mug", "mug", EntityStatus.EXPLICIT, 1.0, {})
    table = Entity("table", "table", EntityStatus.EXPLICIT, 1.0, {})
    relation = Relation("r1", "mug", "table", "the mug is sitting on the table",
                        Distribution((Option("on", 0.6), Option("under", 0.4))),
                        containment=True)
    return BeliefGraph(origin_prompt="a mug on a table",
                       entities={"mug": mug, "table": table},
                       relations={"r1": relation})
