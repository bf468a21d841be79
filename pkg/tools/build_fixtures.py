#!/usr/bin/env python3
"""Regenerate the shipped evaluation fixture corpus.

For each case this writes:
    fixtures/<name>.bgraph          ground-truth graph (zero uncertainty)
    fixtures/<name>.caption.txt     goal-image caption for the simulated user
    fixtures/<name>.prompt.txt      starting prompt given to the agent
    fixtures/<name>.start.bgraph    the uncertain initial belief
    fixtures/backend/<digest>.txt   canned extraction response (= start graph)

The start graph is the truth with deterministic uncertainty injected:
some non-prompt-mentioned entities are demoted to implicit (presence
kept >= 0.5 so the included-entity set only ever shrinks during a
dialog, which keeps attribute F1 monotone), attribute and predicate
point masses widen into 2-option distributions, and entities denied in
the truth appear as implicit candidates. Every injected uncertainty is
resolvable by one oracle answer, and each case keeps its askable-node
count well under the 15-turn batch budget.

Run: python3 tools/build_fixtures.py [--out fixtures]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from scenebelief import dsl
from scenebelief.backends import (
    BackendConfig,
    BackendMode,
    extraction_request,
    normalize_name,
    write_fixture,
)
from scenebelief.episodes import run_episode
from scenebelief.graph import (
    BeliefGraph,
    Distribution,
    Entity,
    EntityStatus,
    Option,
    Relation,
    point_mass,
    validate,
)
from scenebelief.profiles import preset
from scenebelief.questions import rank_nodes
from scenebelief.simuser import GroundTruth, UserMode, UserModel

MAX_ASKABLE = 12

# Attribute perturbation patterns:
#   ("lead", d)        -> {truth: 0.55, d: 0.45}          truth already argmax
#   ("trail", d)       -> {d: 0.6, truth: 0.4}            distractor leads
#   ("absent", d1, d2) -> {d1: 0.6, d2: 0.4}              truth needs free text
#   None               -> point mass, never asked

FIXTURES: list[dict] = [
    {
        "name": "cat_ball",
        "prompt": "A cat playing with a ball",
        "caption": "A black cat playing with a ball of wool",
        "entities": {
            "cat": {"attrs": {"color": "black"}},
            "ball": {"attrs": {"type": "a ball of wool"}},
        },
        "relations": {
            "r1": ("cat", "ball", "plays with", "the cat plays with the ball", False),
        },
        "perturb": {
            "attrs": {("cat", "color"): ("lead", "white"),
                      ("ball", "type"): ("trail", "a tennis ball")},
            "relations": {"r1": ("lead", "sits next to")},
        },
    },
    {
        "name": "mug_table",
        "prompt": "a mug on a wooden table",
        "caption": "A white mug sitting on a wooden table, no coaster",
        "entities": {
            "mug": {"attrs": {"color": "white"}},
            "table": {"attrs": {"material": "wood"}},
            "coaster": {"status": "denied"},
        },
        "relations": {
            "r1": ("mug", "table", "on", "the mug is sitting on the table", True),
        },
        "perturb": {
            "attrs": {("mug", "color"): ("trail", "blue")},
            "relations": {"r1": ("lead", "under")},
            "denied_presence": {"coaster": 0.6},
        },
    },
    {
        "name": "dog_park",
        "prompt": "a dog catching a frisbee in a park",
        "caption": "A golden dog leaping to catch a red frisbee on a sunny lawn",
        "entities": {
            "dog": {"attrs": {"color": "golden", "pose": "leaping"}},
            "frisbee": {"attrs": {"color": "red"}},
            "lawn": {"mentioned": False},
            "leash": {"status": "denied"},
        },
        "relations": {
            "r1": ("dog", "frisbee", "catches", "the dog catches the frisbee", False),
        },
        "perturb": {
            "demote": {"lawn": 0.7},
            "attrs": {("dog", "color"): ("lead", "black"),
                      ("dog", "pose"): ("absent", "sitting", "running"),
                      ("frisbee", "color"): ("trail", "blue")},
            "denied_presence": {"leash": 0.6},
        },
    },
    {
        "name": "beach_sunset",
        "prompt": "a sailboat near the beach at sunset",
        "caption": "A white sailboat on calm water at sunset with an orange sky",
        "entities": {
            "sailboat": {"attrs": {"color": "white"}},
            "beach": {},
            "sky": {"mentioned": False, "attrs": {"color": "orange"}},
        },
        "relations": {
            "r1": ("sailboat", "beach", "near", "the sailboat floats near the beach", False),
        },
        "perturb": {
            "demote": {"sky": 0.8},
            "attrs": {("sailboat", "color"): ("trail", "red"),
                      ("sky", "color"): ("lead", "pink")},
            "relations": {"r1": ("lead", "far from")},
        },
    },
    {
        "name": "kitchen_breakfast",
        "prompt": "breakfast with toast and coffee on a table",
        "caption": "Buttered toast on a plate and a steaming cup of coffee on a kitchen table",
        "entities": {
            "toast": {"attrs": {"topping": "butter"}},
            "coffee": {"attrs": {"cup": "steaming"}},
            "table": {},
            "plate": {"mentioned": False},
        },
        "relations": {
            "r1": ("toast", "plate", "on", "the toast sits on the plate", True),
            "r2": ("coffee", "table", "on", "the coffee stands on the table", True),
        },
        "perturb": {
            "demote": {"plate": 0.7},
            "attrs": {("toast", "topping"): ("lead", "jam")},
            "relations": {"r1": ("trail", "next to")},
        },
    },
    {
        "name": "snow_cabin",
        "prompt": "a log cabin in the snow",
        "caption": "A log cabin buried in snow with smoke rising from the chimney",
        "entities": {
            "cabin": {"attrs": {"material": "logs"}},
            "snow": {},
            "smoke": {"mentioned": False},
        },
        "relations": {
            "r1": ("cabin", "snow", "in", "the cabin stands in the snow", True),
        },
        "perturb": {
            "demote": {"smoke": 0.6},
            "attrs": {("cabin", "material"): ("trail", "bricks")},
            "relations": {"r1": ("lead", "next to")},
        },
    },
    {
        "name": "robot_lab",
        "prompt": "a robot working at a workbench in a lab",
        "caption": "A silver robot assembling parts at a workbench under a desk lamp, nobody else around",
        "entities": {
            "robot": {"attrs": {"color": "silver"}},
            "workbench": {},
            "lamp": {"mentioned": False},
            "person": {"status": "denied"},
        },
        "relations": {
            "r1": ("robot", "workbench", "at", "the robot works at the workbench", False),
        },
        "perturb": {
            "demote": {"lamp": 0.8},
            "attrs": {("robot", "color"): ("absent", "orange", "blue")},
            "denied_presence": {"person": 0.7},
        },
    },
    {
        "name": "garden_bench",
        "prompt": "an old bench among flowers in a garden",
        "caption": "A weathered wooden bench surrounded by red flowers, with a small fountain behind",
        "entities": {
            "bench": {"attrs": {"material": "wood"}},
            "flowers": {"attrs": {"color": "red"}},
            "fountain": {"mentioned": False},
        },
        "relations": {
            "r1": ("flowers", "bench", "around", "the flowers grow around the bench", False),
        },
        "perturb": {
            "demote": {"fountain": 0.6},
            "attrs": {("bench", "material"): ("lead", "metal"),
                      ("flowers", "color"): ("trail", "yellow")},
            "relations": {"r1": ("lead", "behind")},
        },
    },
    {
        "name": "city_rain",
        "prompt": "a person with an umbrella on a rainy street",
        "caption": "Someone holding a yellow umbrella crossing a wet street past a taxi",
        "entities": {
            "person": {},
            "umbrella": {"attrs": {"color": "yellow"}},
            "street": {"attrs": {"surface": "wet"}},
            "taxi": {"mentioned": False},
        },
        "relations": {
            "r1": ("person", "umbrella", "holds", "the person holds the umbrella", False),
        },
        "perturb": {
            "demote": {"taxi": 0.7},
            "attrs": {("umbrella", "color"): ("trail", "black"),
                      ("street", "surface"): ("lead", "dry")},
        },
    },
    {
        "name": "library_cat",
        "prompt": "a cat sleeping in a library",
        "caption": "A tabby cat curled up asleep on a library windowsill beside tall bookshelves",
        "entities": {
            "cat": {"attrs": {"coat": "tabby"}},
            "bookshelf": {"mentioned": False},
            "windowsill": {"mentioned": False},
        },
        "relations": {
            "r1": ("cat", "windowsill", "on", "the cat sleeps on the windowsill", True),
        },
        "perturb": {
            "demote": {"bookshelf": 0.8, "windowsill": 0.6},
            "attrs": {("cat", "coat"): ("lead", "black")},
            "relations": {"r1": ("trail", "under")},
        },
    },
    {
        "name": "market_fruit",
        "prompt": "apples at a market stall",
        "caption": "Green apples piled in a wicker basket on a market stall",
        "entities": {
            "apples": {"attrs": {"color": "green"}},
            "stall": {},
            "basket": {"mentioned": False, "attrs": {"material": "wicker"}},
        },
        "relations": {
            "r1": ("apples", "basket", "in", "the apples are piled in the basket", True),
        },
        "perturb": {
            "demote": {"basket": 0.7},
            "attrs": {("apples", "color"): ("trail", "red"),
                      ("basket", "material"): ("lead", "plastic")},
            "relations": {"r1": ("lead", "beside")},
        },
    },
    {
        "name": "space_station",
        "prompt": "an astronaut outside a space station",
        "caption": "An astronaut in a white suit floating outside a space station above the earth, no aliens",
        "entities": {
            "astronaut": {"attrs": {"suit": "white"}},
            "station": {},
            "earth": {"mentioned": False},
            "alien": {"status": "denied"},
        },
        "relations": {
            "r1": ("astronaut", "station", "outside", "the astronaut floats outside the station", False),
        },
        "perturb": {
            "demote": {"earth": 0.8},
            "attrs": {("astronaut", "suit"): ("absent", "orange", "blue")},
            "denied_presence": {"alien": 0.6},
        },
    },
    {
        "name": "forest_deer",
        "prompt": "a deer by a stream in the forest",
        "caption": "A spotted deer drinking from a clear stream among ferns",
        "entities": {
            "deer": {"attrs": {"coat": "spotted"}},
            "stream": {"attrs": {"water": "clear"}},
            "ferns": {"mentioned": False},
        },
        "relations": {
            "r1": ("deer", "stream", "drinks from", "the deer drinks from the stream", False),
        },
        "perturb": {
            "demote": {"ferns": 0.7},
            "attrs": {("deer", "coat"): ("trail", "plain brown"),
                      ("stream", "water"): ("lead", "muddy")},
            "relations": {"r1": ("lead", "leaps over")},
        },
    },
    {
        "name": "concert_stage",
        "prompt": "a guitarist on a stage",
        "caption": "A guitarist in a leather jacket under a single spotlight on an empty stage, no crowd",
        "entities": {
            "guitarist": {"attrs": {"outfit": "leather jacket"}},
            "stage": {},
            "spotlight": {"mentioned": False},
            "crowd": {"status": "denied"},
        },
        "relations": {
            "r1": ("guitarist", "stage", "on", "the guitarist stands on the stage", True),
        },
        "perturb": {
            "demote": {"spotlight": 0.6},
            "attrs": {("guitarist", "outfit"): ("absent", "tuxedo", "hoodie")},
            "denied_presence": {"crowd": 0.7},
        },
    },
    {
        "name": "harbor_lighthouse",
        "prompt": "a lighthouse at the harbor entrance",
        "caption": "A red-and-white striped lighthouse guiding a fishing boat through fog",
        "entities": {
            "lighthouse": {"attrs": {"stripes": "red and white"}},
            "harbor": {},
            "boat": {"mentioned": False},
            "fog": {"mentioned": False},
        },
        "relations": {
            "r1": ("lighthouse", "harbor", "at", "the lighthouse stands at the harbor", False),
        },
        "perturb": {
            "demote": {"boat": 0.7, "fog": 0.6},
            "attrs": {("lighthouse", "stripes"): ("trail", "plain white")},
        },
    },
]


def _truth_entity(entity_id: str, spec: dict) -> Entity:
    status = EntityStatus(spec.get("status", "explicit"))
    presence = {EntityStatus.EXPLICIT: 1.0, EntityStatus.DENIED: 0.0}[status]
    attrs = {name: point_mass(value) for name, value in spec.get("attrs", {}).items()}
    return Entity(entity_id, spec.get("name", entity_id), status, presence, attrs)


def build_truth(case: dict) -> BeliefGraph:
    entities = {eid: _truth_entity(eid, spec) for eid, spec in case["entities"].items()}
    relations = {}
    for rid, (subject, obj, predicate, description, containment) in case["relations"].items():
        relations[rid] = Relation(rid, subject, obj, description,
                                  point_mass(predicate), containment)
    return BeliefGraph(origin_prompt=case["prompt"], entities=entities,
                       relations=relations)


def _perturbed(truth_value: str, pattern: tuple) -> Distribution:
    kind = pattern[0]
    if kind == "lead":
        return Distribution((Option(truth_value, 0.55), Option(pattern[1], 0.45)))
    if kind == "trail":
        return Distribution((Option(pattern[1], 0.6), Option(truth_value, 0.4)))
    if kind == "absent":
        return Distribution((Option(pattern[1], 0.6), Option(pattern[2], 0.4)))
    raise ValueError(f"unknown perturbation {kind!r}")


def build_start(case: dict, truth: BeliefGraph) -> BeliefGraph:
    perturb = case.get("perturb", {})
    demote = perturb.get("demote", {})
    denied_presence = perturb.get("denied_presence", {})
    attr_patterns = perturb.get("attrs", {})
    rel_patterns = perturb.get("relations", {})

    entities = {}
    for entity_id, entity in truth.entities.items():
        attrs = {}
        for attr_name, dist in entity.attributes.items():
            pattern = attr_patterns.get((entity_id, attr_name))
            attrs[attr_name] = _perturbed(dist.argmax, pattern) if pattern else dist
        if entity.status is EntityStatus.DENIED:
            presence = denied_presence.get(entity_id, 0.6)
            entities[entity_id] = Entity(entity_id, entity.name, EntityStatus.IMPLICIT,
                                         presence, attrs)
        elif entity_id in demote:
            entities[entity_id] = Entity(entity_id, entity.name, EntityStatus.IMPLICIT,
                                         demote[entity_id], attrs)
        else:
            entities[entity_id] = Entity(entity_id, entity.name, entity.status,
                                         entity.presence, attrs)

    relations = {}
    for relation_id, relation in truth.relations.items():
        pattern = rel_patterns.get(relation_id)
        predicate = _perturbed(relation.predicate.argmax, pattern) if pattern \
            else relation.predicate
        relations[relation_id] = Relation(relation_id, relation.subject, relation.object,
                                          relation.description, predicate,
                                          relation.containment)
    return BeliefGraph(origin_prompt=case["prompt"], entities=entities,
                       relations=relations)


def check_case(case: dict, truth: BeliefGraph, start: BeliefGraph) -> None:
    name = case["name"]
    assert not validate(truth), f"{name}: truth graph invalid"
    assert not validate(start), f"{name}: start graph invalid"
    GroundTruth(graph=truth, caption=case["caption"])  # raises if uncertain

    prompt_norm = normalize_name(case["prompt"])
    for entity in start.entities.values():
        if entity.status is EntityStatus.IMPLICIT:
            assert normalize_name(entity.name) not in prompt_norm, \
                f"{name}: implicit entity {entity.id!r} is prompt-mentioned"
            assert entity.presence >= 0.5, \
                f"{name}: demoted entity {entity.id!r} below the inclusion floor"
    for relation in truth.relations.values():
        for endpoint in (relation.subject, relation.object):
            assert truth.entities[endpoint].status is EntityStatus.EXPLICIT, \
                f"{name}: truth relation {relation.id!r} touches a denied entity"

    askable = rank_nodes(start, 100)
    assert len(askable) <= MAX_ASKABLE, \
        f"{name}: {len(askable)} askable nodes exceeds budget {MAX_ASKABLE}"
    assert askable, f"{name}: nothing to ask"


def write_case(case: dict, out_dir: Path) -> None:
    truth = build_truth(case)
    start = build_start(case, truth)
    check_case(case, truth, start)

    name = case["name"]
    (out_dir / f"{name}.bgraph").write_text(dsl.print_graph(truth), encoding="utf-8")
    (out_dir / f"{name}.caption.txt").write_text(case["caption"] + "\n", encoding="utf-8")
    (out_dir / f"{name}.prompt.txt").write_text(case["prompt"] + "\n", encoding="utf-8")
    start_text = dsl.print_graph(start)
    (out_dir / f"{name}.start.bgraph").write_text(start_text, encoding="utf-8")

    request = extraction_request(case["prompt"])
    write_fixture(out_dir / "backend", request.tag, request.system, request.user,
                  start_text)


def verify_convergence(out_dir: Path) -> None:
    """Dry-run every fixture with the oracle user; fail loudly if any stalls."""
    from scenebelief.episodes import discover_fixtures
    from scenebelief.simuser import load_ground_truth

    cfg = BackendConfig(mode=BackendMode.MOCK_STRICT,
                        fixture_dir=str(out_dir / "backend"))
    profile = preset("ag1", 15)
    for fixture in discover_fixtures(out_dir):
        truth = load_ground_truth(fixture.truth_path, fixture.caption_path)
        user = UserModel(mode=UserMode.ORACLE, truth=truth)
        report = run_episode(profile, truth.graph, user, cfg, seed=0,
                             starting_prompt=fixture.starting_prompt,
                             fixture_name=fixture.name)
        assert not report.failed, f"{fixture.name}: episode failed: {report.failure}"
        assert report.converged, f"{fixture.name}: did not converge within 15 turns"
        f1s = [m.attributes.f1 for m in report.metrics_per_turn]
        assert all(a <= b + 1e-12 for a, b in zip(f1s, f1s[1:])), \
            f"{fixture.name}: attribute F1 not monotone: {f1s}"
        print(f"  {fixture.name}: converged in {report.turns_to_convergence} turn(s)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent
                                             / "fixtures"))
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "backend").mkdir(exist_ok=True)

    for case in FIXTURES:
        write_case(case, out_dir)
        print(f"wrote {case['name']}")
    print("verifying oracle convergence:")
    verify_convergence(out_dir)
    print(f"{len(FIXTURES)} fixtures under {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
