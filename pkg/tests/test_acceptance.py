"""Acceptance suite: one test per criterion, at the stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line
per criterion. Budgets are wall-clock upper bounds measured around the
operative section of each criterion.
"""

from __future__ import annotations

import json
import random
import time

import pytest

from scenebelief import dsl
from scenebelief.backends import BackendConfig, BackendMode
from scenebelief.cli import main as evalrun_main
from scenebelief.episodes import discover_fixtures, run_episode
from scenebelief.graph import graphs_equivalent, validate
from scenebelief.metrics import graph_metrics
from scenebelief.profiles import preset
from scenebelief.questions import rank_nodes
from scenebelief.simuser import UserMode, UserModel, load_ground_truth
from conftest import FIXTURES_DIR, random_graph, random_truth_graph
from test_graph import _random_operation
from test_metrics import brute_force_metrics
from test_questions import brute_force_rank

BACKEND_DIR = str(FIXTURES_DIR / "backend")


def _report(criterion: int, name: str, started: float, budget: float) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget, f"criterion {criterion} took {elapsed:.2f}s (budget {budget}s)"
    print(f"ACCEPTANCE {criterion} ({name}): PASS ({elapsed:.2f}s < {budget}s)")


@pytest.fixture(scope="module")
def corpus_cfg() -> BackendConfig:
    return BackendConfig(mode=BackendMode.MOCK_STRICT, fixture_dir=BACKEND_DIR)


@pytest.fixture(scope="module")
def corpus():
    fixtures = discover_fixtures(FIXTURES_DIR)
    assert len(fixtures) >= 10, "shipped corpus must hold at least 10 ground truths"
    return fixtures


@pytest.fixture(scope="module")
def ag1_reports(corpus, corpus_cfg):
    """Criterion-4 episodes, shared with criteria 5 and 9."""
    reports = {}
    started = time.perf_counter()
    for fixture in corpus:
        truth = load_ground_truth(fixture.truth_path, fixture.caption_path)
        user = UserModel(mode=UserMode.ORACLE, truth=truth, noise=0.0)
        reports[fixture.name] = run_episode(
            preset("ag1", 15), truth.graph, user, corpus_cfg, seed=0,
            starting_prompt=fixture.starting_prompt, fixture_name=fixture.name)
    elapsed = time.perf_counter() - started
    return reports, elapsed


def test_criterion_1_dsl_round_trip(rng: random.Random):
    started = time.perf_counter()
    for _ in range(200):
        graph = random_graph(rng, max_entities=10, max_attrs=4)
        reparsed = dsl.parse_graph(dsl.print_graph(graph))
        assert graphs_equivalent(reparsed, graph, prob_tol=1e-6)
    _report(1, "dsl-round-trip", started, budget=2.0)


def test_criterion_2_graph_invariants_under_fuzzing(rng: random.Random):
    started = time.perf_counter()
    sequences = 10_000
    for i in range(sequences):
        graph = random_graph(rng, max_entities=5, max_attrs=2, max_relations=2)
        for _ in range(3):
            graph = _random_operation(rng, graph)
        assert validate(graph) == [], f"sequence {i} broke the invariants"
        for entity in graph.entities.values():
            for dist in entity.attributes.values():
                probs = [o.prob for o in dist.options]
                assert probs == sorted(probs, reverse=True)
                assert abs(sum(probs) - 1.0) <= 1e-6
        for relation in graph.relations.values():
            probs = [o.prob for o in relation.predicate.options]
            assert probs == sorted(probs, reverse=True)
            assert abs(sum(probs) - 1.0) <= 1e-6
    _report(2, "graph-invariant-fuzzing", started, budget=30.0)


def test_criterion_3_ranking_oracle_equivalence(rng: random.Random):
    started = time.perf_counter()
    for _ in range(500):
        graph = random_graph(rng, max_entities=5, max_attrs=2, max_relations=3)
        node_count = (len(graph.entities) + len(graph.relations)
                      + sum(len(e.attributes) for e in graph.entities.values()))
        assert node_count <= 20
        assert rank_nodes(graph, 20) == brute_force_rank(graph, 20)
    _report(3, "ranking-oracle-equivalence", started, budget=5.0)


def test_criterion_4_oracle_convergence(ag1_reports, corpus):
    reports, elapsed = ag1_reports
    started = time.perf_counter() - elapsed  # charge the shared episode time
    assert len(reports) == len(corpus)
    for name, report in reports.items():
        assert not report.failed, f"{name}: {report.failure}"
        assert report.converged, f"{name} did not converge"
        assert report.turns_to_convergence <= 15, name
        final = report.final_metrics
        assert final.entities.f1 == 1.0, name
        assert final.attributes.f1 == 1.0, name
        assert final.relations.f1 == 1.0, name
        f1s = [m.attributes.f1 for m in report.metrics_per_turn]
        assert all(a <= b + 1e-12 for a, b in zip(f1s, f1s[1:])), \
            f"{name}: attribute F1 decreased: {f1s}"
    _report(4, "oracle-convergence", started, budget=10.0)


def test_criterion_5_baseline_dominance(ag1_reports, corpus, corpus_cfg):
    reports, _ = ag1_reports
    started = time.perf_counter()
    for fixture in corpus:
        truth = load_ground_truth(fixture.truth_path, fixture.caption_path)
        user = UserModel(mode=UserMode.ORACLE, truth=truth)
        single_shot = run_episode(preset("t2i"), truth.graph, user, corpus_cfg,
                                  seed=0, starting_prompt=fixture.starting_prompt,
                                  fixture_name=fixture.name)
        assert not single_shot.failed
        assert reports[fixture.name].final_metrics.attributes.f1 >= \
            single_shot.final_metrics.attributes.f1, fixture.name
    _report(5, "baseline-dominance", started, budget=10.0)


def test_criterion_6_report_determinism(tmp_path):
    started = time.perf_counter()
    outputs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        code = evalrun_main(["run", "--profile", "ag1",
                             "--fixtures", str(FIXTURES_DIR),
                             "--turns", "15", "--backend", "mock-strict",
                             "--seed", "7", "--out", str(out)])
        assert code == 0
        outputs.append(((out / "reports.jsonl").read_bytes(),
                        (out / "summary.csv").read_bytes()))
    assert outputs[0][0] == outputs[1][0], "JSONL reports differ between runs"
    assert outputs[0][1] == outputs[1][1], "CSV summaries differ between runs"
    _report(6, "report-determinism", started, budget=30.0)


def test_criterion_7_event_sourced_replay(tmp_path):
    from fastapi.testclient import TestClient

    from scenebelief.service.app import create_app
    from scenebelief.service.events import EventStore, replay

    started = time.perf_counter()
    cfg = BackendConfig(mode=BackendMode.MOCK_STRICT, fixture_dir=BACKEND_DIR)
    data_dir = str(tmp_path / "sessions")
    app = create_app(cfg, data_dir)
    client = TestClient(app)
    registry = app.state.registry

    prompts = [path.read_text().strip()
               for path in sorted(FIXTURES_DIR.glob("*.prompt.txt"))]
    rng = random.Random(20240812)
    checked = 0
    for i in range(50):
        prompt = prompts[i % len(prompts)]
        profile = rng.choice(["ag1", "ag2", "ag3"])
        created = client.post("/sessions",
                              json={"prompt": prompt, "profile": profile}).json()
        sid = created["session_id"]
        kill_after = rng.randint(0, 5)
        for _ in range(kill_after):
            state = client.get(f"/sessions/{sid}").json()["state"]
            if state["phase"] != "awaiting_user":
                break
            roll = rng.random()
            if roll < 0.55 and state["open_questions"]:
                question = rng.choice(state["open_questions"])
                if rng.random() < 0.25:
                    payload = {"question_id": question["id"], "kind": "decline",
                               "value": ""}
                elif rng.random() < 0.6:
                    payload = {"question_id": question["id"], "kind": "option",
                               "value": rng.choice(question["options"])}
                else:
                    payload = {"question_id": question["id"], "kind": "free_text",
                               "value": f"free-{rng.randint(0, 999)}"}
                client.post(f"/sessions/{sid}/answers", json=payload)
            elif roll < 0.75 and profile == "ag3":
                state_graph = state.get("graph")
                if state_graph and state_graph["entities"]:
                    target = rng.choice(state_graph["entities"])["id"]
                    client.post(f"/sessions/{sid}/edits",
                                json={"op": "set-attribute-value",
                                      "entity_id": target, "attribute": "note",
                                      "value": f"v{rng.randint(0, 9)}"})
            else:
                client.post(f"/sessions/{sid}/generate")

        # pre-kill live state, straight from the in-memory registry
        live = registry.get(sid)
        live_print = dsl.print_graph(live.graph)
        live_phase = live.phase
        live_open = [q.id for q in live.open_questions]

        # "restart": a brand-new store reading the same directory
        replayed = replay(EventStore(data_dir), sid)
        assert dsl.print_graph(replayed.graph) == live_print, sid
        assert replayed.phase is live_phase, sid
        assert [q.id for q in replayed.open_questions] == live_open, sid
        checked += 1
    assert checked == 50
    _report(7, "event-sourced-replay", started, budget=60.0)


def test_criterion_8_metrics_oracle(rng: random.Random):
    started = time.perf_counter()
    shared_names = ["cat", "ball", "table", "mug", "dog", "tree", "lamp"]
    for _ in range(200):
        predicted = random_graph(rng, max_entities=10)
        truth = random_truth_graph(rng, max_entities=10,
                                   shared_name_pool=shared_names)
        assert graph_metrics(predicted, truth) == brute_force_metrics(predicted, truth)
    _report(8, "metrics-oracle", started, budget=10.0)


def test_criterion_9_question_lint_self_cleanliness(ag1_reports):
    reports, _ = ag1_reports
    started = time.perf_counter()
    total_questions = 0
    for name, report in reports.items():
        assert report.lint_counts == {}, \
            f"{name}: engine questions drew lint issues {report.lint_counts}"
        total_questions += sum(len(turn.questions)
                               for turn in report.transcript.turns)
    assert total_questions > 0
    _report(9, "question-lint-self-cleanliness", started, budget=5.0)
