"""Simulated user tests: oracle fidelity, noise determinism, llm mapping."""

from __future__ import annotations

import pytest

from scenebelief.backends import BackendConfig, BackendMode, write_fixture
from scenebelief.graph import (
    BeliefGraph,
    Entity,
    EntityStatus,
    NodeRef,
    Relation,
    point_mass,
)
from scenebelief.questions import AnswerKind, make_question
from scenebelief.simuser import (
    GroundTruth,
    GroundTruthError,
    UserMode,
    UserModel,
    answer,
    load_ground_truth,
    seeded,
)
from conftest import FIXTURES_DIR


@pytest.fixture
def truth() -> GroundTruth:
    cat = Entity("cat", "cat", EntityStatus.EXPLICIT, 1.0,
                 {"color": point_mass("black")})
    ball = Entity("ball", "ball", EntityStatus.EXPLICIT, 1.0,
                  {"type": point_mass("a ball of wool")})
    ghost = Entity("ghost", "ghost", EntityStatus.DENIED, 0.0, {})
    graph = BeliefGraph(
        origin_prompt="A cat playing with a ball",
        entities={"cat": cat, "ball": ball, "ghost": ghost},
        relations={"r1": Relation("r1", "cat", "ball", "the cat plays with the ball",
                                  point_mass("plays with"))})
    return GroundTruth(graph=graph, caption="A black cat with a ball of wool")


def _oracle(truth: GroundTruth, noise: float = 0.0) -> UserModel:
    return UserModel(mode=UserMode.ORACLE, truth=truth, noise=noise)


class TestGroundTruth:
    def test_rejects_uncertain_graphs(self, cat_ball_graph):
        with pytest.raises(GroundTruthError):
            GroundTruth(graph=cat_ball_graph, caption="x")

    def test_loads_shipped_fixture_with_sidecar_caption(self):
        truth = load_ground_truth(FIXTURES_DIR / "cat_ball.bgraph")
        assert truth.caption
        assert "cat" in truth.graph.entities


class TestOracleAnswers:
    def test_truth_value_listed_becomes_option(self, truth, cat_ball_graph):
        question = make_question(cat_ball_graph, NodeRef.attr("ball", "type"))
        reply = answer(_oracle(truth), question)
        assert reply.kind is AnswerKind.OPTION
        assert reply.value == "a ball of wool"

    def test_truth_value_unlisted_becomes_free_text(self, truth, cat_ball_graph):
        from scenebelief.graph import apply_edit, GraphEdit, EditOp, normalize

        twisted = apply_edit(cat_ball_graph, GraphEdit(
            EditOp.SET_ATTRIBUTE_DISTRIBUTION, entity_id="ball", attribute="type",
            distribution=normalize([("beach ball", 0.5), ("marble", 0.5)])))
        question = make_question(twisted, NodeRef.attr("ball", "type"))
        reply = answer(_oracle(truth), question)
        assert reply.kind is AnswerKind.FREE_TEXT
        assert reply.value == "a ball of wool"

    def test_denied_entity_presence_answered_absent(self, truth):
        graph = BeliefGraph(
            origin_prompt="p",
            entities={"ghost": Entity("ghost", "ghost", EntityStatus.IMPLICIT, 0.6, {})})
        question = make_question(graph, NodeRef.presence("ghost"))
        reply = answer(_oracle(truth), question)
        assert (reply.kind, reply.value) == (AnswerKind.OPTION, "absent")

    def test_unknown_entity_attribute_declined(self, truth):
        from scenebelief.graph import normalize

        graph = BeliefGraph(
            origin_prompt="p",
            entities={"alien": Entity("alien", "alien", EntityStatus.EXPLICIT, 1.0,
                                      {"mood": normalize([("angry", 1), ("calm", 1)])})})
        question = make_question(graph, NodeRef.attr("alien", "mood"))
        assert answer(_oracle(truth), question).kind is AnswerKind.DECLINE

    def test_truth_entity_presence_answered_present(self, truth, cat_ball_graph):
        import dataclasses

        implicit_ball = dataclasses.replace(
            cat_ball_graph.entities["ball"], status=EntityStatus.IMPLICIT, presence=0.7)
        graph = cat_ball_graph.with_entity(implicit_ball)
        question = make_question(graph, NodeRef.presence("ball"))
        reply = answer(_oracle(truth), question)
        assert (reply.kind, reply.value) == (AnswerKind.OPTION, "present")

    def test_relation_answer_from_truth(self, truth, cat_ball_graph):
        question = make_question(cat_ball_graph, NodeRef.rel("r1"))
        reply = answer(_oracle(truth), question)
        assert reply.value == "plays with"


class TestNoise:
    def test_zero_noise_ignores_seed(self, truth, cat_ball_graph):
        question = make_question(cat_ball_graph, NodeRef.attr("ball", "type"))
        replies = {answer(seeded(_oracle(truth), s), question).value for s in range(5)}
        assert replies == {"a ball of wool"}

    def test_same_seed_same_sequence(self, truth, cat_ball_graph):
        user = seeded(_oracle(truth, noise=0.5), 42)
        questions = [make_question(cat_ball_graph, node)
                     for node in (NodeRef.attr("ball", "type"),
                                  NodeRef.attr("cat", "color"),
                                  NodeRef.presence("ball"))]
        first = [answer(user, q) for q in questions]
        second = [answer(user, q) for q in questions]
        assert first == second

    def test_noise_draw_keyed_by_question_id(self, truth, cat_ball_graph):
        # answering the same question twice gives the same answer even
        # under heavy noise: draws depend on the id, not the call count
        user = seeded(_oracle(truth, noise=0.9), 7)
        question = make_question(cat_ball_graph, NodeRef.attr("ball", "type"))
        assert answer(user, question) == answer(user, question)

    def test_noise_range_validated(self, truth):
        with pytest.raises(ValueError):
            UserModel(mode=UserMode.ORACLE, truth=truth, noise=1.0)


class TestLlmMode:
    def test_requires_backend(self, truth):
        with pytest.raises(ValueError):
            UserModel(mode=UserMode.LLM, truth=truth)

    def test_response_mapped_to_option_case_insensitively(self, truth, cat_ball_graph,
                                                          tmp_path):
        cfg = BackendConfig(mode=BackendMode.MOCK_STRICT, fixture_dir=str(tmp_path))
        user = UserModel(mode=UserMode.LLM, truth=truth, backend=cfg)
        question = make_question(cat_ball_graph, NodeRef.attr("ball", "type"))
        options = "\n".join(f"- {label}" for label in question.options)
        request_user = (f"Goal image: {truth.caption}\n\n"
                        f"Question: {question.text}\nOptions:\n{options}\nAnswer:")
        system = ("You are a user describing the image you want. Answer the "
                  "agent's question with a short phrase. If one of the listed "
                  "options matches your goal, repeat it verbatim.")
        write_fixture(tmp_path, "sim-user", system, request_user, "A Ball Of Wool\n")
        reply = answer(user, question)
        assert reply.kind is AnswerKind.OPTION
        assert reply.value == "a ball of wool"

    def test_unmatched_response_is_free_text(self, truth, cat_ball_graph, tmp_path):
        cfg = BackendConfig(mode=BackendMode.MOCK_LENIENT, fixture_dir=str(tmp_path))
        user = UserModel(mode=UserMode.LLM, truth=truth, backend=cfg)
        question = make_question(cat_ball_graph, NodeRef.attr("ball", "type"))
        reply = answer(user, question)  # lenient echo will not match an option
        assert reply.kind is AnswerKind.FREE_TEXT
