"""Dialog orchestrator tests: init, stepping, finalization, phase machine."""

from __future__ import annotations

import pytest

from scenebelief.agent import (
    FinalResult,
    Phase,
    PhaseError,
    PolicyError,
    StaleAnswerError,
    finalize,
    init_session,
    open_session,
    step,
)
from scenebelief.backends import (
    BackendConfig,
    BackendMode,
    extraction_request,
    write_fixture,
)
from scenebelief.graph import EditOp, GraphEdit, NodeRef
from scenebelief.profiles import AgentProfile, preset
from scenebelief.questions import Answer, AnswerKind

CAT_BALL_PROMPT = "A cat playing with a ball"

START_GRAPH = '''\
prompt "A cat playing with a ball"
entity cat {
  status explicit
  presence 1.000000
  attr color { "black": 0.600000, "orange": 0.400000 }
}
entity ball {
  status explicit
  presence 1.000000
  attr type { "a ball of wool": 0.550000, "a tennis ball": 0.450000 }
}
relation r1 (cat, ball) {
  description "the cat plays with the ball"
  containment false
  alt { "plays with": 0.900000, "sits next to": 0.100000 }
}
'''


@pytest.fixture
def cfg(tmp_path) -> BackendConfig:
    req = extraction_request(CAT_BALL_PROMPT)
    write_fixture(tmp_path, req.tag, req.system, req.user, START_GRAPH)
    return BackendConfig(mode=BackendMode.MOCK_STRICT, fixture_dir=str(tmp_path))


def _answer_first(state):
    question = state.open_questions[0]
    value = question.options[0]
    return step(state, Answer(question.id, AnswerKind.OPTION, value))


class TestInitSession:
    def test_scripted_extraction_determines_graph(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        assert state.phase is Phase.AWAITING_USER
        assert set(state.graph.entities) == {"cat", "ball"}
        # ball.type is the most uncertain node (0.9928 vs color 0.971)
        first = state.open_questions[0]
        assert first.node == NodeRef.attr("ball", "type")

    def test_t2i_profile_finalizes_immediately(self, cfg):
        state = init_session(preset("t2i"), CAT_BALL_PROMPT, cfg)
        assert state.phase is Phase.FINALIZED
        assert state.turns == ()
        assert state.final_prompt is not None
        assert CAT_BALL_PROMPT in state.final_prompt

    def test_empty_prompt_rejected(self, cfg):
        with pytest.raises(ValueError):
            init_session(preset("ag1"), "", cfg)

    def test_first_turn_has_prompt_preview(self, cfg):
        state = init_session(preset("ag2", 5), CAT_BALL_PROMPT, cfg)
        from scenebelief.graph import to_prompt

        assert state.turns[0].prompt_preview == to_prompt(state.graph)
        assert state.turns[0].graph_snapshot is not None  # ag2 exposes


class TestStep:
    def test_answer_advances_turn_and_resolves_node(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        question = state.open_questions[0]
        state2, turn = step(state, Answer(question.id, AnswerKind.OPTION,
                                          "a ball of wool"))
        assert isinstance(turn, type(state2.turns[-1]))
        assert turn.index == 1
        asked_nodes = [q.node for q in turn.questions]
        assert question.node not in asked_nodes

    def test_edit_rejected_by_policy(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        edit = GraphEdit(EditOp.SET_RELATION_PREDICATE, relation_id="r1",
                         value="sits next to")
        with pytest.raises(PolicyError):
            step(state, edit)

    def test_edit_accepted_by_ag3(self, cfg):
        state = init_session(preset("ag3", 5), CAT_BALL_PROMPT, cfg)
        edit = GraphEdit(EditOp.SET_RELATION_PREDICATE, relation_id="r1",
                         value="sits next to")
        state2, _ = step(state, edit)
        assert state2.graph.relations["r1"].predicate.argmax == "sits next to"

    def test_stale_question_id_rejected(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        with pytest.raises(StaleAnswerError):
            step(state, Answer("q99:nowhere", AnswerKind.OPTION, "x"))

    def test_second_answer_to_same_question_rejected(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        question = state.open_questions[0]
        answer = Answer(question.id, AnswerKind.OPTION, "a ball of wool")
        state2, _ = step(state, answer)
        with pytest.raises(StaleAnswerError):
            step(state2, answer)

    def test_resolving_everything_finalizes_early(self, cfg):
        state = init_session(preset("ag1", 15), CAT_BALL_PROMPT, cfg)
        emitted = None
        for _ in range(10):
            if state.phase is not Phase.AWAITING_USER:
                break
            state, emitted = _answer_first(state)
        assert isinstance(emitted, FinalResult)
        assert state.phase is Phase.FINALIZED
        # 3 uncertain nodes in the start graph, well under the budget
        assert len(state.events) == 3

    def test_turn_budget_never_exceeded(self, cfg):
        state = init_session(preset("ag1", 2), CAT_BALL_PROMPT, cfg)
        while state.phase is Phase.AWAITING_USER and state.open_questions:
            state, _ = _answer_first(state)
        question_turns = [t for t in state.turns if t.questions]
        assert len(question_turns) <= 2

    def test_decline_suppresses_node(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        question = state.open_questions[0]
        state2, turn = step(state, Answer(question.id, AnswerKind.DECLINE))
        assert question.node in state2.suppressed
        assert all(q.node != question.node for q in turn.questions)
        # graph untouched by the decline
        assert state2.graph.version == state.graph.version

    def test_step_after_finalized_rejected(self, cfg):
        state = init_session(preset("t2i"), CAT_BALL_PROMPT, cfg)
        with pytest.raises(PhaseError):
            step(state, Answer("q", AnswerKind.OPTION, "x"))


class TestFinalize:
    def test_forced_finalize_at_turn_zero(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        state2, result = finalize(state, force=True)
        assert state2.phase is Phase.FINALIZED
        from scenebelief.graph import to_prompt

        assert result.prompt == to_prompt(state.graph)

    def test_premature_finalize_without_force_rejected(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        with pytest.raises(PhaseError):
            finalize(state)

    def test_no_t2i_configured_no_image_no_error(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        _, result = finalize(state, force=True)
        assert result.image is None and result.image_error is None

    def test_image_attached_with_backend(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        _, result = finalize(state, cfg, force=True)
        assert result.image is not None
        assert result.image.uri.startswith("mock://image/")

    def test_image_failure_keeps_prompt(self, cfg, monkeypatch):
        import scenebelief.agent as agent_module

        def _boom(inner_cfg, prompt):
            raise RuntimeError("t2i down")

        monkeypatch.setattr(agent_module, "generate_image", _boom)
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        _, result = finalize(state, cfg, force=True)
        assert result.prompt
        assert result.image is None
        assert "t2i down" in (result.image_error or "")

    def test_finalize_idempotent(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        state2, first = finalize(state, force=True)
        state3, second = finalize(state2)
        assert first.prompt == second.prompt
        assert state3.phase is Phase.FINALIZED

    def test_transcript_complete_and_ordered(self, cfg):
        state = init_session(preset("ag1", 15), CAT_BALL_PROMPT, cfg)
        while state.phase is Phase.AWAITING_USER and state.open_questions:
            state, emitted = _answer_first(state)
        _, result = finalize(state)
        transcript = result.transcript
        assert [t.index for t in transcript.turns] == list(range(len(transcript.turns)))
        assert transcript.final_prompt == result.prompt
        assert len(transcript.graph_digests) == len(transcript.turns)


class TestDeterminism:
    def test_identical_runs_identical_transcripts(self, cfg):
        from scenebelief.reports import transcript_to_wire
        import json

        def run():
            state = init_session(preset("ag2", 15), CAT_BALL_PROMPT, cfg)
            while state.phase is Phase.AWAITING_USER and state.open_questions:
                state, _ = _answer_first(state)
            _, result = finalize(state)
            return json.dumps(transcript_to_wire(result.transcript), sort_keys=True)

        assert run() == run()


class TestProfileSoundness:
    def test_no_questions_profile_never_asks(self, cfg):
        quiet = AgentProfile("quiet", asks_questions=False, exposes_graph=False,
                             accepts_graph_edits=True, max_turns=3)
        state = init_session(quiet, CAT_BALL_PROMPT, cfg)
        assert state.open_questions == ()
        assert all(not t.questions for t in state.turns)

    def test_no_exposure_profile_never_snapshots(self, cfg):
        state = init_session(preset("ag1", 5), CAT_BALL_PROMPT, cfg)
        state, _ = _answer_first(state)
        assert all(t.graph_snapshot is None for t in state.turns)

    def test_open_session_rebuild_matches_init(self, cfg):
        from scenebelief import dsl
        import dataclasses

        state = init_session(preset("ag2", 5), CAT_BALL_PROMPT, cfg,
                             session_id="fixed")
        graph = dsl.parse_graph(dsl.print_graph(state.graph))
        graph = dataclasses.replace(graph, version=state.graph.version)
        rebuilt = open_session(preset("ag2", 5), CAT_BALL_PROMPT, graph,
                               session_id="fixed")
        assert [q.id for q in rebuilt.open_questions] == \
            [q.id for q in state.open_questions]
        assert dsl.print_graph(rebuilt.graph) == dsl.print_graph(state.graph)