"""Batch episode runner.

Replays one agent-vs-simulated-user dialog over a ground-truth fixture,
recording a metrics row after extraction (turn 0) and after every
answered turn. Fully deterministic under a mock backend and a seeded
user, which is what makes report files byte-reproducible.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from scenebelief.agent import (
    AgentTurn,
    FinalResult,
    SessionState,
    Transcript,
    build_transcript,
    finalize,
    init_session,
    step,
)
from scenebelief.backends import BackendConfig, BackendError
from scenebelief.graph import BeliefGraph
from scenebelief.metrics import MetricsTriple, graph_metrics
from scenebelief.profiles import AgentProfile
from scenebelief.questions import LintIssue, lint_question
from scenebelief.simuser import UserModel, answer, seeded

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeReport:
    fixture: str
    profile: str
    seed: int
    transcript: Transcript | None
    metrics_per_turn: tuple[MetricsTriple, ...]
    turns_to_convergence: int | None
    lint_counts: dict[str, int]
    failed: bool = False
    failure: str = ""

    @property
    def final_metrics(self) -> MetricsTriple | None:
        return self.metrics_per_turn[-1] if self.metrics_per_turn else None

    @property
    def converged(self) -> bool:
        return self.turns_to_convergence is not None


@dataclass(frozen=True)
class Fixture:
    """One evaluation case: truth graph, goal caption, starting prompt."""

    name: str
    truth_path: Path
    caption_path: Path
    prompt_path: Path

    @property
    def starting_prompt(self) -> str:
        return self.prompt_path.read_text(encoding="utf-8").strip()


def discover_fixtures(directory: str | Path) -> list[Fixture]:
    """Find <name>.bgraph + <name>.caption.txt + <name>.prompt.txt triples."""
    directory = Path(directory)
    fixtures = []
    for truth_path in sorted(directory.glob("*.bgraph")):
        if truth_path.name.endswith(".start.bgraph"):
            continue
        name = truth_path.stem
        caption_path = directory / f"{name}.caption.txt"
        prompt_path = directory / f"{name}.prompt.txt"
        if caption_path.is_file() and prompt_path.is_file():
            fixtures.append(Fixture(name, truth_path, caption_path, prompt_path))
    return fixtures


def _count_lint(issues: list[LintIssue], counts: dict[str, int]) -> None:
    for issue in issues:
        counts[issue.code.value] = counts.get(issue.code.value, 0) + 1


def run_episode(profile: AgentProfile, truth_graph: BeliefGraph, user: UserModel,
                cfg: BackendConfig, seed: int, *, starting_prompt: str,
                fixture_name: str = "") -> EpisodeReport:
    """Run one full dialog episode against a simulated user."""
    user = seeded(user, seed)
    lint_counts: dict[str, int] = {}
    try:
        started = time.perf_counter()
        state = init_session(profile, starting_prompt, cfg,
                             session_id=f"ep-{fixture_name}-{profile.name}-{seed}")
        wall_clock = [time.perf_counter() - started]
    except (BackendError, ValueError) as exc:
        logger.warning("episode %s/%s failed at extraction: %s",
                       fixture_name, profile.name, exc)
        return EpisodeReport(fixture=fixture_name, profile=profile.name, seed=seed,
                             transcript=None, metrics_per_turn=(),
                             turns_to_convergence=None, lint_counts={},
                             failed=True, failure=str(exc))

    metrics = [graph_metrics(state.graph, truth_graph)]
    convergence_turn = 0 if metrics[0].perfect() else None
    asked_history: list = []
    for question in state.open_questions:
        _count_lint(lint_question(question, state.graph, asked_history), lint_counts)
        asked_history.append(question)

    result: FinalResult | None = None
    turns_taken = 0
    while state.phase.value == "awaiting_user":
        if not state.open_questions:
            state, result = finalize(state, force=True)
            break
        question = state.open_questions[0]
        reply = answer(user, question)
        turn_started = time.perf_counter()
        state, emitted = step(state, reply)
        wall_clock.append(time.perf_counter() - turn_started)
        turns_taken += 1
        metrics.append(graph_metrics(state.graph, truth_graph))
        if convergence_turn is None and metrics[-1].perfect():
            convergence_turn = turns_taken
        if isinstance(emitted, FinalResult):
            result = emitted
            break
        for fresh in emitted.questions:
            _count_lint(lint_question(fresh, state.graph, asked_history), lint_counts)
            asked_history.append(fresh)

    if result is None:
        state, result = finalize(state, force=True)

    transcript = build_transcript(state, result.prompt, tuple(wall_clock))
    return EpisodeReport(
        fixture=fixture_name,
        profile=profile.name,
        seed=seed,
        transcript=transcript,
        metrics_per_turn=tuple(metrics),
        turns_to_convergence=convergence_turn,
        lint_counts=lint_counts,
    )
