"""Agent capability profiles.

Four presets ship: the single-shot `t2i` baseline plus `ag1` (asks
questions), `ag2` (adds belief-graph exposure) and `ag3` (adds direct
graph editing). The capability matrix is config-overridable so the
presets can be remapped without code changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

DEFAULT_INTERACTIVE_TURNS = 5
DEFAULT_BATCH_TURNS = 15


@dataclass(frozen=True)
class AgentProfile:
    name: str
    asks_questions: bool
    exposes_graph: bool
    accepts_graph_edits: bool
    questions_per_turn: int = 1
    max_turns: int = DEFAULT_INTERACTIVE_TURNS

    def __post_init__(self) -> None:
        if self.max_turns < 0:
            raise ValueError("max_turns must be non-negative")
        if self.max_turns == 0 and self.asks_questions:
            raise ValueError("a zero-turn profile cannot ask questions")
        if self.asks_questions and self.questions_per_turn < 1:
            raise ValueError("questions_per_turn must be >= 1 when asking questions")


PRESETS: dict[str, AgentProfile] = {
    "t2i": AgentProfile("t2i", asks_questions=False, exposes_graph=False,
                        accepts_graph_edits=False, max_turns=0),
    "ag1": AgentProfile("ag1", asks_questions=True, exposes_graph=False,
                        accepts_graph_edits=False),
    "ag2": AgentProfile("ag2", asks_questions=True, exposes_graph=True,
                        accepts_graph_edits=False),
    "ag3": AgentProfile("ag3", asks_questions=True, exposes_graph=True,
                        accepts_graph_edits=True),
}


def preset(name: str, max_turns: int | None = None) -> AgentProfile:
    try:
        profile = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; known: {sorted(PRESETS)}") from None
    if max_turns is not None and profile.max_turns != 0:
        profile = replace(profile, max_turns=max_turns)
    return profile


def load_profile(spec: str, max_turns: int | None = None) -> AgentProfile:
    """Resolve a preset name or a JSON profile file."""
    if spec in PRESETS:
        return preset(spec, max_turns)
    path = Path(spec)
    if not path.is_file():
        raise KeyError(f"{spec!r} is neither a preset ({sorted(PRESETS)}) "
                       "nor a profile file")
    raw = json.loads(path.read_text(encoding="utf-8"))
    profile = AgentProfile(
        name=str(raw.get("name", path.stem)),
        asks_questions=bool(raw["asks_questions"]),
        exposes_graph=bool(raw["exposes_graph"]),
        accepts_graph_edits=bool(raw["accepts_graph_edits"]),
        questions_per_turn=int(raw.get("questions_per_turn", 1)),
        max_turns=int(raw.get("max_turns", DEFAULT_INTERACTIVE_TURNS)),
    )
    if max_turns is not None and profile.max_turns != 0:
        profile = replace(profile, max_turns=max_turns)
    return profile
