"""Machine-readable episode reports.

Writes one JSON-lines file with the full reports and one CSV summary.
Both are byte-deterministic for identical inputs: keys are sorted,
floats are fixed to six decimals in the CSV, and wall-clock timings are
deliberately left out of the files (they are the one nondeterministic
field on a transcript).

CSV columns, in order:
    fixture, profile, seed, turns, entity_f1, attribute_f1, relation_f1,
    converged, lint_references_missing_entity, lint_already_resolved,
    lint_duplicate_of_previous, lint_compound_question,
    lint_empty_or_malformed
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from scenebelief import wire
from scenebelief.agent import Transcript
from scenebelief.episodes import EpisodeReport
from scenebelief.graph import GraphEdit
from scenebelief.metrics import CategoryScore, MetricsTriple
from scenebelief.questions import Answer

JSONL_NAME = "reports.jsonl"
CSV_NAME = "summary.csv"

LINT_COLUMNS = (
    "references-missing-entity",
    "already-resolved",
    "duplicate-of-previous",
    "compound-question",
    "empty-or-malformed",
)

CSV_HEADER = (
    "fixture", "profile", "seed", "turns",
    "entity_f1", "attribute_f1", "relation_f1", "converged",
    "lint_references_missing_entity", "lint_already_resolved",
    "lint_duplicate_of_previous", "lint_compound_question",
    "lint_empty_or_malformed",
)


def _score_to_wire(score: CategoryScore) -> dict[str, float]:
    return {"precision": score.precision, "recall": score.recall, "f1": score.f1}


def metrics_to_wire(metrics: MetricsTriple) -> dict[str, Any]:
    return {"entities": _score_to_wire(metrics.entities),
            "attributes": _score_to_wire(metrics.attributes),
            "relations": _score_to_wire(metrics.relations)}


def transcript_to_wire(transcript: Transcript) -> dict[str, Any]:
    turns = []
    for turn in transcript.turns:
        record: dict[str, Any] = {
            "index": turn.index,
            "questions": [wire.question_to_wire(q) for q in turn.questions],
            "prompt_preview": turn.prompt_preview,
            "graph_digest": turn.graph_digest,
        }
        if turn.graph_snapshot is not None:
            record["graph"] = wire.graph_to_wire(turn.graph_snapshot)
        turns.append(record)
    events = []
    for turn_index, event in transcript.events:
        if isinstance(event, Answer):
            events.append({"turn": turn_index, "answer": wire.answer_to_wire(event)})
        else:
            assert isinstance(event, GraphEdit)
            events.append({"turn": turn_index, "edit": wire.edit_to_wire(event)})
    return {
        "session_id": transcript.session_id,
        "profile": transcript.profile_name,
        "starting_prompt": transcript.starting_prompt,
        "turns": turns,
        "events": events,
        "final_prompt": transcript.final_prompt,
        "graph_digests": list(transcript.graph_digests),
    }


def report_to_wire(report: EpisodeReport) -> dict[str, Any]:
    return {
        "fixture": report.fixture,
        "profile": report.profile,
        "seed": report.seed,
        "failed": report.failed,
        "failure": report.failure,
        "metrics_per_turn": [metrics_to_wire(m) for m in report.metrics_per_turn],
        "turns_to_convergence": report.turns_to_convergence,
        "lint_counts": dict(sorted(report.lint_counts.items())),
        "transcript": (transcript_to_wire(report.transcript)
                       if report.transcript is not None else None),
    }


def _csv_row(report: EpisodeReport) -> list[str]:
    final = report.final_metrics
    turns = len(report.transcript.events) if report.transcript is not None else 0

    def f1(score: float | None) -> str:
        return f"{score:.6f}" if score is not None else ""

    return [
        report.fixture,
        report.profile,
        str(report.seed),
        str(turns),
        f1(final.entities.f1 if final else None),
        f1(final.attributes.f1 if final else None),
        f1(final.relations.f1 if final else None),
        "true" if report.converged else "false",
        *[str(report.lint_counts.get(code, 0)) for code in LINT_COLUMNS],
    ]


def render_jsonl(reports: list[EpisodeReport]) -> str:
    lines = [json.dumps(report_to_wire(report), sort_keys=True, ensure_ascii=False,
                        separators=(",", ":"))
             for report in reports]
    return "".join(line + "\n" for line in lines)


def render_csv(reports: list[EpisodeReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        writer.writerow(_csv_row(report))
    return buffer.getvalue()


def write_report(reports: list[EpisodeReport], out_dir: str | Path) -> tuple[Path, Path]:
    """Write reports.jsonl and summary.csv under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jsonl_path = out_dir / JSONL_NAME
    csv_path = out_dir / CSV_NAME
    jsonl_path.write_text(render_jsonl(reports), encoding="utf-8")
    csv_path.write_text(render_csv(reports), encoding="utf-8")
    return jsonl_path, csv_path
