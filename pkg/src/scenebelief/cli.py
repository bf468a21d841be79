"""`evalrun` command line: batch episodes, ad-hoc metrics, transcript lint.

Exit codes: 0 success, 1 any failed episode (or lint issues found),
2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from scenebelief import dsl, wire
from scenebelief.backends import BackendConfig, BackendMode
from scenebelief.episodes import discover_fixtures, run_episode
from scenebelief.metrics import graph_metrics
from scenebelief.profiles import load_profile
from scenebelief.questions import lint_question
from scenebelief.reports import metrics_to_wire, write_report
from scenebelief.simuser import UserMode, UserModel, load_ground_truth

USAGE_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evalrun",
                                     description="Belief-graph agent evaluation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay agent-vs-simulated-user episodes")
    run.add_argument("--profile", required=True,
                     help="t2i|ag1|ag2|ag3 or a JSON profile file")
    run.add_argument("--fixtures", required=True,
                     help="directory of <name>.bgraph/.caption.txt/.prompt.txt fixtures")
    run.add_argument("--turns", type=int, default=15, help="turn budget (default 15)")
    run.add_argument("--backend", default="mock-strict",
                     choices=[mode.value for mode in BackendMode])
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="output directory for reports")
    run.add_argument("--fixture-dir", default=None,
                     help="canned backend responses (default: <fixtures>/backend)")
    run.add_argument("--user", default="oracle", choices=["oracle", "llm"])
    run.add_argument("--noise", type=float, default=0.0,
                     help="oracle decline probability (default 0)")

    metrics = sub.add_parser("metrics", help="score one predicted graph against a truth")
    metrics.add_argument("--predicted", required=True)
    metrics.add_argument("--truth", required=True)

    lint = sub.add_parser("lint", help="re-lint the questions in a transcript file")
    lint.add_argument("--transcript", required=True,
                      help="a transcript JSON object or a reports.jsonl file")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    fixtures_dir = Path(args.fixtures)
    if not fixtures_dir.is_dir():
        print(f"evalrun: fixtures directory {fixtures_dir} does not exist", file=sys.stderr)
        return USAGE_ERROR
    try:
        profile = load_profile(args.profile, max_turns=args.turns)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"evalrun: {exc}", file=sys.stderr)
        return USAGE_ERROR
    fixture_dir = (args.fixture_dir or os.environ.get("FIXTURE_DIR")
                   or str(fixtures_dir / "backend"))
    try:
        cfg = BackendConfig.from_env(mode=args.backend, fixture_dir=fixture_dir)
    except ValueError as exc:
        print(f"evalrun: {exc}", file=sys.stderr)
        return USAGE_ERROR

    fixtures = discover_fixtures(fixtures_dir)
    if not fixtures:
        print(f"evalrun: no fixtures found under {fixtures_dir}", file=sys.stderr)
        return USAGE_ERROR

    reports = []
    failed = 0
    for fixture in fixtures:
        truth = load_ground_truth(fixture.truth_path, fixture.caption_path)
        user = UserModel(mode=UserMode(args.user), truth=truth, noise=args.noise,
                         backend=cfg if args.user == "llm" else None)
        report = run_episode(profile, truth.graph, user, cfg, args.seed,
                             starting_prompt=fixture.starting_prompt,
                             fixture_name=fixture.name)
        reports.append(report)
        final = report.final_metrics
        if report.failed:
            failed += 1
            print(f"{fixture.name}: FAILED ({report.failure})")
        else:
            assert final is not None
            turns = len(report.transcript.events) if report.transcript else 0
            print(f"{fixture.name}: turns={turns} "
                  f"entity_f1={final.entities.f1:.3f} "
                  f"attr_f1={final.attributes.f1:.3f} "
                  f"rel_f1={final.relations.f1:.3f} "
                  f"converged={'yes' if report.converged else 'no'}")
    jsonl_path, csv_path = write_report(reports, args.out)
    print(f"wrote {jsonl_path} and {csv_path}")
    return 1 if failed else 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    try:
        predicted = dsl.parse_graph(Path(args.predicted).read_text(encoding="utf-8"))
        truth_graph = dsl.parse_graph(Path(args.truth).read_text(encoding="utf-8"))
    except (OSError, dsl.ParseError) as exc:
        print(f"evalrun: {exc}", file=sys.stderr)
        return USAGE_ERROR
    result = graph_metrics(predicted, truth_graph)
    print(json.dumps(metrics_to_wire(result), indent=2, sort_keys=True))
    return 0


def _iter_transcripts(path: Path):
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return
    try:
        records = [json.loads(text)]
    except json.JSONDecodeError:
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    for record in records:
        transcript = record.get("transcript", record)
        if transcript and "turns" in transcript:
            yield transcript


def _cmd_lint(args: argparse.Namespace) -> int:
    path = Path(args.transcript)
    if not path.is_file():
        print(f"evalrun: transcript file {path} does not exist", file=sys.stderr)
        return USAGE_ERROR
    issue_count = 0
    for transcript in _iter_transcripts(path):
        history = []
        for turn in transcript.get("turns", []):
            snapshot = turn.get("graph")
            graph = wire.graph_from_wire(snapshot) if snapshot else None
            for raw_question in turn.get("questions", []):
                question = wire.question_from_wire(raw_question)
                if graph is not None:
                    issues = lint_question(question, graph, history)
                else:
                    # No snapshot on this transcript: structural checks only.
                    issues = [issue for issue in lint_question(
                        question, _empty_graph_for(question), history)
                        if issue.code.value in ("empty-or-malformed",
                                                "compound-question",
                                                "duplicate-of-previous")]
                for issue in issues:
                    issue_count += 1
                    print(f"{transcript.get('session_id', '?')} {question.id}: "
                          f"[{issue.code.value}] {issue.detail}")
                history.append(question)
    if issue_count:
        print(f"{issue_count} lint issue(s) found")
        return 1
    print("all questions lint clean")
    return 0


def _empty_graph_for(question):
    from scenebelief.graph import new_graph

    return new_graph("")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "metrics":
        return _cmd_metrics(args)
    return _cmd_lint(args)


if __name__ == "__main__":
    sys.exit(main())
