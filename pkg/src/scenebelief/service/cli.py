"""`session-service` command line entry point."""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from scenebelief.backends import BackendConfig, BackendMode
from scenebelief.profiles import PRESETS, AgentProfile
from scenebelief.service.app import create_app


def _load_profiles(path: str | None) -> dict[str, AgentProfile]:
    profiles = dict(PRESETS)
    if path is None:
        return profiles
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    for name, fields in raw.items():
        profiles[name] = AgentProfile(
            name=name,
            asks_questions=bool(fields["asks_questions"]),
            exposes_graph=bool(fields["exposes_graph"]),
            accepts_graph_edits=bool(fields["accepts_graph_edits"]),
            questions_per_turn=int(fields.get("questions_per_turn", 1)),
            max_turns=int(fields.get("max_turns", 5)),
        )
    return profiles


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="session-service",
                                     description="Belief-graph session HTTP service")
    parser.add_argument("--addr", default="127.0.0.1:8080", help="host:port to bind")
    parser.add_argument("--data", default=None,
                        help="event-log directory (default: a fresh temp dir)")
    parser.add_argument("--backend", default=None,
                        choices=[mode.value for mode in BackendMode],
                        help="override BACKEND_MODE")
    parser.add_argument("--fixture-dir", default=None, help="override FIXTURE_DIR")
    parser.add_argument("--profiles", default=None,
                        help="JSON file with extra profile definitions")
    parser.add_argument("--per-turn-generate", action="store_true",
                        help="let /generate produce images mid-dialog without "
                             "finalizing the session")
    parser.add_argument("--generate-count", type=int, default=1,
                        help="images per generate call (default 1)")
    args = parser.parse_args(argv)

    try:
        host, port_text = args.addr.rsplit(":", 1)
        port = int(port_text)
    except ValueError:
        print(f"session-service: bad --addr {args.addr!r}, expected host:port",
              file=sys.stderr)
        return 2

    import os

    mode = args.backend or os.environ.get("BACKEND_MODE", "mock-lenient")
    fixture_dir = args.fixture_dir or os.environ.get("FIXTURE_DIR", "")
    if BackendMode(mode) is not BackendMode.LIVE and not fixture_dir:
        fixture_dir = tempfile.mkdtemp(prefix="scenebelief-fixtures-")
    try:
        cfg = BackendConfig.from_env(mode=mode, fixture_dir=fixture_dir)
        profiles = _load_profiles(args.profiles)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"session-service: {exc}", file=sys.stderr)
        return 2

    data_dir = args.data or tempfile.mkdtemp(prefix="scenebelief-sessions-")
    app = create_app(cfg, data_dir, profiles,
                     per_turn_generate=args.per_turn_generate,
                     generate_count=args.generate_count)

    import uvicorn

    print(f"session-service: serving on http://{host}:{port} "
          f"(backend={cfg.mode.value}, data={data_dir})")
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
