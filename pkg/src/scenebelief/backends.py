"""Gateway to chat-LLM and text-to-image services.

Three modes share one surface: ``live`` does real HTTP, ``mock-strict``
serves canned responses keyed by a request digest and fails on misses,
``mock-lenient`` falls back to a deterministic template when no canned
response exists. Everything outside this module stays network-free.

The graph-extraction contract lives here too: the chat backend is
instructed (data/extract_prompt_v1.txt) to emit the `.bgraph` format,
and parse failures are fed back as repair hints for up to two retries.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from scenebelief import dsl
from scenebelief.graph import BeliefGraph, EntityStatus, validate

logger = logging.getLogger(__name__)

EXTRACT_PROMPT_RESOURCE = "extract_prompt_v1.txt"
MAX_EXTRACTION_RETRIES = 2

_STOPWORDS = frozenset("""
a an and are as at be by for from in into is it of on or over the their
there this to under with without
""".split())


class BackendMode(str, Enum):
    LIVE = "live"
    MOCK_STRICT = "mock-strict"
    MOCK_LENIENT = "mock-lenient"


class BackendError(Exception):
    """Base class for gateway failures. Messages are secret-scrubbed."""


class TransportError(BackendError):
    pass


class UnmatchedFixtureError(BackendError):
    def __init__(self, digest: str) -> None:
        super().__init__(f"no fixture for request digest {digest}")
        self.digest = digest


class ExtractionError(BackendError):
    def __init__(self, message: str, diagnostics: list[dsl.ParseDiagnostic]) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ChatRequest:
    system: str
    user: str
    temperature: float = 0.0
    max_output: int = 2048
    tag: str = "chat"

    def __post_init__(self) -> None:
        if self.max_output <= 0:
            raise ValueError(f"max_output must be positive, got {self.max_output}")


@dataclass(frozen=True)
class BackendConfig:
    mode: BackendMode = BackendMode.MOCK_LENIENT
    chat_endpoint: str = ""
    chat_key: str = ""
    t2i_endpoint: str = ""
    t2i_key: str = ""
    timeout_ms: int = 30_000
    retries: int = 2
    fixture_dir: str = ""

    def __post_init__(self) -> None:
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.mode is BackendMode.LIVE and not self.chat_endpoint:
            raise ValueError("live mode requires a chat endpoint")
        if self.mode is not BackendMode.LIVE and not self.fixture_dir:
            raise ValueError(f"{self.mode.value} mode requires a fixture directory")

    @property
    def has_t2i(self) -> bool:
        return self.mode is not BackendMode.LIVE or bool(self.t2i_endpoint)

    def scrub(self, text: str) -> str:
        """Blank out configured secrets wherever they appear."""
        for secret in (self.chat_key, self.t2i_key):
            if secret:
                text = text.replace(secret, "***")
        return text

    @staticmethod
    def from_env(env: dict[str, str] | None = None, *, mode: str | None = None,
                 fixture_dir: str | None = None) -> "BackendConfig":
        """Build from CHAT_/T2I_/BACKEND_/FIXTURE_ env vars.

        ``mode`` and ``fixture_dir`` override the environment when given
        (CLI flags win over env vars).
        """
        env = dict(os.environ if env is None else env)
        resolved_mode = BackendMode(
            mode or env.get("BACKEND_MODE", BackendMode.MOCK_LENIENT.value))
        return BackendConfig(
            mode=resolved_mode,
            chat_endpoint=env.get("CHAT_ENDPOINT", ""),
            chat_key=env.get("CHAT_API_KEY", ""),
            t2i_endpoint=env.get("T2I_ENDPOINT", ""),
            t2i_key=env.get("T2I_API_KEY", ""),
            timeout_ms=int(env.get("BACKEND_TIMEOUT_MS", "30000")),
            retries=int(env.get("BACKEND_RETRIES", "2")),
            fixture_dir=fixture_dir if fixture_dir is not None
            else env.get("FIXTURE_DIR", ""),
        )


@dataclass(frozen=True)
class ImageHandle:
    content_type: str
    prompt_digest: str
    uri: str | None = None
    data: bytes | None = None

    def __post_init__(self) -> None:
        if (self.uri is None) == (self.data is None):
            raise ValueError("exactly one of uri/data must be set")


@dataclass
class ExtractionOutcome:
    graph: BeliefGraph
    retry_count: int
    responses: list[str] = field(default_factory=list)


def fixture_key(tag: str, system: str, user: str) -> str:
    """Stable digest used to name mock fixture files."""
    payload = json.dumps({"tag": tag, "system": system, "user": user},
                         sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def write_fixture(fixture_dir: str | Path, tag: str, system: str, user: str,
                  response: str) -> Path:
    """Author a canned response for the matching request."""
    path = Path(fixture_dir) / f"{fixture_key(tag, system, user)}.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(response, encoding="utf-8")
    return path


def _http_post_text(url: str, payload: dict, key: str, timeout_s: float) -> str:
    """The only function in the package that touches the network."""
    import requests

    headers = {"Content-Type": "application/json"}
    if key:
        headers["Authorization"] = f"Bearer {key}"
    response = requests.post(url, json=payload, headers=headers, timeout=timeout_s)
    response.raise_for_status()
    try:
        body = response.json()
    except ValueError:
        return response.text
    if isinstance(body, dict) and "text" in body:
        return str(body["text"])
    return response.text


def complete(cfg: BackendConfig, req: ChatRequest) -> str:
    """One chat completion; deterministic in the mock modes."""
    if cfg.mode is BackendMode.LIVE:
        return _complete_live(cfg, req)
    digest = fixture_key(req.tag, req.system, req.user)
    fixture_path = Path(cfg.fixture_dir) / f"{digest}.txt"
    if fixture_path.is_file():
        return fixture_path.read_text(encoding="utf-8")
    if cfg.mode is BackendMode.MOCK_STRICT:
        raise UnmatchedFixtureError(digest)
    return _lenient_fallback(req)


def _complete_live(cfg: BackendConfig, req: ChatRequest) -> str:
    payload = {"system": req.system, "user": req.user,
               "temperature": req.temperature, "max_output": req.max_output}
    import requests

    last_error: Exception | None = None
    for attempt in range(cfg.retries + 1):
        try:
            return _http_post_text(cfg.chat_endpoint, payload, cfg.chat_key,
                                   cfg.timeout_ms / 1000.0)
        except requests.RequestException as exc:
            last_error = exc
            logger.warning("chat transport failure (attempt %d): %s",
                           attempt + 1, cfg.scrub(str(exc)))
    raise TransportError(cfg.scrub(f"chat backend unreachable: {last_error}"))


def _lenient_fallback(req: ChatRequest) -> str:
    """Deterministic template responses for fixture misses in lenient mode."""
    if req.tag.startswith("extract-graph"):
        prompt = req.user.splitlines()[0] if req.user else ""
        return _naive_extraction(prompt)
    return f"[mock:{req.tag}] {req.user}"


def _naive_extraction(prompt: str) -> str:
    """Rule-based stand-in extraction: content words become bare entities."""
    words = re.findall(r"[a-zA-Z][a-zA-Z'-]*", prompt.lower())
    names: list[str] = []
    for word in words:
        if word in _STOPWORDS or len(word) < 3 or word in names:
            continue
        names.append(word)
        if len(names) == 5:
            break
    lines = [f'prompt "{prompt}"']
    for name in names:
        ident = re.sub(r"[^a-z0-9_-]", "_", name)
        lines.append(f"entity {ident} {{")
        lines.append("  status explicit")
        lines.append("  presence 1.000000")
        lines.append("}")
    return "\n".join(lines) + "\n"


def normalize_name(name: str) -> str:
    return " ".join(name.lower().split())


def _force_prompt_entities_explicit(graph: BeliefGraph, prompt: str) -> BeliefGraph:
    """Entities whose normalized name occurs in the prompt become explicit."""
    haystack = normalize_name(prompt)
    for entity in list(graph.entities.values()):
        if entity.status is EntityStatus.EXPLICIT:
            continue
        if normalize_name(entity.name) and normalize_name(entity.name) in haystack:
            graph = graph.with_entity(entity.with_status(EntityStatus.EXPLICIT, 1.0))
    return graph


def _extraction_system_prompt() -> str:
    return resources.files("scenebelief.data").joinpath(
        EXTRACT_PROMPT_RESOURCE).read_text(encoding="utf-8")


def extraction_request(prompt: str, attempt: int = 0,
                       previous_output: str = "", hints: str = "") -> ChatRequest:
    """The exact request extract_graph sends for a given attempt."""
    if attempt == 0:
        return ChatRequest(system=_extraction_system_prompt(), user=prompt,
                           temperature=0.0, tag="extract-graph")
    user = (f"{prompt}\n\n# Your previous output:\n{previous_output}\n"
            f"# It had these problems:\n{hints}\n"
            "Re-emit the full corrected graph.")
    return ChatRequest(system=_extraction_system_prompt(), user=user,
                       temperature=0.0, tag=f"extract-graph#retry{attempt}")


def extract_graph_detailed(cfg: BackendConfig, prompt: str) -> ExtractionOutcome:
    """Extract a belief graph from a starting prompt, with retry bookkeeping."""
    if not prompt:
        raise ValueError("prompt must be non-empty")
    responses: list[str] = []
    all_diagnostics: list[dsl.ParseDiagnostic] = []
    previous_output = ""
    hints = ""
    for attempt in range(MAX_EXTRACTION_RETRIES + 1):
        request = extraction_request(prompt, attempt, previous_output, hints)
        response = complete(cfg, request)
        responses.append(response)
        result = dsl.parse(response)
        if result.graph is not None:
            graph = _force_prompt_entities_explicit(result.graph, prompt)
            leftover = validate(graph)
            if not leftover:
                return ExtractionOutcome(graph=graph, retry_count=attempt,
                                         responses=responses)
            result = dsl.ParseResult(None, [
                dsl.ParseDiagnostic(dsl.SourceSpan(1, 1), "syntax-error",
                                    f"{v.rule}: {v.detail}") for v in leftover])
        all_diagnostics = result.diagnostics
        previous_output = response
        hints = dsl.repair_hints(result.diagnostics)
        logger.info("extraction attempt %d failed with %d diagnostic(s)",
                    attempt + 1, len(result.diagnostics))
    raise ExtractionError(
        cfg.scrub(f"graph extraction failed after {MAX_EXTRACTION_RETRIES + 1} attempts; "
                  f"last diagnostics:\n{dsl.repair_hints(all_diagnostics)}"),
        all_diagnostics)


def extract_graph(cfg: BackendConfig, prompt: str) -> BeliefGraph:
    return extract_graph_detailed(cfg, prompt).graph


def generate_image(cfg: BackendConfig, prompt: str) -> ImageHandle:
    """One text-to-image call; mock modes return a digest-derived placeholder."""
    if not prompt:
        raise ValueError("prompt must be non-empty")
    digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
    if cfg.mode is not BackendMode.LIVE:
        return ImageHandle(uri=f"mock://image/{digest[:16]}", content_type="image/png",
                           prompt_digest=digest)
    if not cfg.t2i_endpoint:
        raise BackendError("no text-to-image endpoint configured")
    import requests

    last_error: Exception | None = None
    for attempt in range(cfg.retries + 1):
        try:
            body = _http_post_text(cfg.t2i_endpoint, {"prompt": prompt}, cfg.t2i_key,
                                   cfg.timeout_ms / 1000.0)
            try:
                parsed = json.loads(body)
            except ValueError:
                parsed = {"uri": body.strip()}
            if "uri" in parsed:
                return ImageHandle(uri=str(parsed["uri"]),
                                   content_type=str(parsed.get("content_type", "image/png")),
                                   prompt_digest=digest)
            raise BackendError(cfg.scrub(f"t2i response missing uri: {body[:200]}"))
        except requests.RequestException as exc:
            last_error = exc
            logger.warning("t2i transport failure (attempt %d): %s",
                           attempt + 1, cfg.scrub(str(exc)))
    raise TransportError(cfg.scrub(f"t2i backend unreachable: {last_error}"))
