"""Textual format for belief graphs (`.bgraph`).

Block-structured, keyword-introduced, designed so an LLM can emit it
reliably and a failed emission produces positioned diagnostics we can
feed back for a retry:

    prompt "A cat playing with a ball"
    entity cat {
      status explicit
      presence 1.000000
      attr color { "black": 0.600000, "orange": 0.400000 }
    }
    relation r1 (cat, ball) {
      description "the cat is playing with the ball"
      containment false
      alt { "plays with": 0.900000, "sits next to": 0.100000 }
    }

Comments run from ``#`` to end of line. Option probabilities may be
omitted (missing options share the leftover mass, uniform when none are
given) and sums within 1e-3 of 1 are silently renormalized; anything
further off is rejected. Unknown keys are hard errors because the
format doubles as the LLM output contract.

Diagnostic codes form a closed set; see DIAGNOSTIC_RULES.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scenebelief.graph import (
    BeliefGraph,
    Distribution,
    Entity,
    EntityStatus,
    InvalidGraphError,
    Option,
    Relation,
    validate,
)

MAX_DIAGNOSTICS = 100
SUM_TOLERANCE = 1e-3

# Closed set of diagnostic codes, each mapped to the grammar rule it enforces.
DIAGNOSTIC_RULES: dict[str, str] = {
    "unexpected-character": "input must consist of keywords, identifiers, quoted strings, "
                            "numbers and { } ( ) , : punctuation",
    "unterminated-string": 'strings are double-quoted and must close on the same line',
    "bad-number": "numbers are decimal, e.g. 0.550000",
    "syntax-error": "see the grammar sketch in the module documentation",
    "unknown-key": "entity blocks allow name/status/presence/attr; "
                   "relation blocks allow description/containment/alt",
    "duplicate-key": "each scalar key may appear at most once per block",
    "duplicate-id": "entity and relation ids must be unique across the file",
    "duplicate-attribute": "attribute names must be unique within an entity",
    "duplicate-option": "option labels must be unique within a distribution",
    "empty-distribution": "distributions need at least one option",
    "probability-range": "probabilities must lie in [0, 1]",
    "probability-sum": "option probabilities must sum to 1 within 0.001",
    "inconsistent-presence": "status explicit requires presence 1, denied requires 0, "
                             "implicit requires a value strictly between",
    "missing-predicate": "relation blocks must declare an alt { ... } predicate distribution",
    "dangling-endpoint": "relation endpoints must name declared entities",
    "self-relation": "relation subject and object must differ",
    "too-many-errors": "parsing stopped after too many diagnostics",
}

_ENTITY_KEYS = ("name", "status", "presence", "attr")
_RELATION_KEYS = ("description", "containment", "alt")
_IDENT_FIRST = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_REST = _IDENT_FIRST | set("0123456789-")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    code: str
    message: str


class ParseError(Exception):
    """Raised by parse_graph when the input is not a valid graph."""

    def __init__(self, diagnostics: list[ParseDiagnostic]) -> None:
        super().__init__(f"{len(diagnostics)} parse diagnostic(s); first: "
                         f"{diagnostics[0].message}" if diagnostics else "parse failed")
        self.diagnostics = diagnostics


@dataclass
class ParseResult:
    graph: BeliefGraph | None
    diagnostics: list[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return self.graph is not None and not self.diagnostics


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | string | number | punct | eof
    text: str
    value: object
    span: SourceSpan


class _Lexer:
    def __init__(self, source: str, diagnostics: list[ParseDiagnostic]) -> None:
        self.source = source
        self.diagnostics = diagnostics
        self.pos = 0
        self.line = 1
        self.column = 1

    def _span(self, line: int, column: int, length: int) -> SourceSpan:
        return SourceSpan(line, column, max(1, length))

    def _error(self, code: str, message: str, line: int, column: int, length: int) -> None:
        if len(self.diagnostics) < MAX_DIAGNOSTICS:
            self.diagnostics.append(
                ParseDiagnostic(self._span(line, column, length), code, message))

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        src = self.source
        while self.pos < len(src):
            ch = src[self.pos]
            if ch in " \t\r\n":
                self._advance()
                continue
            if ch == "#":
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance()
                continue
            line, column = self.line, self.column
            if ch in "{}(),:":
                self._advance()
                out.append(_Token("punct", ch, ch, self._span(line, column, 1)))
                continue
            if ch == '"':
                token = self._string(line, column)
                if token is not None:
                    out.append(token)
                continue
            if ch.isdigit() or (ch == "-" and self.pos + 1 < len(src)
                                and src[self.pos + 1].isdigit()):
                out.append(self._number(line, column))
                continue
            if ch in _IDENT_FIRST:
                start = self.pos
                while self.pos < len(src) and src[self.pos] in _IDENT_REST:
                    self._advance()
                text = src[start:self.pos]
                out.append(_Token("ident", text, text, self._span(line, column, len(text))))
                continue
            self._advance()
            self._error("unexpected-character", f"unexpected character {ch!r}",
                        line, column, 1)
            if len(self.diagnostics) >= MAX_DIAGNOSTICS:
                break
        out.append(_Token("eof", "", None, self._span(self.line, self.column, 1)))
        return out

    def _string(self, line: int, column: int) -> _Token | None:
        self._advance()  # opening quote
        parts: list[str] = []
        src = self.source
        while self.pos < len(src):
            ch = src[self.pos]
            if ch == "\n":
                break
            self._advance()
            if ch == '"':
                text = "".join(parts)
                return _Token("string", text, text,
                              self._span(line, column, self.column - column))
            if ch == "\\" and self.pos < len(src):
                esc = self._advance()
                mapped = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}.get(esc)
                if mapped is not None:
                    parts.append(mapped)
                elif esc == "u" and self.pos + 4 <= len(src):
                    hexdigits = src[self.pos:self.pos + 4]
                    try:
                        parts.append(chr(int(hexdigits, 16)))
                        for _ in range(4):
                            self._advance()
                    except ValueError:
                        parts.append(esc)
                else:
                    parts.append(esc)
            else:
                parts.append(ch)
        self._error("unterminated-string", "string literal never closes", line, column,
                    self.column - column)
        return None

    def _number(self, line: int, column: int) -> _Token:
        start = self.pos
        src = self.source
        if src[self.pos] == "-":
            self._advance()
        while self.pos < len(src) and src[self.pos].isdigit():
            self._advance()
        if self.pos < len(src) and src[self.pos] == ".":
            self._advance()
            while self.pos < len(src) and src[self.pos].isdigit():
                self._advance()
        if self.pos < len(src) and src[self.pos] in "eE":
            mark = self.pos
            self._advance()
            if self.pos < len(src) and src[self.pos] in "+-":
                self._advance()
            if self.pos < len(src) and src[self.pos].isdigit():
                while self.pos < len(src) and src[self.pos].isdigit():
                    self._advance()
            else:
                self.pos = mark  # bare 'e' belongs to the next token
        text = src[start:self.pos]
        try:
            value = float(text)
        except ValueError:
            self._error("bad-number", f"cannot read number {text!r}", line, column, len(text))
            value = 0.0
        return _Token("number", text, value, self._span(line, column, len(text)))


# ---------------------------------------------------------------------------
# Parser


@dataclass
class _RawEntity:
    entity_id: str
    span: SourceSpan
    name: str | None = None
    status: str | None = None
    presence: float | None = None
    attributes: dict[str, Distribution] = field(default_factory=dict)


@dataclass
class _RawRelation:
    relation_id: str
    span: SourceSpan
    subject: str
    object: str
    subject_span: SourceSpan
    object_span: SourceSpan
    description: str | None = None
    containment: bool = False
    predicate: Distribution | None = None


class _Parser:
    def __init__(self, tokens: list[_Token], diagnostics: list[ParseDiagnostic]) -> None:
        self.tokens = tokens
        self.diagnostics = diagnostics
        self.index = 0

    # -- token helpers

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _at_punct(self, text: str) -> bool:
        return self.current.kind == "punct" and self.current.text == text

    def _at_keyword(self, *words: str) -> bool:
        return self.current.kind == "ident" and self.current.text in words

    def _next(self) -> _Token:
        token = self.current
        if token.kind != "eof":
            self.index += 1
        return token

    def _error(self, code: str, message: str, span: SourceSpan | None = None) -> None:
        if len(self.diagnostics) < MAX_DIAGNOSTICS:
            self.diagnostics.append(
                ParseDiagnostic(span or self.current.span, code, message))

    def _exhausted(self) -> bool:
        return len(self.diagnostics) >= MAX_DIAGNOSTICS

    def _expect_punct(self, text: str) -> bool:
        if self._at_punct(text):
            self._next()
            return True
        self._error("syntax-error", f"expected {text!r}, found {self._describe(self.current)}")
        return False

    @staticmethod
    def _describe(token: _Token) -> str:
        if token.kind == "eof":
            return "end of input"
        return f"{token.kind} {token.text!r}"

    def _skip_to(self, *sync_keywords: str, braces: bool = True) -> None:
        """Error recovery: drop tokens until a sync point."""
        while self.current.kind != "eof":
            if self._at_keyword(*sync_keywords):
                return
            if braces and self._at_punct("}"):
                return
            self._next()

    # -- grammar

    def parse_file(self) -> BeliefGraph | None:
        prompt = ""
        if self._at_keyword("prompt"):
            self._next()
            if self.current.kind == "string":
                prompt = str(self._next().value)
            else:
                self._error("syntax-error", "prompt takes a quoted string")
                self._skip_to("entity", "relation", braces=False)
        else:
            self._error("syntax-error",
                        f"file must open with a prompt line, found {self._describe(self.current)}")
            self._skip_to("entity", "relation", braces=False)

        entities: list[_RawEntity] = []
        relations: list[_RawRelation] = []
        while self.current.kind != "eof" and not self._exhausted():
            if self._at_keyword("entity"):
                raw = self._entity_block()
                if raw is not None:
                    entities.append(raw)
            elif self._at_keyword("relation"):
                raw_rel = self._relation_block()
                if raw_rel is not None:
                    relations.append(raw_rel)
            else:
                self._error("syntax-error",
                            f"expected 'entity' or 'relation', found {self._describe(self.current)}")
                self._next()
                self._skip_to("entity", "relation", braces=False)
        if self._exhausted():
            last = self.diagnostics[-1]
            if last.code != "too-many-errors":
                self._error("too-many-errors", "stopping after too many diagnostics", last.span)
        return self._assemble(prompt, entities, relations)

    def _id_token(self) -> tuple[str, SourceSpan] | None:
        if self.current.kind in ("ident", "string"):
            token = self._next()
            if not token.value:
                self._error("syntax-error", "identifiers must be non-empty", token.span)
                return None
            return str(token.value), token.span
        self._error("syntax-error", f"expected an identifier, found {self._describe(self.current)}")
        return None

    def _entity_block(self) -> _RawEntity | None:
        self._next()  # 'entity'
        named = self._id_token()
        if named is None:
            self._skip_to("entity", "relation")
            return None
        entity_id, span = named
        raw = _RawEntity(entity_id, span)
        if not self._expect_punct("{"):
            self._skip_to("entity", "relation")
            return raw
        seen: set[str] = set()
        while not self._at_punct("}") and self.current.kind != "eof" and not self._exhausted():
            if not self._at_keyword(*_ENTITY_KEYS):
                code = "unknown-key" if self.current.kind == "ident" else "syntax-error"
                self._error(code, f"not an entity key: {self._describe(self.current)}")
                self._next()
                self._skip_to(*_ENTITY_KEYS)
                continue
            key_token = self._next()
            key = key_token.text
            if key != "attr" and key in seen:
                self._error("duplicate-key", f"{key} given twice in entity {entity_id!r}",
                            key_token.span)
            seen.add(key)
            if key == "name":
                if self.current.kind == "string":
                    raw.name = str(self._next().value)
                else:
                    self._error("syntax-error", "name takes a quoted string")
            elif key == "status":
                if self._at_keyword("explicit", "implicit", "denied"):
                    raw.status = self._next().text
                else:
                    self._error("syntax-error", "status must be explicit, implicit or denied")
                    self._skip_to(*_ENTITY_KEYS)
            elif key == "presence":
                if self.current.kind == "number":
                    token = self._next()
                    raw.presence = float(token.value)  # range-checked at assembly
                    if not 0.0 <= raw.presence <= 1.0:
                        self._error("probability-range",
                                    f"presence {token.text} outside [0,1]", token.span)
                        raw.presence = min(1.0, max(0.0, raw.presence))
                else:
                    self._error("syntax-error", "presence takes a number")
            elif key == "attr":
                attr_named = self._id_token()
                if attr_named is None:
                    self._skip_to(*_ENTITY_KEYS)
                    continue
                attr_name, attr_span = attr_named
                dist = self._distribution()
                if attr_name in raw.attributes:
                    self._error("duplicate-attribute",
                                f"attribute {attr_name!r} repeated on entity {entity_id!r}",
                                attr_span)
                elif dist is not None:
                    raw.attributes[attr_name] = dist
        self._expect_punct("}")
        return raw

    def _relation_block(self) -> _RawRelation | None:
        self._next()  # 'relation'
        named = self._id_token()
        if named is None:
            self._skip_to("entity", "relation")
            return None
        relation_id, span = named
        if not self._expect_punct("("):
            self._skip_to("entity", "relation")
            return None
        subject = self._id_token()
        self._expect_punct(",")
        obj = self._id_token()
        self._expect_punct(")")
        if subject is None or obj is None:
            self._skip_to("entity", "relation")
            return None
        raw = _RawRelation(relation_id, span, subject[0], obj[0], subject[1], obj[1])
        if not self._expect_punct("{"):
            self._skip_to("entity", "relation")
            return raw
        seen: set[str] = set()
        while not self._at_punct("}") and self.current.kind != "eof" and not self._exhausted():
            if not self._at_keyword(*_RELATION_KEYS):
                code = "unknown-key" if self.current.kind == "ident" else "syntax-error"
                self._error(code, f"not a relation key: {self._describe(self.current)}")
                self._next()
                self._skip_to(*_RELATION_KEYS)
                continue
            key_token = self._next()
            key = key_token.text
            if key in seen:
                self._error("duplicate-key", f"{key} given twice in relation {relation_id!r}",
                            key_token.span)
            seen.add(key)
            if key == "description":
                if self.current.kind == "string":
                    raw.description = str(self._next().value)
                else:
                    self._error("syntax-error", "description takes a quoted string")
            elif key == "containment":
                if self._at_keyword("true", "false"):
                    raw.containment = self._next().text == "true"
                else:
                    self._error("syntax-error", "containment must be true or false")
                    self._skip_to(*_RELATION_KEYS)
            elif key == "alt":
                dist = self._distribution()
                if dist is not None:
                    raw.predicate = dist
        self._expect_punct("}")
        return raw

    def _distribution(self) -> Distribution | None:
        open_span = self.current.span
        if not self._expect_punct("{"):
            return None
        labels: list[str] = []
        spans: list[SourceSpan] = []
        probs: list[float | None] = []
        bad = False
        while not self._at_punct("}") and self.current.kind != "eof" and not self._exhausted():
            if self.current.kind != "string":
                self._error("syntax-error",
                            f"expected a quoted option label, found {self._describe(self.current)}")
                bad = True
                self._next()
                continue
            label_token = self._next()
            prob: float | None = None
            if self._at_punct(":"):
                self._next()
                if self.current.kind == "number":
                    number = self._next()
                    prob = float(number.value)
                    if prob < 0.0 or prob > 1.0 + SUM_TOLERANCE:
                        self._error("probability-range",
                                    f"probability {number.text} outside [0,1]", number.span)
                        bad = True
                else:
                    self._error("syntax-error", "expected a probability after ':'")
                    bad = True
            label = str(label_token.value)
            if label in labels:
                self._error("duplicate-option", f"option {label!r} repeated", label_token.span)
                bad = True
            else:
                labels.append(label)
                spans.append(label_token.span)
                probs.append(prob)
            if self._at_punct(","):
                self._next()
        self._expect_punct("}")
        if bad:
            return None
        if not labels:
            self._error("empty-distribution", "distribution has no options", open_span)
            return None
        if "" in labels:
            self._error("syntax-error", "option labels must be non-empty", open_span)
            return None
        return self._build_distribution(labels, probs, open_span)

    def _build_distribution(self, labels: list[str], probs: list[float | None],
                            span: SourceSpan) -> Distribution | None:
        given = [p for p in probs if p is not None]
        missing = probs.count(None)
        if missing:
            leftover = max(0.0, 1.0 - sum(given))
            fill = leftover / missing if missing else 0.0
            probs = [fill if p is None else p for p in probs]
        total = sum(p for p in probs if p is not None)
        if abs(total - 1.0) > SUM_TOLERANCE:
            self._error("probability-sum",
                        f"option probabilities sum to {total:.6f}", span)
            return None
        if total <= 0.0:
            self._error("probability-sum", "option probabilities sum to zero", span)
            return None
        scaled = [min(1.0, max(0.0, float(p) / total)) for p in probs]  # type: ignore[arg-type]
        return Distribution(tuple(Option(label, prob) for label, prob in zip(labels, scaled)))

    # -- assembly

    def _assemble(self, prompt: str, raw_entities: list[_RawEntity],
                  raw_relations: list[_RawRelation]) -> BeliefGraph | None:
        entities: dict[str, Entity] = {}
        entity_lines: dict[str, int] = {}
        for raw in raw_entities:
            if raw.entity_id in entities:
                self._error("duplicate-id",
                            f"entity {raw.entity_id!r} already declared at line "
                            f"{entity_lines[raw.entity_id]}", raw.span)
                continue
            resolved = self._resolve_presence(raw)
            if resolved is None:
                continue
            status, presence = resolved
            entities[raw.entity_id] = Entity(raw.entity_id, raw.name or raw.entity_id,
                                             status, presence, raw.attributes)
            entity_lines[raw.entity_id] = raw.span.line

        relations: dict[str, Relation] = {}
        relation_lines: dict[str, int] = {}
        for raw_rel in raw_relations:
            if raw_rel.relation_id in relations:
                self._error("duplicate-id",
                            f"relation {raw_rel.relation_id!r} already declared at line "
                            f"{relation_lines[raw_rel.relation_id]}", raw_rel.span)
                continue
            ok = True
            if raw_rel.subject == raw_rel.object:
                self._error("self-relation",
                            f"relation {raw_rel.relation_id!r} connects "
                            f"{raw_rel.subject!r} to itself", raw_rel.span)
                ok = False
            for endpoint, endpoint_span in ((raw_rel.subject, raw_rel.subject_span),
                                            (raw_rel.object, raw_rel.object_span)):
                if endpoint not in entities:
                    self._error("dangling-endpoint",
                                f"relation {raw_rel.relation_id!r} references "
                                f"undeclared entity {endpoint!r}", endpoint_span)
                    ok = False
            if raw_rel.predicate is None:
                self._error("missing-predicate",
                            f"relation {raw_rel.relation_id!r} has no alt distribution",
                            raw_rel.span)
                ok = False
            if not ok:
                continue
            description = raw_rel.description
            if description is None:
                description = (f"the {entities[raw_rel.subject].name} "
                               f"{raw_rel.predicate.argmax} "
                               f"the {entities[raw_rel.object].name}")
            relations[raw_rel.relation_id] = Relation(
                raw_rel.relation_id, raw_rel.subject, raw_rel.object,
                description, raw_rel.predicate, raw_rel.containment)
            relation_lines[raw_rel.relation_id] = raw_rel.span.line

        if self.diagnostics:
            return None
        return BeliefGraph(origin_prompt=prompt, entities=entities, relations=relations)

    def _resolve_presence(self, raw: _RawEntity) -> tuple[EntityStatus, float] | None:
        status = EntityStatus(raw.status) if raw.status is not None else None
        presence = raw.presence
        if status is None and presence is None:
            return EntityStatus.EXPLICIT, 1.0
        if status is None:
            if presence == 1.0:
                return EntityStatus.EXPLICIT, 1.0
            if presence == 0.0:
                return EntityStatus.DENIED, 0.0
            return EntityStatus.IMPLICIT, float(presence)  # type: ignore[arg-type]
        if presence is None:
            defaults = {EntityStatus.EXPLICIT: 1.0, EntityStatus.DENIED: 0.0,
                        EntityStatus.IMPLICIT: 0.5}
            return status, defaults[status]
        consistent = ((status is EntityStatus.EXPLICIT and presence == 1.0)
                      or (status is EntityStatus.DENIED and presence == 0.0)
                      or (status is EntityStatus.IMPLICIT and 0.0 < presence < 1.0))
        if not consistent:
            self._error("inconsistent-presence",
                        f"entity {raw.entity_id!r} is {status.value} "
                        f"but presence is {presence}", raw.span)
            return None
        return status, float(presence)


def parse(text: str) -> ParseResult:
    """Parse `.bgraph` text; never raises on malformed input."""
    diagnostics: list[ParseDiagnostic] = []
    tokens = _Lexer(text, diagnostics).tokens()
    graph = _Parser(tokens, diagnostics).parse_file()
    if diagnostics:
        return ParseResult(None, diagnostics)
    return ParseResult(graph, [])


def parse_graph(text: str) -> BeliefGraph:
    """Parse, raising ParseError with the collected diagnostics on failure."""
    result = parse(text)
    if result.graph is None:
        raise ParseError(result.diagnostics)
    return result.graph


# ---------------------------------------------------------------------------
# Canonical printer


def _escape(text: str) -> str:
    out: list[str] = []
    for ch in text:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def _ident_or_string(text: str) -> str:
    if text and text[0] in _IDENT_FIRST and all(c in _IDENT_REST for c in text):
        return text
    return f'"{_escape(text)}"'


def _quantize_units(prob: float) -> int:
    return int(round(prob * 1_000_000))


def _format_units(units: int) -> str:
    return f"{units // 1_000_000}.{units % 1_000_000:06d}"


def _display_options(dist: Distribution) -> list[tuple[str, int]]:
    """Quantize probabilities to six decimals, preserving an exact sum of 1.

    Floors each probability and hands the leftover millionths to the
    options with the largest remainders, so each printed value stays
    strictly within 1e-6 of the true probability. Output order follows
    the quantized values (ties by label) so that reparsing sorts the
    file identically.
    """
    floors = []
    remainders = []
    for value, prob in dist.options:
        scaled = prob * 1_000_000
        unit = min(1_000_000, int(math.floor(scaled)))
        floors.append(unit)
        remainders.append(scaled - unit)
    shortfall = 1_000_000 - sum(floors)
    order = sorted(range(len(floors)),
                   key=lambda i: (-remainders[i], dist.options[i].value))
    for i in order[:max(0, shortfall)]:
        floors[i] += 1
    quantized = [(option.value, units) for option, units in zip(dist.options, floors)]
    quantized.sort(key=lambda item: (-item[1], item[0]))
    return quantized


def _format_distribution(dist: Distribution) -> str:
    rendered = ", ".join(f'"{_escape(value)}": {_format_units(units)}'
                         for value, units in _display_options(dist))
    return "{ " + rendered + " }"


def _presence_units(entity: Entity) -> int:
    units = _quantize_units(entity.presence)
    if entity.status is EntityStatus.IMPLICIT:
        units = min(999_999, max(1, units))
    return units


def print_graph(graph: BeliefGraph) -> str:
    """Render the canonical `.bgraph` form; requires a valid graph."""
    violations = validate(graph)
    if violations:
        raise InvalidGraphError(
            "cannot print an invalid graph: "
            + "; ".join(f"{v.rule}@{v.node}" for v in violations))
    lines = [f'prompt "{_escape(graph.origin_prompt)}"']
    for entity_id in sorted(graph.entities):
        entity = graph.entities[entity_id]
        lines.append(f"entity {_ident_or_string(entity_id)} {{")
        if entity.name != entity.id:
            lines.append(f'  name "{_escape(entity.name)}"')
        lines.append(f"  status {entity.status.value}")
        lines.append(f"  presence {_format_units(_presence_units(entity))}")
        for attr_name in sorted(entity.attributes):
            lines.append(f"  attr {_ident_or_string(attr_name)} "
                         f"{_format_distribution(entity.attributes[attr_name])}")
        lines.append("}")
    for relation_id in sorted(graph.relations):
        relation = graph.relations[relation_id]
        lines.append(f"relation {_ident_or_string(relation_id)} "
                     f"({_ident_or_string(relation.subject)}, "
                     f"{_ident_or_string(relation.object)}) {{")
        lines.append(f'  description "{_escape(relation.description)}"')
        lines.append(f"  containment {'true' if relation.containment else 'false'}")
        lines.append(f"  alt {_format_distribution(relation.predicate)}")
        lines.append("}")
    return "\n".join(lines) + "\n"


def repair_hints(diagnostics: list[ParseDiagnostic]) -> str:
    """One hint line per diagnostic, for the LLM retry loop."""
    if not diagnostics:
        raise ValueError("repair_hints needs at least one diagnostic")
    lines = []
    for diag in diagnostics:
        rule = DIAGNOSTIC_RULES.get(diag.code, "")
        lines.append(f"line {diag.span.line}, column {diag.span.column}: "
                     f"[{diag.code}] {diag.message} (rule: {rule})")
    return "\n".join(lines)
