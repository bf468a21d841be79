"""Parser, printer and diagnostics tests for the `.bgraph` format."""

from __future__ import annotations

import random

import pytest

from scenebelief import dsl
from scenebelief.graph import graphs_equivalent, new_graph, validate
from conftest import random_graph

CAT_BALL_TEXT = '''\
prompt "A cat playing with a ball"
entity cat {
  status explicit
  presence 1.000000
  attr color { "black": 0.600000, "orange": 0.400000 }
}
entity ball {
  status implicit
  presence 0.700000
  attr type { "ball of wool": 0.550000, "tennis ball": 0.450000 }
}
relation r1 (cat, ball) {
  description "the cat is playing with the ball"
  containment false
  alt { "plays with": 0.900000, "sits next to": 0.100000 }
}
'''


class TestParse:
    def test_fixture_structure(self):
        graph = dsl.parse_graph(CAT_BALL_TEXT)
        assert graph.origin_prompt == "A cat playing with a ball"
        assert set(graph.entities) == {"cat", "ball"}
        ball = graph.entities["ball"]
        assert ball.status.value == "implicit"
        assert ball.presence == pytest.approx(0.7)
        assert ball.attributes["type"].labels() == ("ball of wool", "tennis ball")
        assert graph.relations["r1"].containment is False
        assert validate(graph) == []

    def test_dangling_endpoint_diagnostic(self):
        text = 'prompt "p"\nentity cat { }\nrelation r (cat, dog) { alt { "on": 1.0 } }\n'
        result = dsl.parse(text)
        assert result.graph is None
        assert [d.code for d in result.diagnostics] == ["dangling-endpoint"]
        diag = result.diagnostics[0]
        assert diag.span.line == 3
        assert "dog" in diag.message

    def test_random_bytes_never_crash(self):
        junk_rng = random.Random(7)
        blob = bytes(junk_rng.randrange(256) for _ in range(10 * 1024)).decode("latin-1")
        result = dsl.parse(blob)
        assert result.graph is None
        assert result.diagnostics

    def test_duplicate_entity_id(self):
        text = 'prompt "p"\nentity cat { }\nentity cat { }\n'
        result = dsl.parse(text)
        codes = [d.code for d in result.diagnostics]
        assert codes == ["duplicate-id"]
        assert "line 2" in result.diagnostics[0].message

    def test_unknown_key_is_an_error(self):
        text = 'prompt "p"\nentity cat { flavor "salty" }\n'
        result = dsl.parse(text)
        assert any(d.code == "unknown-key" for d in result.diagnostics)

    def test_probability_sum_tolerance(self):
        # off by 1e-4: silently renormalized
        ok = dsl.parse('prompt "p"\nentity e { attr a { "x": 0.5001, "y": 0.5 } }\n')
        assert ok.ok
        total = sum(o.prob for o in ok.graph.entities["e"].attributes["a"].options)
        assert total == pytest.approx(1.0, abs=1e-9)
        # off by 0.1: rejected
        bad = dsl.parse('prompt "p"\nentity e { attr a { "x": 0.6, "y": 0.5 } }\n')
        assert any(d.code == "probability-sum" for d in bad.diagnostics)

    def test_missing_probabilities_fill_uniformly(self):
        result = dsl.parse('prompt "p"\nentity e { attr a { "x", "y" } }\n')
        dist = result.graph.entities["e"].attributes["a"]
        assert dist.prob_of("x") == pytest.approx(0.5)

    def test_partial_probabilities_share_leftover(self):
        result = dsl.parse('prompt "p"\nentity e { attr a { "x": 0.5, "y", "z" } }\n')
        dist = result.graph.entities["e"].attributes["a"]
        assert dist.prob_of("y") == pytest.approx(0.25)

    def test_status_presence_defaults(self):
        graph = dsl.parse_graph(
            'prompt "p"\nentity a { }\nentity b { presence 0.25 }\n'
            'entity c { status denied }\n')
        assert graph.entities["a"].status.value == "explicit"
        assert graph.entities["b"].status.value == "implicit"
        assert graph.entities["c"].presence == 0.0

    def test_inconsistent_presence_rejected(self):
        result = dsl.parse('prompt "p"\nentity e { status explicit presence 0.700000 }\n')
        assert any(d.code == "inconsistent-presence" for d in result.diagnostics)

    def test_missing_predicate_rejected(self):
        result = dsl.parse(
            'prompt "p"\nentity a { }\nentity b { }\nrelation r (a, b) { }\n')
        assert any(d.code == "missing-predicate" for d in result.diagnostics)

    def test_relation_description_derived_when_absent(self):
        graph = dsl.parse_graph(
            'prompt "p"\nentity mug { }\nentity table { }\n'
            'relation r (mug, table) { alt { "on": 1.0 } }\n')
        assert graph.relations["r"].description == "the mug on the table"

    def test_self_relation_rejected(self):
        result = dsl.parse(
            'prompt "p"\nentity a { }\nrelation r (a, a) { alt { "on": 1.0 } }\n')
        assert any(d.code == "self-relation" for d in result.diagnostics)

    def test_comments_stripped(self):
        graph = dsl.parse_graph(
            '# header\nprompt "p" # trailing\nentity cat { # inner\n}\n')
        assert "cat" in graph.entities

    def test_spans_inside_input(self):
        text = 'prompt "p"\nentity e { presence 3.5 }\nrelation ? (a, b) { }\n'
        result = dsl.parse(text)
        lines = text.splitlines()
        assert result.diagnostics
        for diag in result.diagnostics:
            assert 1 <= diag.span.line <= len(lines)
            assert diag.span.column >= 1
            assert diag.span.column - 1 <= len(lines[diag.span.line - 1])

    def test_diagnostics_capped(self):
        result = dsl.parse("?" * 100_000)
        assert len(result.diagnostics) <= dsl.MAX_DIAGNOSTICS + 1


class TestPrint:
    def test_empty_graph_prints_header_only(self):
        assert dsl.print_graph(new_graph("p")) == 'prompt "p"\n'

    def test_round_trip_fixture(self):
        graph = dsl.parse_graph(CAT_BALL_TEXT)
        assert graphs_equivalent(dsl.parse_graph(dsl.print_graph(graph)), graph)

    def test_round_trip_random_graphs(self, rng: random.Random):
        for _ in range(100):
            graph = random_graph(rng)
            reparsed = dsl.parse_graph(dsl.print_graph(graph))
            assert graphs_equivalent(reparsed, graph, prob_tol=1e-6)

    def test_canonical_fixed_point(self, rng: random.Random):
        for _ in range(100):
            graph = random_graph(rng)
            printed = dsl.print_graph(graph)
            assert dsl.print_graph(dsl.parse_graph(printed)) == printed

    def test_probabilities_have_six_digits(self, cat_ball_graph):
        printed = dsl.print_graph(cat_ball_graph)
        assert '"a ball of wool": 0.550000' in printed
        assert "presence 0.700000" in printed

    def test_escaping_round_trips(self):
        graph = new_graph('quote " backslash \\ newline \n tab \t end')
        reparsed = dsl.parse_graph(dsl.print_graph(graph))
        assert reparsed.origin_prompt == graph.origin_prompt

    def test_invalid_graph_rejected(self):
        from scenebelief.graph import Entity, EntityStatus

        bad = new_graph("p").with_entity(Entity("e", "e", EntityStatus.EXPLICIT, 0.5, {}))
        with pytest.raises(dsl.InvalidGraphError):
            dsl.print_graph(bad)


class TestRepairHints:
    def test_one_line_per_diagnostic_in_order(self):
        text = ('prompt "p"\nentity e { presence 9.0 }\n'
                'relation r (e, ghost) { alt { "on": 1.0 } }\n')
        result = dsl.parse(text)
        assert len(result.diagnostics) >= 2
        hints = dsl.repair_hints(result.diagnostics)
        lines = hints.splitlines()
        assert len(lines) == len(result.diagnostics)
        for diag, line in zip(result.diagnostics, lines):
            assert diag.code in line
            assert f"line {diag.span.line}" in line

    def test_duplicate_id_hint_names_both_lines(self):
        result = dsl.parse('prompt "p"\nentity cat { }\nentity cat { }\n')
        hints = dsl.repair_hints(result.diagnostics)
        assert "line 3" in hints  # second occurrence's span
        assert "line 2" in hints  # first occurrence named in the message

    def test_requires_diagnostics(self):
        with pytest.raises(ValueError):
            dsl.repair_hints([])


class TestGoldenCorpus:
    def test_shipped_corpus_parses_uniquely(self):
        from conftest import FIXTURES_DIR

        files = sorted(FIXTURES_DIR.glob("*.bgraph"))
        assert len(files) >= 30  # truth + start per fixture case
        for path in files:
            text = path.read_text(encoding="utf-8")
            first = dsl.parse_graph(text)
            second = dsl.parse_graph(text)
            assert graphs_equivalent(first, second, prob_tol=0.0)
            assert dsl.print_graph(first) == text
