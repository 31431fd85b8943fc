"""Corpus splitting, query compilation, harvesting and abstraction."""

from __future__ import annotations

from pathlib import Path

import pytest

from drilltutor.mining import (
    CategorizedLexicon,
    Corpus,
    MiningError,
    NoKnownLexemes,
    NoRendering,
    abstract_patterns,
    compile_query,
    find_instances,
    find_lexeme_spans,
    harvest_values,
    split_sentences,
)
from drilltutor.patterns import LexicalValue, MatchLimits, PatternTemplate, enumerate_sentences

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

THIS_IS_A = PatternTemplate.from_strings("identify-1", {"en": "This is a <object>."})


def book() -> Corpus:
    return Corpus.from_files([FIXTURES / "book.txt"])


# ------------------------------------------------------------- splitting

def test_split_sentences_offsets_and_text():
    text = "One two. Three?  Four五。 tail bit"
    spans = split_sentences("d", text)
    assert [s.text for s in spans] == ["One two.", "Three?", "Four五。", "tail bit"]
    for s in spans:
        assert text[s.start : s.end] == s.text


def test_split_requires_whitespace_or_eof_after_terminator():
    spans = split_sentences("d", "Version 1.5 is out. Yes!")
    assert [s.text for s in spans] == ["Version 1.5 is out.", "Yes!"]


def test_split_japanese_terminators():
    spans = split_sentences("d", "soreha nan desu ka？ koreha hon desu。")
    assert [s.text for s in spans] == ["soreha nan desu ka？", "koreha hon desu。"]


def test_corpus_from_texts_counts():
    c = Corpus.from_texts(["A b. C d.", "E f!"])
    assert len(c) == 3
    assert [s.doc_id for s in c.sentences] == ["doc0", "doc0", "doc1"]


# --------------------------------------------------------------- queries

def test_compile_query_wildcard_text():
    q = compile_query(THIS_IS_A, "en")
    assert q.text == "This is a *."
    assert q.limits.max_tokens_per_capture == 3
    assert q.limits.case_insensitive


def test_compile_query_zero_slot_is_the_literal_sentence():
    t = PatternTemplate.from_strings("w", {"ja": "soreha nan desu ka"})
    assert compile_query(t, "ja").text == "soreha nan desu ka"


def test_compile_query_no_rendering():
    with pytest.raises(NoRendering):
        compile_query(THIS_IS_A, "ja")


def test_find_instances_on_the_book():
    hits = find_instances(compile_query(THIS_IS_A, "en"), book())
    captures = [h.captures["object"] for h in hits]
    # the twelve-token chair sentence is over the capture cap
    assert captures == ["house", "QBitmap object", "house", "pen"]
    assert all("chair" not in c for c in captures)
    assert hits[0].context == "This is a house."
    assert hits[0].doc_id == "book.txt"


def test_find_instances_raising_cap_admits_the_long_sentence():
    wide = MatchLimits(max_tokens_per_capture=12, case_insensitive=True)
    hits = find_instances(compile_query(THIS_IS_A, "en", wide), book())
    assert any(h.captures["object"].startswith("chair that Louis") for h in hits)


def test_matches_do_not_cross_sentence_boundaries():
    c = Corpus.from_texts(["This is a house. What is that?"])
    t = PatternTemplate.from_strings("x", {"en": "This is a <object>. What is <q>?"})
    assert find_instances(compile_query(t, "en"), c) == []


def test_case_insensitive_by_default_exact_when_asked():
    c = Corpus.from_texts(["this is a house."])
    assert len(find_instances(compile_query(THIS_IS_A, "en"), c)) == 1
    exact = MatchLimits(case_insensitive=False)
    assert find_instances(compile_query(THIS_IS_A, "en", exact), c) == []


# -------------------------------------------------------------- harvest

def test_harvest_ranking_and_filters():
    hits = find_instances(compile_query(THIS_IS_A, "en"), book())
    plain = harvest_values(hits)
    assert plain["object"][0] == ("house", 2)
    assert ("QBitmap object", 1) in plain["object"]

    lexicon = CategorizedLexicon.from_file(FIXTURES / "en.lex")
    kept = harvest_values(hits, lexicon=lexicon)
    assert [v for v, _ in kept["object"]] == ["house", "pen"]

    frequent = harvest_values(hits, min_count=2)
    assert frequent["object"] == [("house", 2)]

    both = harvest_values(hits, lexicon=lexicon, min_count=2)
    assert both["object"] == [("house", 2)]


def test_harvest_empty_and_ties():
    assert harvest_values([]) == {}
    c = Corpus.from_texts(["say a. say b. say b. say a."])
    t = PatternTemplate.from_strings("s", {"en": "say <w>."})
    pairs = harvest_values(find_instances(compile_query(t, "en"), c))["w"]
    assert pairs == [("a", 2), ("b", 2)]  # ties break alphabetically


# -------------------------------------------------------------- lexicon

def test_lexicon_file_and_lookup():
    lx = CategorizedLexicon.from_file(FIXTURES / "es.lex")
    assert lx.language == "es"
    assert "cerveza" in lx and "CERVEZA" in lx
    assert lx.category("Cerveza") == "drink"
    assert lx.category("agua") is None


def test_lexicon_validation():
    with pytest.raises(MiningError):
        CategorizedLexicon({"": "drink"})
    with pytest.raises(MiningError):
        CategorizedLexicon({"x": "not a name!"})


def test_lexeme_spans_maximal_munch_and_punctuation():
    lx = CategorizedLexicon(
        {"por favor": "politeness", "favor": "noun", "cerveza": "drink"}
    )
    spans = find_lexeme_spans("una cerveza, por favor!", lx)
    assert [(s.surface, s.category) for s in spans] == [
        ("cerveza", "drink"),
        ("por favor", "politeness"),
    ]
    # punctuation stays outside the span
    assert spans[0].start == 4 and spans[0].end == 11


# ----------------------------------------------------------- abstraction

def test_abstract_single_lexeme():
    lx = CategorizedLexicon.from_file(FIXTURES / "es.lex")
    got = abstract_patterns("quiero una cerveza", lx)
    assert got == [("quiero una <drink>", 0)]


def test_abstract_ranked_by_corpus_support():
    lx = CategorizedLexicon.from_file(FIXTURES / "es.lex")
    corpus = Corpus.from_files([FIXTURES / "es_corpus.txt"])
    got = abstract_patterns("quiero una cerveza", lx, corpus=corpus)
    assert got[0][0] == "quiero una <drink>"
    assert got[0][1] == 4  # cerveza, sidra, limonada, mesa cerca


def test_abstract_two_lexemes_three_candidates():
    lx = CategorizedLexicon({"cerveza": "drink", "carlos": "person"}, language="es")
    got = abstract_patterns("bebo cerveza con carlos", lx)
    assert [t for t, _ in got] == [
        "bebo <drink> con carlos",
        "bebo cerveza con <person>",
        "bebo <drink> con <person>",
    ]


def test_abstract_repeated_category_gets_distinct_slots():
    lx = CategorizedLexicon({"cerveza": "drink", "sidra": "drink"}, language="es")
    got = abstract_patterns("cerveza o sidra", lx)
    assert ("<drink> o <drink-2>", 0) in got


def test_abstract_no_known_lexemes():
    lx = CategorizedLexicon({"cerveza": "drink"})
    with pytest.raises(NoKnownLexemes):
        abstract_patterns("hello there", lx)


def test_abstract_recovers_the_source_template():
    # categories chosen to coincide with the variable names
    t = PatternTemplate.from_strings("src", {"en": "I want a <thing> now"})
    sentence = "I want a hat now"
    lx = CategorizedLexicon({"hat": "thing"})
    got = abstract_patterns(sentence, lx)
    assert t.rendering_text("en") in [text for text, _ in got]


# ------------------------------------------------------------ round trip

def test_enumerated_sentences_are_found_again():
    t = PatternTemplate.from_strings(
        "present-somebody-1",
        {"ja": "Kono kata wa <origin> no <name> <title> desu."},
    )
    values = {
        "title": [LexicalValue("title", {"ja": "san"}), LexicalValue("title", {"ja": "sensei"})],
        "name": [LexicalValue("name", {"ja": "Shimito"}), LexicalValue("name", {"ja": "Tsuji"})],
        "origin": [LexicalValue("origin", {"ja": "doitsu"}), LexicalValue("origin", {"ja": "nihon"})],
    }
    pairs = enumerate_sentences(t, "ja", values)
    corpus = Corpus.from_texts([" ".join(s for _, s in pairs)])
    hits = find_instances(compile_query(t, "ja"), corpus)
    found = {tuple(sorted(h.captures.items())) for h in hits}
    for tup, _ in pairs:
        expected = tuple(sorted((k, v.renderings["ja"]) for k, v in tup.items()))
        assert expected in found
