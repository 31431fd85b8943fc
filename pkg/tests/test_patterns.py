"""Template parsing, instantiation, enumeration and reverse matching."""

from __future__ import annotations

import itertools
import random

import pytest

from drilltutor.patterns import (
    Binding,
    DuplicateSlotName,
    EmptySlotName,
    EmptyValueList,
    ExtraAssignment,
    InvalidEscape,
    LexicalValue,
    Lit,
    MatchLimits,
    MissingAssignment,
    PatternError,
    PatternTemplate,
    Slot,
    UnbalancedSlotDelimiter,
    UnknownLanguage,
    enumerate_sentences,
    instantiate,
    match,
    parse_template,
    slot_names,
    unparse,
)

# The presentation pattern used throughout: English and Japanese word order
# differ but the slot set is identical.
PRESENT_EN = "This is <title> <name> from <origin>."
PRESENT_JA = "Kono kata wa <origin> no <name> <title> desu."


def present_template() -> PatternTemplate:
    return PatternTemplate.from_strings(
        "present-somebody-1", {"en": PRESENT_EN, "ja": PRESENT_JA}
    )


def lex(variable: str, en: str, ja: str) -> LexicalValue:
    return LexicalValue(variable, {"en": en, "ja": ja})


# ---------------------------------------------------------------- parsing

def test_parse_literal_only():
    assert parse_template("soreha nan desu ka") == (Lit("soreha nan desu ka"),)


def test_parse_presentation_japanese():
    assert parse_template(PRESENT_JA) == (
        Lit("Kono kata wa "),
        Slot("origin"),
        Lit(" no "),
        Slot("name"),
        Lit(" "),
        Slot("title"),
        Lit(" desu."),
    )


def test_parse_slot_at_both_ends():
    assert parse_template("<a>-mid-<b>") == (Slot("a"), Lit("-mid-"), Slot("b"))
    assert parse_template("<only>") == (Slot("only"),)


def test_parse_adjacent_slots_allowed():
    assert parse_template("<a><b>") == (Slot("a"), Slot("b"))


def test_parse_escapes():
    assert parse_template(r"a \< b \> c \\ d") == (Lit(r"a < b > c \ d"),)
    assert parse_template(r"x\<y<v>") == (Lit("x<y"), Slot("v"))


def test_parse_empty_string():
    assert parse_template("") == ()


@pytest.mark.parametrize(
    "text,err",
    [
        ("a<b", UnbalancedSlotDelimiter),
        ("a>b", UnbalancedSlotDelimiter),
        ("<a b>", UnbalancedSlotDelimiter),
        ("a<", UnbalancedSlotDelimiter),
        ("<>", EmptySlotName),
        ("x <v> y <v>", DuplicateSlotName),
        ("a\\b", InvalidEscape),
        ("tail\\", InvalidEscape),
    ],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_template(text)


def test_unparse_escapes_specials():
    segs = (Lit("a<b>c\\d "), Slot("x"))
    assert unparse(segs) == "a\\<b\\>c\\\\d <x>"


def test_parse_unparse_identity_on_random_segment_lists():
    rng = random.Random(20260814)
    alphabet = "ab <>\\z."
    for _ in range(300):
        segs = []
        names = iter("vwxyz")
        prev_lit = False
        for _ in range(rng.randint(1, 6)):
            if prev_lit or rng.random() < 0.5:
                try:
                    segs.append(Slot(next(names)))
                except StopIteration:
                    break
                prev_lit = False
            else:
                text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 7)))
                segs.append(Lit(text))
                prev_lit = True
        segs = tuple(segs)
        assert parse_template(unparse(segs)) == segs
        # and the text form round-trips too
        text = unparse(segs)
        assert unparse(parse_template(text)) == text


# ------------------------------------------------------------- templates

def test_template_variable_order_comes_from_first_rendering():
    t = present_template()
    assert t.variables == ("title", "name", "origin")
    assert t.slot_order("ja") == ("origin", "name", "title")
    assert t.rendering_text("en") == PRESENT_EN


def test_template_rejects_mismatched_slot_sets():
    with pytest.raises(PatternError):
        PatternTemplate.from_strings(
            "bad", {"en": "hi <a>", "ja": "yo <b>"}
        )


def test_template_unknown_language():
    t = present_template()
    with pytest.raises(UnknownLanguage):
        t.rendering("fr")


# ---------------------------------------------------------- instantiation

def test_instantiate_japanese_presentation():
    t = present_template()
    tup = {
        "title": lex("title", "Mr", "san"),
        "name": lex("name", "Schmidt", "Shimito"),
        "origin": lex("origin", "Germany", "doitsu"),
    }
    assert instantiate(t, "ja", tup) == "Kono kata wa doitsu no Shimito san desu."
    assert instantiate(t, "en", tup) == "This is Mr Schmidt from Germany."


def test_instantiate_accepts_plain_strings():
    t = PatternTemplate.from_strings("q", {"en": "This is a <object>."})
    assert instantiate(t, "en", {"object": "house"}) == "This is a house."


def test_instantiate_errors():
    t = present_template()
    tup = {
        "title": lex("title", "Mr", "san"),
        "name": lex("name", "Schmidt", "Shimito"),
        "origin": lex("origin", "Germany", "doitsu"),
    }
    with pytest.raises(MissingAssignment):
        instantiate(t, "ja", {k: v for k, v in tup.items() if k != "name"})
    with pytest.raises(ExtraAssignment):
        instantiate(t, "ja", dict(tup, mood="polite"))
    with pytest.raises(UnknownLanguage):
        instantiate(t, "de", tup)
    # a value lacking the requested rendering is also an unknown language
    short = dict(tup, origin=LexicalValue("origin", {"en": "Germany"}))
    with pytest.raises(UnknownLanguage):
        instantiate(t, "ja", short)


# ------------------------------------------------------------ enumeration

def test_enumerate_product_order_and_content():
    t = present_template()
    values = {
        "title": [lex("title", "Mr", "san"), lex("title", "Prof", "sensei")],
        "name": [lex("name", "Schmidt", "Shimito"), lex("name", "Tsuji", "Tsuji")],
        "origin": [lex("origin", "Germany", "doitsu"), lex("origin", "Japan", "nihon")],
    }
    got = enumerate_sentences(t, "ja", values)

    # independent oracle: explicit nested loops in template-variable order
    expected = []
    for title in values["title"]:
        for name in values["name"]:
            for origin in values["origin"]:
                tup = {"title": title, "name": name, "origin": origin}
                expected.append((tup, instantiate(t, "ja", tup)))
    assert got == expected
    assert len(got) == 8
    assert got[0][1] == "Kono kata wa doitsu no Shimito san desu."
    assert got[-1][1] == "Kono kata wa nihon no Tsuji sensei desu."
    # all distinct because the value renderings are distinct
    assert len({s for _, s in got}) == 8


def test_enumerate_cardinality_random():
    rng = random.Random(99)
    for _ in range(50):
        sizes = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
        names = [f"v{i}" for i in range(len(sizes))]
        text = " ".join(f"<{n}>" for n in names)
        t = PatternTemplate.from_strings("t", {"en": text})
        values = {
            n: [lex(n, f"{n}x{j}", f"{n}y{j}") for j in range(k)]
            for n, k in zip(names, sizes)
        }
        got = enumerate_sentences(t, "en", values)
        want = 1
        for k in sizes:
            want *= k
        assert len(got) == want


def test_enumerate_empty_value_list():
    t = present_template()
    with pytest.raises(EmptyValueList):
        enumerate_sentences(t, "ja", {"title": [], "name": [], "origin": []})


# --------------------------------------------------------------- matching

def test_match_single_slot():
    t = PatternTemplate.from_strings("q", {"en": "This is a <object>."})
    (b,) = match(t, "en", "This is a house.")
    assert b.assignments == {"object": "house"}
    assert b.capture_spans["object"] == (10, 15)
    assert b.source_span == (0, 16)


def test_match_token_cap_default_three():
    t = PatternTemplate.from_strings("q", {"en": "This is a <object>."})
    assert match(t, "en", "This is a QBitmap object.")[0].assignments == {
        "object": "QBitmap object"
    }
    long = "This is a chair that Louis XIV used to have in one of his bedrooms."
    assert match(t, "en", long) == []
    assert len(match(t, "en", long, MatchLimits(max_tokens_per_capture=15))) > 0


def test_match_no_match_and_zero_slots():
    t = PatternTemplate.from_strings("q", {"en": "This is a <object>."})
    assert match(t, "en", "That was a house.") == []
    lit = PatternTemplate.from_strings("w", {"ja": "soreha nan desu ka"})
    (b,) = match(lit, "ja", "soreha nan desu ka")
    assert b.assignments == {}
    assert match(lit, "ja", "soreha nan desu yo") == []


def test_match_case_insensitive_option():
    t = PatternTemplate.from_strings("q", {"en": "This is a <object>."})
    assert match(t, "en", "this is a house.") == []
    ci = MatchLimits(case_insensitive=True)
    (b,) = match(t, "en", "this is a house.", ci)
    assert b.assignments == {"object": "house"}


def test_match_multiple_bindings_sorted_leftmost_shortest():
    t = PatternTemplate.from_strings("q", {"en": "<a> and <b>"})
    got = match(t, "en", "x and y and z")
    caps = [b.assignments for b in got]
    assert caps == [
        {"a": "x", "b": "y and z"},
        {"a": "x and y", "b": "z"},
    ]


def test_match_captures_never_edge_whitespace():
    t = PatternTemplate.from_strings("q", {"en": "a <x> b"})
    for b in match(t, "en", "a  c  b"):
        assert b.assignments["x"] == b.assignments["x"].strip()


def brute_force_bindings(template, language, sentence, limits):
    """Oracle: try every combination of non-whitespace-edged substrings."""
    names = list(template.variables)
    n = len(sentence)
    spans = []
    for s in range(n):
        if sentence[s].isspace():
            continue
        for e in range(s + 1, n + 1):
            cap = sentence[s:e]
            if cap[-1].isspace():
                continue
            if len(cap.split()) <= limits.max_tokens_per_capture:
                spans.append((s, e))
    found = []
    for combo in itertools.product(spans, repeat=len(names)):
        tup = {nm: sentence[s:e] for nm, (s, e) in zip(names, combo)}
        built = instantiate(template, language, tup)
        if limits.case_insensitive:
            ok = built.casefold() == sentence.casefold() and len(built) == len(sentence)
        else:
            ok = built == sentence
        if not ok:
            continue
        # spans must actually tile the sentence in rendering order
        order = [nm for nm in template.slot_order(language)]
        pos = 0
        placed = dict(zip(names, combo))
        good = True
        for seg_name in order:
            s, e = placed[seg_name]
            if s < pos:
                good = False
                break
            pos = e
        if good:
            found.append((tuple(combo), tup))
    # dedupe on span combos, order leftmost-shortest
    uniq = {c: tup for c, tup in found}
    ordered = sorted(uniq.items(), key=lambda it: list(it[0]))
    return [tup for _, tup in ordered]


def test_match_agrees_with_brute_force_oracle():
    rng = random.Random(7)
    limits = MatchLimits()
    words = ["pen", "blue pen", "old red pen", "ink", "cap"]
    for _ in range(40):
        t = PatternTemplate.from_strings("q", {"en": "it is a <thing> here"})
        w = rng.choice(words)
        sentence = f"it is a {w} here"
        got = [b.assignments for b in match(t, "en", sentence, limits)]
        want = brute_force_bindings(t, "en", sentence, limits)
        assert got == want
    # two slots, short sentences
    t2 = PatternTemplate.from_strings("q2", {"en": "<a> eats <b>"})
    for sentence in ["tom eats rice", "a cat eats a fish", "he eats it all day"]:
        got = [b.assignments for b in match(t2, "en", sentence, limits)]
        want = brute_force_bindings(t2, "en", sentence, limits)
        assert got == want


def test_instantiate_match_round_trip_random():
    # single-token values over an alphabet disjoint from the literals
    rng = random.Random(1234)
    lits = ["uno", "dos", "tres", "quad", "fin."]
    vals = ["zip", "zap", "nolo", "w9", "xx-y"]
    for _ in range(200):
        k = rng.randint(1, 3)
        names = [f"s{i}" for i in range(k)]
        parts = [rng.choice(lits)]
        for nm in names:
            parts.append(f"<{nm}>")
            parts.append(rng.choice(lits))
        text = " ".join(parts)
        t = PatternTemplate.from_strings("r", {"en": text})
        tup = {nm: rng.choice(vals) for nm in names}
        sentence = instantiate(t, "en", tup)
        bindings = match(t, "en", sentence)
        assert any(b.assignments == tup for b in bindings)
        # soundness: every binding reproduces the sentence exactly
        for b in bindings:
            assert instantiate(t, "en", b.assignments) == sentence
