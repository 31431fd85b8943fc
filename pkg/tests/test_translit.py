"""Transliteration table parsing and the longest-match engine."""

from __future__ import annotations

import pytest

from drilltutor.translit import (
    UnknownSymbol,
    default_table,
    dump_table,
    parse_table,
    transliterate,
)


def test_default_table_basics():
    t = default_table()
    assert t["に"] == "ni"
    assert t["しゃ"] == "sha"
    assert transliterate("にほん", t) == "nihon"
    assert transliterate("どいつ", t) == "doitsu"
    assert transliterate("せんせい", t) == "sensei"


def test_longest_match_prefers_digraphs():
    t = default_table()
    assert transliterate("きゃく", t) == "kyaku"
    assert transliterate("きやく", t) == "kiyaku"  # no digraph here


def test_sokuon_doubles_next_consonant():
    t = default_table()
    assert transliterate("いっぽん", t) == "ippon"
    assert transliterate("じゅっぽん", t) == "juppon"
    assert transliterate("はっさつ", t) == "hassatsu"
    assert transliterate("きって", t) == "kitte"


def test_whitespace_and_ascii_pass_through():
    t = default_table()
    assert transliterate("この かた は どいつ です。", t) == "kono kata ha doitsu desu."
    assert transliterate("abc ですか", t) == "abc desuka"
    assert transliterate("", t) == ""


def test_unknown_symbol():
    t = default_table()
    with pytest.raises(UnknownSymbol):
        transliterate("カタカナ", t)  # katakana is not in the hiragana table
    with pytest.raises(UnknownSymbol):
        transliterate("ゃ", t)  # a small ya alone is not a symbol
    with pytest.raises(UnknownSymbol):
        transliterate("いっ", t)  # sokuon with nothing to double


def test_table_text_round_trip():
    t = default_table()
    text = dump_table(t)
    assert parse_table(text) == t
    assert parse_table("# comment\nあ\ta\n\n") == {"あ": "a"}
    with pytest.raises(ValueError):
        parse_table("あ a\n")  # space, not a tab
