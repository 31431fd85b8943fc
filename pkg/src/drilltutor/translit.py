"""Kana transliteration by longest-match table lookup.

Tables are plain two-column UTF-8 text, one ``symbol<TAB>rendering`` pair
per line, so an expert can edit them or supply one per interface
language. The sokuon (っ) is an engine rule, not a table row: it doubles
the first letter of whatever follows. Whitespace and ASCII pass through
unchanged, which lets mixed lines like "この kata" survive.
"""

from __future__ import annotations

from importlib.resources import files
from typing import Mapping


class UnknownSymbol(ValueError):
    """A character the active table cannot render."""


SOKUON = "っ"


def parse_table(text: str) -> dict:
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            symbol, rendering = line.split("\t")
        except ValueError:
            raise ValueError("line %d is not symbol<TAB>rendering" % lineno) from None
        table[symbol] = rendering
    return table


def dump_table(table: Mapping) -> str:
    return "".join("%s\t%s\n" % (sym, table[sym]) for sym in sorted(table))


def default_table() -> dict:
    text = files("drilltutor.data").joinpath("hiragana_romaji.tsv").read_text("utf-8")
    return parse_table(text)


def transliterate(text: str, table: Mapping) -> str:
    """Longest-match left to right; っ doubles the next consonant."""
    out = []
    max_len = max((len(k) for k in table), default=1)
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == SOKUON:
            j = i + 1
            length = min(max_len, n - j)
            nxt = None
            while length > 0:
                if text[j : j + length] in table:
                    nxt = table[text[j : j + length]]
                    break
                length -= 1
            if nxt is None or not nxt or not nxt[0].isalpha():
                raise UnknownSymbol("%r at %d has nothing to double" % (SOKUON, i))
            out.append(nxt[0])
            i += 1
            continue
        if ch.isspace() or ord(ch) < 128:
            out.append(ch)
            i += 1
            continue
        length = min(max_len, n - i)
        while length > 0:
            chunk = text[i : i + length]
            if chunk in table:
                out.append(table[chunk])
                i += length
                break
            length -= 1
        else:
            raise UnknownSymbol("%r at position %d" % (ch, i))
    return "".join(out)
