"""Corpus mining: find pattern instances in text, harvest values, abstract
new patterns from example sentences.

A compiled query is a template turned loose on a corpus: slots become
wildcards capped at a few tokens each, literals match case-insensitively
by default (kana has no case, so exactness there is free). Matching stays
inside sentence boundaries. Harvesting counts captures per variable;
abstraction runs the other way, replacing known lexicon spans in a fresh
sentence with category slots and ranking the candidates by corpus
support.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .patterns import (
    Lit,
    MatchLimits,
    PatternTemplate,
    Slot,
    UnknownLanguage,
    is_valid_name,
    match,
    parse_template,
    unparse,
)


class MiningError(ValueError):
    pass


class NoRendering(MiningError):
    """The template has no rendering in the query language."""


class NoKnownLexemes(MiningError):
    """Abstraction found nothing from the lexicon in the sentence."""


SENTENCE_TERMINATORS = ".?!。？！"


@dataclass(frozen=True)
class SentenceSpan:
    doc_id: str
    start: int
    end: int
    text: str


def split_sentences(doc_id: str, text: str, terminators: str = SENTENCE_TERMINATORS):
    """Sentence spans: a terminator followed by whitespace or end of text
    closes a sentence; a trailing fragment without one still counts."""
    spans = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in terminators and (i + 1 >= n or text[i + 1].isspace()):
            raw = text[start : i + 1]
            lead = len(raw) - len(raw.lstrip())
            if raw.strip():
                spans.append(SentenceSpan(doc_id, start + lead, i + 1, raw.strip()))
            start = i + 1
        i += 1
    raw = text[start:]
    if raw.strip():
        lead = len(raw) - len(raw.lstrip())
        trail = len(raw) - len(raw.rstrip())
        spans.append(SentenceSpan(doc_id, start + lead, n - trail, raw.strip()))
    return spans


class Corpus:
    """Documents pre-split into sentences, in stable document order."""

    def __init__(self, documents: Sequence, terminators: str = SENTENCE_TERMINATORS):
        self.documents = list(documents)  # (doc_id, text) pairs
        self.sentences = []
        for doc_id, text in self.documents:
            self.sentences.extend(split_sentences(doc_id, text, terminators))

    @classmethod
    def from_texts(cls, texts: Iterable, **kw) -> "Corpus":
        return cls([("doc%d" % i, t) for i, t in enumerate(texts)], **kw)

    @classmethod
    def from_files(cls, paths: Iterable, **kw) -> "Corpus":
        docs = []
        for p in paths:
            p = Path(p)
            docs.append((p.name, p.read_text("utf-8")))
        return cls(docs, **kw)

    def __len__(self):
        return len(self.sentences)


DEFAULT_QUERY_LIMITS = MatchLimits(max_tokens_per_capture=3, case_insensitive=True)


@dataclass(frozen=True)
class CompiledQuery:
    template: PatternTemplate
    language: str
    limits: MatchLimits
    text: str  # wildcard form, slots shown as *


def compile_query(
    template: PatternTemplate,
    language: str,
    limits: MatchLimits | None = None,
) -> CompiledQuery:
    """Turn a template rendering into a corpus query.

    The textual form replaces each slot with ``*`` ("This is a <object>."
    -> "This is a *."); a zero-slot template queries its literal text.
    """
    try:
        segs = template.rendering(language)
    except UnknownLanguage:
        raise NoRendering(
            "template %r has no %r rendering" % (template.id, language)
        ) from None
    text = "".join("*" if isinstance(s, Slot) else s.text for s in segs)
    return CompiledQuery(
        template=template,
        language=language,
        limits=limits or DEFAULT_QUERY_LIMITS,
        text=text,
    )


@dataclass(frozen=True)
class CandidateMatch:
    doc_id: str
    start: int              # sentence range within the document
    end: int
    captures: Mapping
    context: str            # the sentence the match lives in


def find_instances(query: CompiledQuery, corpus: Corpus) -> list:
    """All sentence-bounded matches, in document order."""
    out = []
    for span in corpus.sentences:
        for binding in match(query.template, query.language, span.text, query.limits):
            out.append(
                CandidateMatch(
                    doc_id=span.doc_id,
                    start=span.start,
                    end=span.end,
                    captures=dict(binding.assignments),
                    context=span.text,
                )
            )
    return out


class CategorizedLexicon:
    """Known surface forms and their categories.

    File format: ``surface<TAB>category`` (an optional third column names
    the language). Lookup folds case; surfaces may span several tokens.
    """

    def __init__(self, entries: Mapping | None = None, language: str = "en"):
        self.language = language
        self._entries = {}
        for surface, category in (entries or {}).items():
            self.add(surface, category)

    def add(self, surface: str, category: str) -> None:
        if not surface.strip():
            raise MiningError("empty lexicon surface")
        if not is_valid_name(category):
            raise MiningError("bad category name %r" % category)
        self._entries[surface.casefold()] = category

    @classmethod
    def from_file(cls, path) -> "CategorizedLexicon":
        lx = cls()
        for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise MiningError("line %d needs surface<TAB>category" % lineno)
            lx.add(cols[0], cols[1])
            if len(cols) > 2 and cols[2]:
                lx.language = cols[2]
        return lx

    def category(self, surface: str):
        return self._entries.get(surface.casefold())

    def __contains__(self, surface: str) -> bool:
        return surface.casefold() in self._entries

    def __len__(self):
        return len(self._entries)

    @property
    def max_tokens(self) -> int:
        return max((len(s.split()) for s in self._entries), default=1)


def harvest_values(
    matches: Iterable[CandidateMatch],
    lexicon: CategorizedLexicon | None = None,
    min_count: int = 1,
) -> dict:
    """Captured values per variable, ranked by frequency.

    Returns ``{variable: [(value, count), ...]}`` sorted by count then
    value. ``lexicon`` keeps only known surfaces; ``min_count`` drops rare
    ones.
    """
    counters: dict = {}
    for m in matches:
        for var, text in m.captures.items():
            counters.setdefault(var, Counter())[text] += 1
    out = {}
    for var, counter in counters.items():
        pairs = [
            (value, count)
            for value, count in counter.items()
            if count >= min_count and (lexicon is None or value in lexicon)
        ]
        pairs.sort(key=lambda vc: (-vc[1], vc[0]))
        out[var] = pairs
    return out


def _token_spans(sentence: str) -> list:
    spans = []
    i, n = 0, len(sentence)
    while i < n:
        if sentence[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not sentence[j].isspace():
            j += 1
        spans.append((i, j))
        i = j
    return spans


def _strip_punct(sentence: str, start: int, end: int) -> tuple:
    while start < end and unicodedata.category(sentence[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(sentence[end - 1]).startswith("P"):
        end -= 1
    return start, end


@dataclass(frozen=True)
class LexemeSpan:
    start: int
    end: int
    surface: str
    category: str


def find_lexeme_spans(sentence: str, lexicon: CategorizedLexicon) -> list:
    """Non-overlapping lexicon hits, leftmost-first, longest-first.

    Token edges are the anchor points; punctuation hugging a token stays
    outside the hit ("cerveza," finds "cerveza").
    """
    tokens = _token_spans(sentence)
    spans = []
    i = 0
    while i < len(tokens):
        hit = None
        for n in range(min(lexicon.max_tokens, len(tokens) - i), 0, -1):
            s, e = _strip_punct(sentence, tokens[i][0], tokens[i + n - 1][1])
            if s >= e:
                continue
            surface = sentence[s:e]
            category = lexicon.category(surface)
            if category is not None:
                hit = LexemeSpan(s, e, surface, category)
                i += n
                break
        if hit:
            spans.append(hit)
        else:
            i += 1
    return spans


def _slot_names_for(spans: Sequence[LexemeSpan]) -> list:
    used: Counter = Counter()
    names = []
    for sp in spans:
        used[sp.category] += 1
        k = used[sp.category]
        names.append(sp.category if k == 1 else "%s-%d" % (sp.category, k))
    return names


MAX_ABSTRACTION_SPANS = 8


def abstract_patterns(
    sentence: str,
    lexicon: CategorizedLexicon,
    corpus: Corpus | None = None,
    language: str | None = None,
    limits: MatchLimits | None = None,
) -> list:
    """Candidate templates for a fresh sentence, with support counts.

    Every non-empty subset of the lexicon hits becomes a candidate with
    those spans replaced by category slots. With a corpus, candidates are
    ranked by support (distinct capture tuples found); without one, fewer
    slots rank first. Returns ``[(template_text, support), ...]``.
    """
    spans = find_lexeme_spans(sentence, lexicon)
    if not spans:
        raise NoKnownLexemes("no lexicon entry occurs in %r" % sentence)
    spans = spans[:MAX_ABSTRACTION_SPANS]
    names = _slot_names_for(spans)
    language = language or lexicon.language

    def esc(text: str) -> str:
        return unparse((Lit(text),)) if text else ""

    candidates = []
    for mask in range(1, 1 << len(spans)):
        chosen = [
            (sp, nm) for k, (sp, nm) in enumerate(zip(spans, names)) if mask >> k & 1
        ]
        parts = []
        pos = 0
        for sp, nm in chosen:
            parts.append(esc(sentence[pos : sp.start]))
            parts.append("<%s>" % nm)
            pos = sp.end
        parts.append(esc(sentence[pos:]))
        candidates.append("".join(parts))

    ranked = []
    for text in candidates:
        template = PatternTemplate.from_strings("candidate", {language: text})
        support = 0
        if corpus is not None:
            query = compile_query(template, language, limits)
            seen = set()
            for m in find_instances(query, corpus):
                seen.add(tuple(sorted(m.captures.items())))
            support = len(seen)
        ranked.append((text, support, len(template.variables)))

    if corpus is not None:
        ranked.sort(key=lambda tsv: (-tsv[1], tsv[2], tsv[0]))
    else:
        ranked.sort(key=lambda tsv: (tsv[2], tsv[0]))
    return [(text, support) for text, support, _ in ranked]
