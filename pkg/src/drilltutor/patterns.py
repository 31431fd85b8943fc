"""Sentence pattern templates: parsing, instantiation, enumeration, matching.

A template mixes literal text with named slots written ``<name>``. One
template carries a rendering per language; slot order may differ between
renderings (word order differs between languages) but the slot set is the
same everywhere. Literal ``<``, ``>`` and ``\\`` are escaped with a
backslash.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union


class PatternError(ValueError):
    """Base class for template parsing and instantiation failures."""


class UnbalancedSlotDelimiter(PatternError):
    """A '<' without its '>', or a stray '>' outside an escape."""


class EmptySlotName(PatternError):
    """A slot written as '<>'."""


class DuplicateSlotName(PatternError):
    """The same slot name appears twice in one rendering."""


class InvalidEscape(PatternError):
    """A backslash not followed by '<', '>' or '\\'."""


class UnknownLanguage(PatternError):
    """No rendering exists for the requested language code."""


class MissingAssignment(PatternError):
    """A template variable has no value in the supplied assignment."""


class ExtraAssignment(PatternError):
    """The assignment names a variable the template does not have."""


class EmptyValueList(PatternError):
    """Enumeration needs at least one value per variable."""


_IDENT_CHARS = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-"
)
_ESCAPABLE = "<>\\"


def is_valid_name(name: str) -> bool:
    """Slot and variable names: one or more of [A-Za-z0-9_-]."""
    return bool(name) and all(c in _IDENT_CHARS for c in name)


@dataclass(frozen=True)
class Lit:
    """A literal run of text between slots."""

    text: str


@dataclass(frozen=True)
class Slot:
    """A named hole to be filled by a lexical value."""

    name: str


Segment = Union[Lit, Slot]
SegmentList = "tuple[Segment, ...]"


def parse_template(text: str) -> tuple[Segment, ...]:
    """Parse template text into its normal-form segment list.

    Normal form: no two adjacent literal segments, no empty literals, and
    no slot name repeated. ``parse_template`` and :func:`unparse` are
    mutual inverses on valid inputs.
    """
    segments: list[Segment] = []
    literal: list[str] = []
    seen: set[str] = set()
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            if i + 1 >= n or text[i + 1] not in _ESCAPABLE:
                raise InvalidEscape(
                    "backslash at position %d must be followed by one of %r"
                    % (i, _ESCAPABLE)
                )
            literal.append(text[i + 1])
            i += 2
        elif ch == ">":
            raise UnbalancedSlotDelimiter("stray '>' at position %d" % i)
        elif ch == "<":
            j = i + 1
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            if j >= n or text[j] != ">":
                raise UnbalancedSlotDelimiter(
                    "slot opened at position %d is never closed" % i
                )
            name = text[i + 1 : j]
            if not name:
                raise EmptySlotName("empty slot name at position %d" % i)
            if name in seen:
                raise DuplicateSlotName("slot %r appears twice" % name)
            seen.add(name)
            if literal:
                segments.append(Lit("".join(literal)))
                literal = []
            segments.append(Slot(name))
            i = j + 1
        else:
            literal.append(ch)
            i += 1
    if literal:
        segments.append(Lit("".join(literal)))
    return tuple(segments)


def unparse(segments: Iterable[Segment]) -> str:
    """Render a segment list back to template text, escaping as needed."""
    parts = []
    for seg in segments:
        if isinstance(seg, Slot):
            parts.append("<%s>" % seg.name)
        else:
            parts.append(
                seg.text.replace("\\", "\\\\").replace("<", "\\<").replace(">", "\\>")
            )
    return "".join(parts)


def slot_names(segments: Iterable[Segment]) -> tuple[str, ...]:
    return tuple(seg.name for seg in segments if isinstance(seg, Slot))


def _check_normal_form(segments: Sequence[Segment]) -> None:
    prev_lit = False
    seen: set[str] = set()
    for seg in segments:
        if isinstance(seg, Lit):
            if prev_lit:
                raise PatternError("adjacent literal segments")
            if not seg.text:
                raise PatternError("empty literal segment")
            prev_lit = True
        elif isinstance(seg, Slot):
            if not is_valid_name(seg.name):
                raise PatternError("bad slot name %r" % (seg.name,))
            if seg.name in seen:
                raise DuplicateSlotName("slot %r appears twice" % seg.name)
            seen.add(seg.name)
            prev_lit = False
        else:
            raise PatternError("not a segment: %r" % (seg,))


@dataclass(frozen=True)
class PatternTemplate:
    """A pattern with one rendering per language and an ordered variable set.

    ``variables`` fixes the canonical order used by enumeration and by
    drill stimuli; each rendering must use exactly that set of slots, in
    whatever order suits the language.
    """

    id: str
    renderings: Mapping[str, tuple]
    variables: tuple

    def __post_init__(self):
        if not self.renderings:
            raise PatternError("template %r has no renderings" % self.id)
        for name in self.variables:
            if not is_valid_name(name):
                raise PatternError("bad variable name %r" % (name,))
        if len(set(self.variables)) != len(self.variables):
            raise DuplicateSlotName("duplicate variable in %r" % self.id)
        expected = set(self.variables)
        for lang, segs in self.renderings.items():
            _check_normal_form(segs)
            got = set(slot_names(segs))
            if got != expected:
                raise PatternError(
                    "rendering %r of %r uses slots %s, template declares %s"
                    % (lang, self.id, sorted(got), sorted(expected))
                )

    @classmethod
    def from_strings(
        cls,
        id: str,
        renderings: Mapping[str, str],
        variables: Sequence[str] | None = None,
    ) -> "PatternTemplate":
        """Build a template from per-language text.

        When ``variables`` is omitted, the slot order of the first
        rendering becomes the canonical variable order.
        """
        parsed = {lang: parse_template(text) for lang, text in renderings.items()}
        if variables is None:
            first = next(iter(parsed))
            variables = slot_names(parsed[first])
        return cls(id=id, renderings=parsed, variables=tuple(variables))

    def rendering(self, language: str) -> tuple:
        try:
            return self.renderings[language]
        except KeyError:
            raise UnknownLanguage(
            "template %r has no %r rendering" % (self.id, language)
            ) from None

    def rendering_text(self, language: str) -> str:
        return unparse(self.rendering(language))

    def slot_order(self, language: str) -> tuple:
        return slot_names(self.rendering(language))

    @property
    def languages(self) -> tuple:
        return tuple(self.renderings)


@dataclass(frozen=True)
class Variable:
    """Variable metadata: display aliases per language and an optional
    category used by corpus abstraction."""

    name: str
    display_aliases: Mapping[str, str] = field(default_factory=dict)
    category: str = ""

    def __post_init__(self):
        if not is_valid_name(self.name):
            raise PatternError("bad variable name %r" % (self.name,))


@dataclass(frozen=True)
class LexicalValue:
    """One value of one variable, rendered per language.

    E.g. variable ``title``: ``{"en": "Mr", "ja": "san", "ja-kana": "さん"}``.
    """

    variable: str
    renderings: Mapping[str, str]

    def rendering(self, language: str) -> str:
        try:
            return self.renderings[language]
        except KeyError:
            raise UnknownLanguage(
                "value of %r has no %r rendering" % (self.variable, language)
            ) from None

    def has(self, language: str) -> bool:
        return language in self.renderings


# A value tuple assigns one LexicalValue (or a raw string) to each variable.
ValueTuple = Mapping[str, LexicalValue]


def _rendered(value, language: str) -> str:
    if isinstance(value, LexicalValue):
        return value.rendering(language)
    return value


def instantiate(
    template: PatternTemplate, language: str, assignments: Mapping
) -> str:
    """Fill every slot of the requested rendering.

    ``assignments`` maps variable name to a LexicalValue or to a plain
    string (plain strings are used verbatim, e.g. match captures).
    """
    segs = template.rendering(language)
    for name in template.variables:
        if name not in assignments:
            raise MissingAssignment("no value for %r" % name)
    for name in assignments:
        if name not in template.variables:
            raise ExtraAssignment("template %r has no variable %r" % (template.id, name))
    parts = []
    for seg in segs:
        if isinstance(seg, Lit):
            parts.append(seg.text)
        else:
            parts.append(_rendered(assignments[seg.name], language))
    return "".join(parts)


def enumerate_sentences(
    template: PatternTemplate,
    language: str,
    values: Mapping[str, Sequence[LexicalValue]],
) -> list:
    """Cartesian product of the value lists, in template-variable order.

    Returns ``[(value_tuple, sentence), ...]``; the tuple order is the
    product order (first variable slowest), and the value order within a
    variable is the given list order, so output is deterministic.
    """
    for name in template.variables:
        if not values.get(name):
            raise EmptyValueList("no values for %r" % name)
    out = []
    pools = [values[name] for name in template.variables]
    for combo in itertools.product(*pools):
        tup = dict(zip(template.variables, combo))
        out.append((tup, instantiate(template, language, tup)))
    return out


@dataclass(frozen=True)
class MatchLimits:
    """Caps applied to each slot capture during reverse matching."""

    max_tokens_per_capture: int = 3
    case_insensitive: bool = False


@dataclass(frozen=True)
class Binding:
    """One way a sentence fits a template.

    ``assignments`` maps variable to captured text; ``capture_spans`` maps
    variable to its character range; ``source_span`` is the full matched
    range.
    """

    assignments: Mapping[str, str]
    source_span: tuple
    capture_spans: Mapping[str, tuple]


def match(
    template: PatternTemplate,
    language: str,
    sentence: str,
    limits: MatchLimits | None = None,
) -> list:
    """All bindings whose instantiation reproduces ``sentence``.

    Captures are whitespace-token aligned: a capture is a run of 1 to
    ``max_tokens_per_capture`` tokens, never starting or ending in
    whitespace. Bindings come back leftmost-shortest first. An empty list
    means no match; a zero-slot template matches exactly its own text.
    """
    if limits is None:
        limits = MatchLimits()
    segs = template.rendering(language)
    n = len(sentence)
    if limits.case_insensitive:
        fold = str.casefold
    else:
        fold = lambda s: s  # noqa: E731

    results: list[list] = []

    def walk(si: int, pos: int, caps: list) -> None:
        if si == len(segs):
            if pos == n:
                results.append(list(caps))
            return
        seg = segs[si]
        if isinstance(seg, Lit):
            end = pos + len(seg.text)
            if fold(sentence[pos:end]) == fold(seg.text):
                walk(si + 1, end, caps)
            return
        if pos >= n or sentence[pos].isspace():
            return
        for end in range(pos + 1, n + 1):
            cap = sentence[pos:end]
            if cap[-1].isspace():
                continue
            # token count only grows while extending right, so overflow ends the scan
            if len(cap.split()) > limits.max_tokens_per_capture:
                break
            caps.append((seg.name, pos, end))
            walk(si + 1, end, caps)
            caps.pop()

    walk(0, 0, [])
    results.sort(key=lambda caps: [(s, e) for _, s, e in caps])
    bindings = []
    for caps in results:
        bindings.append(
            Binding(
                assignments={name: sentence[s:e] for name, s, e in caps},
                source_span=(0, n),
                capture_spans={name: (s, e) for name, s, e in caps},
            )
        )
    return bindings
