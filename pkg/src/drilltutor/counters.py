"""Japanese counting exercises.

Numeral + classifier surface forms are not compositional (1 + hon =
ippon, not *ichihon), so the full table for numerals 1-10 across the
shipped classifier classes lives in ``data/counter_forms.json`` where an
expert can edit it. Exercise generators turn table rows into drill items.
"""

from __future__ import annotations

import json
from importlib.resources import files

from .drill import DrillError, DrillItem
from .patterns import LexicalValue


class UnknownClass(DrillError):
    pass


class OutOfRange(DrillError):
    """Numeral outside the bundled 1-10 table."""


VARY_NUMBER = "vary_number"
VARY_OBJECT = "vary_object"
VARY_BOTH = "vary_both"


def _load_table() -> dict:
    text = files("drilltutor.data").joinpath("counter_forms.json").read_text("utf-8")
    return json.loads(text)["classes"]


_TABLE = _load_table()


def counter_classes() -> list:
    return list(_TABLE)


def counter_numbers(class_name: str) -> list:
    return sorted(int(n) for n in _class(class_name)["forms"])


def class_display(class_name: str, language: str = "en") -> str:
    d = _class(class_name)["display"]
    return d.get(language) or d["en"]


def _class(class_name: str) -> dict:
    try:
        return _TABLE[class_name]
    except KeyError:
        raise UnknownClass(class_name) from None


def _form(number: int, class_name: str) -> dict:
    forms = _class(class_name)["forms"]
    try:
        return forms[str(number)]
    except KeyError:
        raise OutOfRange("%r has no form for %r" % (class_name, number)) from None


def counter_form(number: int, class_name: str) -> str:
    """Romanized surface form, e.g. (3, 'hon') -> 'sanbon'."""
    return _form(number, class_name)["romaji"]


def counter_kana(number: int, class_name: str) -> str:
    return _form(number, class_name)["kana"]


def _item(number: int, class_name: str, language: str) -> DrillItem:
    row = _form(number, class_name)
    display = class_display(class_name, language)
    stimulus = "%d, %s" % (number, display)
    value = LexicalValue(
        "form",
        {"en": stimulus, "ja": row["romaji"], "ja-kana": row["kana"]},
    )
    return DrillItem(
        pattern_id="count-%s" % class_name,
        values={"form": value},
        stimulus=stimulus,
        target_sentence=row["romaji"],
        kana_sentence=row["kana"],
        pattern_text="<form>",
    )


def generate_counting_items(
    mode: str,
    classes=(),
    numbers=(),
    language: str = "en",
) -> list:
    """Drill items for a counting exercise.

    vary_number: one class, many numbers. vary_object: one number, many
    classes. vary_both: the full product, class-major. Empty selections
    default to everything the table ships.
    """
    classes = list(classes)
    numbers = [int(n) for n in numbers]
    if mode == VARY_NUMBER:
        if not classes:
            raise DrillError("vary_number needs a class")
        if len(classes) != 1:
            raise DrillError("vary_number takes exactly one class")
        numbers = numbers or counter_numbers(classes[0])
        return [_item(n, classes[0], language) for n in numbers]
    if mode == VARY_OBJECT:
        if not numbers:
            raise DrillError("vary_object needs a number")
        if len(numbers) != 1:
            raise DrillError("vary_object takes exactly one number")
        classes = classes or counter_classes()
        return [_item(numbers[0], c, language) for c in classes]
    if mode == VARY_BOTH:
        classes = classes or counter_classes()
        out = []
        for c in classes:
            for n in numbers or counter_numbers(c):
                out.append(_item(n, c, language))
        return out
    raise DrillError("mode must be vary_number|vary_object|vary_both")
