"""Drill sessions: stimulus sequencing, self-report scoring, statistics.

The session is a small state machine over a queue of drill items:

    Model -> (AwaitReport -> Feedback)* -> Done

One item = one pattern filled with one value tuple. The student sees the
stimulus (the tuple in the interface language), produces the target
sentence, reveals the answer and reports correct/incorrect themselves.
A report of correct extends the item's streak; after ``removal_streak``
consecutive corrects the item leaves the queue for good. An error resets
the streak and requeues the item no more than ``reinsert_window`` stimuli
away. Every transition appends to an event log; statistics are a pure
fold over that log.
"""

from __future__ import annotations

import json
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .patterns import LexicalValue, PatternTemplate, UnknownLanguage, instantiate, unparse


class DrillError(ValueError):
    pass


class EmptyItemList(DrillError):
    """A session needs at least one item."""


class SessionDone(DrillError):
    """No stimuli left to present."""


class WrongPhase(DrillError):
    """The requested operation does not fit the current phase."""


MODEL = "model"
AWAIT_REPORT = "await_report"
FEEDBACK = "feedback"
DONE = "done"


@dataclass(frozen=True)
class DrillItem:
    """One pattern x one value tuple, pre-rendered for drilling."""

    pattern_id: str
    values: Mapping[str, LexicalValue]
    stimulus: str
    target_sentence: str
    kana_sentence: str = ""
    pattern_text: str = ""

    @property
    def key(self) -> str:
        return "%s|%s|%s" % (self.pattern_id, self.stimulus, self.target_sentence)


def build_drill_items(
    template: PatternTemplate,
    tuples: Iterable[Mapping],
    interface_language: str = "en",
    target_language: str = "ja",
    kana_language: str = "ja-kana",
) -> list:
    """Render value tuples into drill items.

    The stimulus lists the interface-language renderings in template
    variable order, comma separated ("Prof, Tsuji, Japan"). The kana
    sentence is filled in only when both the template and every value
    carry a kana rendering.
    """
    items = []
    pattern_text = template.rendering_text(target_language)
    for tup in tuples:
        stimulus = ", ".join(
            tup[name].rendering(interface_language) for name in template.variables
        )
        if not template.variables:
            # A fixed sentence has no value cues; prompt with its
            # interface-language rendering instead of a blank line.
            try:
                stimulus = instantiate(template, interface_language, tup)
            except UnknownLanguage:
                stimulus = template.rendering_text(target_language)
        target = instantiate(template, target_language, tup)
        try:
            kana = instantiate(template, kana_language, tup)
        except UnknownLanguage:
            kana = ""
        items.append(
            DrillItem(
                pattern_id=template.id,
                values=dict(tup),
                stimulus=stimulus,
                target_sentence=target,
                kana_sentence=kana,
                pattern_text=pattern_text,
            )
        )
    return items


@dataclass(frozen=True)
class SessionConfig:
    removal_streak: int = 2        # consecutive corrects before an item retires
    reinsert_window: int = 3       # max stimuli before an erred item returns
    order: str = "shuffled"        # or "fixed"
    seed: int = 0
    max_rounds: int | None = None  # cap on presented stimuli

    def __post_init__(self):
        if self.removal_streak < 1:
            raise DrillError("removal_streak must be >= 1")
        if self.reinsert_window < 1:
            raise DrillError("reinsert_window must be >= 1")
        if self.order not in ("shuffled", "fixed"):
            raise DrillError("order must be 'shuffled' or 'fixed'")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise DrillError("max_rounds must be >= 1")


@dataclass(frozen=True)
class Model:
    item_key: str
    pattern_text: str
    stimulus: str
    sentence: str
    kana_sentence: str


@dataclass(frozen=True)
class Stimulus:
    item_key: str
    text: str
    position: int      # 1-based presentation number
    remaining: int     # items still in play, the current one included


@dataclass(frozen=True)
class Feedback:
    item_key: str
    sentence: str
    kana_sentence: str
    verification: str  # "correct" | "incorrect"
    removed: bool
    streak: int
    done: bool


@dataclass
class Event:
    """One log line: timestamp, session, kind, item, payload."""

    timestamp: float
    session_id: str
    kind: str
    item_key: str
    payload: dict = field(default_factory=dict)

    def to_line(self) -> str:
        return json.dumps(
            {
                "ts": self.timestamp,
                "session": self.session_id,
                "kind": self.kind,
                "item": self.item_key,
                "payload": self.payload,
            },
            ensure_ascii=False,
            sort_keys=True,
        )

    @classmethod
    def from_line(cls, line: str) -> "Event":
        d = json.loads(line)
        return cls(d["ts"], d["session"], d["kind"], d["item"], d.get("payload", {}))


def events_to_jsonl(events: Iterable[Event]) -> str:
    return "".join(e.to_line() + "\n" for e in events)


def events_from_jsonl(text: str) -> list:
    return [Event.from_line(line) for line in text.splitlines() if line.strip()]


@dataclass
class ItemStats:
    presentations: int = 0
    corrects: int = 0
    errors: int = 0


@dataclass
class PatternReport:
    pattern_id: str
    presentations: int
    errors: int
    error_rate: float


@dataclass
class SessionReport:
    patterns: list
    items: list                # (item_key, ItemStats), presentation order of keys
    total_presentations: int
    total_errors: int
    started_at: float
    ended_at: float | None


def stats_from_events(events: Iterable[Event]) -> dict:
    """Rebuild per-item counters from the log alone."""
    stats: dict = {}
    for e in events:
        if e.kind == "stimulus_presented":
            stats.setdefault(e.item_key, ItemStats()).presentations += 1
        elif e.kind == "reported":
            st = stats.setdefault(e.item_key, ItemStats())
            if e.payload.get("result") == "correct":
                st.corrects += 1
            else:
                st.errors += 1
    return stats


class DrillSession:
    def __init__(
        self,
        items: Sequence[DrillItem],
        config: SessionConfig | None = None,
        session_id: str = "",
        clock: Callable[[], float] = time.time,
    ):
        items = list(items)
        if not items:
            raise EmptyItemList("a drill needs at least one item")
        keys = [it.key for it in items]
        if len(set(keys)) != len(keys):
            raise DrillError("duplicate drill items")
        self.config = config or SessionConfig()
        self.session_id = session_id or "s%d" % random.randrange(10**9)
        self._clock = clock
        self.items = {it.key: it for it in items}

        order = list(keys)
        if self.config.order == "shuffled":
            random.Random(self.config.seed).shuffle(order)
        self._queue = deque(order)
        self._streaks = {k: 0 for k in keys}
        self.stats = {k: ItemStats() for k in keys}
        self.events: list = []
        self.started_at = self._clock()
        self.ended_at: float | None = None
        self.presented = 0
        self.current: str | None = None
        self._revealed = False

        self._log(
            "session_started",
            "",
            {
                "order": order,
                "removal_streak": self.config.removal_streak,
                "reinsert_window": self.config.reinsert_window,
                "seed": self.config.seed,
            },
        )
        model_key = self._queue[0]
        self.phase = MODEL
        m = self.items[model_key]
        self.model = Model(
            item_key=model_key,
            pattern_text=m.pattern_text,
            stimulus=m.stimulus,
            sentence=m.target_sentence,
            kana_sentence=m.kana_sentence,
        )
        self._log("model_shown", model_key, {"sentence": m.target_sentence})
        # the model item goes to the back: the first stimulus is a fresh item
        if len(self._queue) > 1:
            self._queue.rotate(-1)

    # --------------------------------------------------------------- log

    def _log(self, kind: str, item_key: str, payload: dict | None = None) -> None:
        self.events.append(
            Event(self._clock(), self.session_id, kind, item_key, payload or {})
        )

    # ------------------------------------------------------------- phases

    @property
    def is_done(self) -> bool:
        return self.phase == DONE

    @property
    def remaining(self) -> int:
        """Items still in play, a pending stimulus included."""
        return len(self._queue) + (1 if self.current is not None else 0)

    def _finish(self) -> None:
        self.phase = DONE
        self.ended_at = self._clock()
        self._log("session_done", "", {"presented": self.presented})

    def next_stimulus(self) -> Stimulus:
        if self.phase == DONE:
            raise SessionDone(self.session_id)
        if self.phase == AWAIT_REPORT:
            raise WrongPhase("a report is pending")
        if (
            self.config.max_rounds is not None
            and self.presented >= self.config.max_rounds
        ):
            self._finish()
            raise SessionDone("round cap reached")
        self.current = self._queue.popleft()
        self.presented += 1
        self.stats[self.current].presentations += 1
        self.phase = AWAIT_REPORT
        self._revealed = False
        item = self.items[self.current]
        self._log(
            "stimulus_presented",
            self.current,
            {"stimulus": item.stimulus, "position": self.presented},
        )
        return Stimulus(
            item_key=self.current,
            text=item.stimulus,
            position=self.presented,
            remaining=len(self._queue) + 1,
        )

    def peek_answer(self) -> tuple:
        """The target sentence for the pending stimulus, without reporting.

        Lets a client show the answer before asking for the self-report.
        Reading it does not advance the session.
        """
        if self.phase != AWAIT_REPORT:
            raise WrongPhase("no stimulus is pending")
        item = self.items[self.current]
        if not self._revealed:
            self._revealed = True
            self._log("answer_revealed", self.current, {})
        return item.target_sentence, item.kana_sentence

    def reveal_and_report(self, self_report) -> Feedback:
        """Close the pending stimulus with the student's own verdict."""
        if self.phase != AWAIT_REPORT:
            raise WrongPhase("no stimulus is pending")
        if isinstance(self_report, str):
            if self_report not in ("correct", "incorrect"):
                raise DrillError("self_report must be correct|incorrect")
            correct = self_report == "correct"
        else:
            correct = bool(self_report)

        key = self.current
        item = self.items[key]
        st = self.stats[key]
        removed = False
        if correct:
            st.corrects += 1
            self._streaks[key] += 1
            if self._streaks[key] >= self.config.removal_streak:
                removed = True
                self._log("item_removed", key, {"streak": self._streaks[key]})
            else:
                self._queue.append(key)
                self._log("item_requeued", key, {"at": len(self._queue) - 1})
        else:
            st.errors += 1
            self._streaks[key] = 0
            at = min(self.config.reinsert_window, len(self._queue))
            self._queue.insert(at, key)
            self._log("item_requeued", key, {"at": at})
        self._log(
            "reported",
            key,
            {"result": "correct" if correct else "incorrect", "removed": removed},
        )
        self.current = None
        done = not self._queue
        if done:
            self._finish()
        else:
            self.phase = FEEDBACK
        return Feedback(
            item_key=key,
            sentence=item.target_sentence,
            kana_sentence=item.kana_sentence,
            verification="correct" if correct else "incorrect",
            removed=removed,
            streak=self._streaks[key],
            done=done,
        )

    # ---------------------------------------------------------- reporting

    def session_report(self) -> SessionReport:
        """Per-pattern error rates, worst first."""
        by_pattern: dict = {}
        for key, st in self.stats.items():
            pid = self.items[key].pattern_id
            agg = by_pattern.setdefault(pid, [0, 0])
            agg[0] += st.presentations
            agg[1] += st.errors
        patterns = [
            PatternReport(
                pattern_id=pid,
                presentations=pres,
                errors=errs,
                error_rate=(errs / pres) if pres else 0.0,
            )
            for pid, (pres, errs) in by_pattern.items()
        ]
        patterns.sort(key=lambda r: (-r.error_rate, r.pattern_id))
        return SessionReport(
            patterns=patterns,
            items=[(k, self.stats[k]) for k in self.items],
            total_presentations=sum(s.presentations for s in self.stats.values()),
            total_errors=sum(s.errors for s in self.stats.values()),
            started_at=self.started_at,
            ended_at=self.ended_at,
        )
