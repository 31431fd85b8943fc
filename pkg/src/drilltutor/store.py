"""Persistence: goals, patterns, values, experts, language packs.

Everything lives in one sqlite file (or in memory) as JSON rows; the
working representation is loaded up front and written through inside
transactions. On top of that sit the exchange formats: canonical JSON
bundles for import/export, a flat table view for inspection, whole-file
snapshots for backup/restore, and installable language packs (ui strings
plus a transliteration table).
"""

from __future__ import annotations

import hashlib
import hmac
import json
import secrets
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib.resources import files
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import translit
from .drill import build_drill_items
from .goals import (
    ROOT_ID,
    GoalError,
    GoalTree,
    UnknownChild,
    UnknownGoal,
    UnknownParent,
)
from .patterns import (
    EmptyValueList,
    LexicalValue,
    PatternError,
    PatternTemplate,
    UnknownLanguage,
    Variable,
    enumerate_sentences,
)


class StoreError(ValueError):
    pass


class MalformedBundle(StoreError):
    """The bundle is not parseable as the published format."""


class ConstraintViolation(StoreError):
    """A record contradicts referential or value invariants."""


class VersionMismatch(StoreError):
    """A snapshot from a different schema version."""


class IncompletePack(StoreError):
    """A language pack missing ui strings or transliteration symbols."""


class UnknownPattern(StoreError):
    pass


class NotOwner(StoreError):
    """The acting expert neither owns the record nor has the admin role."""


SCHEMA_VERSION = 1
BUNDLE_FORMAT = "drill-bundle"
BUNDLE_VERSION = 1
PBKDF2_ITERATIONS = 60_000


# ---------------------------------------------------------------- packs


@dataclass
class LanguagePack:
    """Interface-language resources: ui strings and a kana table."""

    code: str
    ui_strings: dict
    transliteration: dict

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "ui_strings": dict(self.ui_strings),
            "transliteration": dict(self.transliteration),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "LanguagePack":
        return cls(d["code"], dict(d["ui_strings"]), dict(d["transliteration"]))


def default_english_pack() -> LanguagePack:
    ui = json.loads(
        files("drilltutor.data").joinpath("ui_strings_en.json").read_text("utf-8")
    )
    return LanguagePack("en", ui, translit.default_table())


# ---------------------------------------------------------- credentials


def hash_password(password: str, salt: bytes, iterations: int = PBKDF2_ITERATIONS) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)


# -------------------------------------------------------------- reports


@dataclass
class RecordError:
    index: int
    goal: str
    error: str
    message: str


@dataclass
class ImportReport:
    goals_created: list = field(default_factory=list)
    patterns_created: list = field(default_factory=list)
    values_created: int = 0
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass
class TableView:
    header: tuple
    rows: list


@dataclass
class Snapshot:
    path: Path
    timestamp: str
    version: int


class Store:
    def __init__(
        self,
        path: str = ":memory:",
        backups_dir=None,
        interface_language: str = "en",
        target_language: str = "ja",
        kana_language: str = "ja-kana",
    ):
        self.path = str(path)
        self.interface_language = interface_language
        self.target_language = target_language
        self.kana_language = kana_language
        if backups_dir is not None:
            self.backups_dir = Path(backups_dir)
        elif self.path != ":memory:":
            p = Path(self.path)
            self.backups_dir = p.parent / (p.stem + "-backups")
        else:
            self.backups_dir = None
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._init_schema()
        self._load()

    # ------------------------------------------------------------ sqlite

    def _init_schema(self) -> None:
        with self._conn:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)"
            )
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS records ("
                " kind TEXT NOT NULL, id TEXT NOT NULL, body TEXT NOT NULL,"
                " PRIMARY KEY (kind, id))"
            )
            cur = self._conn.execute("SELECT value FROM meta WHERE key='schema_version'")
            row = cur.fetchone()
            if row is None:
                self._conn.execute(
                    "INSERT INTO meta VALUES ('schema_version', ?)",
                    (str(SCHEMA_VERSION),),
                )
                self._conn.execute(
                    "INSERT INTO meta VALUES ('cookie_secret', ?)",
                    (secrets.token_hex(32),),
                )
            elif int(row[0]) != SCHEMA_VERSION:
                raise VersionMismatch(
                    "store is schema %s, this build needs %d" % (row[0], SCHEMA_VERSION)
                )

    def _rows(self, kind: str) -> list:
        cur = self._conn.execute(
            "SELECT id, body FROM records WHERE kind=? ORDER BY rowid", (kind,)
        )
        return [(rid, json.loads(body)) for rid, body in cur.fetchall()]

    def _put(self, kind: str, rid: str, body: dict) -> None:
        self._conn.execute(
            "INSERT OR REPLACE INTO records (kind, id, body) VALUES (?,?,?)",
            (kind, rid, json.dumps(body, ensure_ascii=False, sort_keys=True)),
        )

    def _drop(self, kind: str, rid: str) -> None:
        self._conn.execute("DELETE FROM records WHERE kind=? AND id=?", (kind, rid))

    def _load(self) -> None:
        goal_rows = self._rows("goal")
        if goal_rows:
            self.tree = GoalTree.from_records(
                [body for _, body in goal_rows], self.interface_language
            )
        else:
            self.tree = GoalTree(default_language=self.interface_language)
            with self._conn:
                self._save_goal(ROOT_ID)

        self.patterns: dict = {}
        self.pattern_goal: dict = {}
        self.pattern_vars: dict = {}
        self.pattern_owner: dict = {}
        self.values: dict = {}
        for pid, body in self._rows("pattern"):
            self.patterns[pid] = PatternTemplate.from_strings(
                pid, body["renderings"], body["variables_order"]
            )
            self.pattern_goal[pid] = body["goal"]
            self.pattern_owner[pid] = body.get("owner")
            self.pattern_vars[pid] = {
                v["name"]: Variable(v["name"], v.get("aliases", {}), v.get("category", ""))
                for v in body["variables"]
            }
            self.values[pid] = {
                var: [LexicalValue(var, r) for r in rends]
                for var, rends in body["values"].items()
            }

        self.packs: dict = {}
        for code, body in self._rows("pack"):
            self.packs[code] = LanguagePack.from_dict(body)
        if "en" not in self.packs:
            pack = default_english_pack()
            self.packs["en"] = pack
            with self._conn:
                self._put("pack", "en", pack.to_dict())

        self.experts: dict = {rid: body for rid, body in self._rows("expert")}

    def close(self) -> None:
        self._conn.close()

    # ------------------------------------------------------- persistence

    def _save_goal(self, gid: str) -> None:
        g = self.tree.goal(gid)
        self._put(
            "goal",
            gid,
            {
                "id": g.id,
                "parent": g.parent,
                "names": dict(g.names),
                "pattern_ids": list(g.pattern_ids),
                "owner": g.owner,
                "children": [k.id for k in self.tree.children(gid)],
            },
        )

    def _save_pattern(self, pid: str) -> None:
        t = self.patterns[pid]
        self._put(
            "pattern",
            pid,
            {
                "goal": self.pattern_goal[pid],
                "owner": self.pattern_owner.get(pid),
                "renderings": {
                    lang: t.rendering_text(lang) for lang in t.renderings
                },
                "variables_order": list(t.variables),
                "variables": [
                    {
                        "name": v.name,
                        "aliases": dict(v.display_aliases),
                        "category": v.category,
                    }
                    for v in (self.pattern_vars[pid][n] for n in t.variables)
                ],
                "values": {
                    var: [dict(v.renderings) for v in vals]
                    for var, vals in self.values[pid].items()
                },
            },
        )

    # --------------------------------------------------------- ownership

    def _require_owner(self, owner, actor) -> None:
        if actor is None or owner is None or owner == actor:
            return
        if self.experts.get(actor, {}).get("role") == "admin":
            return
        raise NotOwner("%r belongs to %r" % (actor, owner))

    # ------------------------------------------------------------ experts

    def add_expert(self, username: str, password: str, role: str = "expert") -> None:
        if not username or not password:
            raise ConstraintViolation("username and password are required")
        if role not in ("expert", "admin"):
            raise ConstraintViolation("role must be expert or admin")
        if username in self.experts:
            raise ConstraintViolation("expert %r already enrolled" % username)
        salt = secrets.token_bytes(16)
        digest = hash_password(password, salt)
        rec = {
            "salt": salt.hex(),
            "digest": digest.hex(),
            "iterations": PBKDF2_ITERATIONS,
            "role": role,
        }
        with self._lock, self._conn:
            self.experts[username] = rec
            self._put("expert", username, rec)

    def authenticate(self, username: str, password: str) -> bool:
        rec = self.experts.get(username)
        if rec is None:
            return False
        digest = hash_password(
            password, bytes.fromhex(rec["salt"]), rec["iterations"]
        )
        return hmac.compare_digest(digest.hex(), rec["digest"])

    def expert_role(self, username: str):
        rec = self.experts.get(username)
        return rec["role"] if rec else None

    # -------------------------------------------------------------- goals

    def add_goal(self, names, parent_id: str = ROOT_ID, goal_id=None, actor=None):
        with self._lock:
            goal = self.tree.add_goal(names, parent_id, goal_id, owner=actor)
            with self._conn:
                self._save_goal(goal.id)
                self._save_goal(parent_id)
            return goal

    def rename_goal(self, goal_id: str, names, actor=None):
        with self._lock:
            self._require_owner(self.tree.goal(goal_id).owner, actor)
            goal = self.tree.rename_goal(goal_id, names)
            with self._conn:
                self._save_goal(goal_id)
            return goal

    def move_goal(self, goal_id: str, new_parent_id: str, actor=None):
        with self._lock:
            old_parent = self.tree.goal(goal_id).parent
            self._require_owner(self.tree.goal(goal_id).owner, actor)
            goal = self.tree.move_goal(goal_id, new_parent_id)
            with self._conn:
                self._save_goal(goal_id)
                self._save_goal(old_parent)
                self._save_goal(new_parent_id)
            return goal

    def delete_goal(self, goal_id: str, cascade: bool = False, actor=None) -> list:
        with self._lock:
            self._require_owner(self.tree.goal(goal_id).owner, actor)
            parent_id = self.tree.goal(goal_id).parent
            doomed_patterns = []
            if cascade:
                stack = [goal_id]
                seen = []
                while stack:
                    gid = stack.pop()
                    seen.append(gid)
                    doomed_patterns.extend(self.tree.goal(gid).pattern_ids)
                    stack.extend(k.id for k in self.tree.children(gid))
            else:
                doomed_patterns = list(self.tree.goal(goal_id).pattern_ids)
            removed = self.tree.delete_goal(goal_id, cascade)
            with self._conn:
                self._save_goal(parent_id)
                for gid in removed:
                    self._drop("goal", gid)
                for pid in doomed_patterns:
                    self.patterns.pop(pid, None)
                    self.pattern_goal.pop(pid, None)
                    self.pattern_vars.pop(pid, None)
                    self.pattern_owner.pop(pid, None)
                    self.values.pop(pid, None)
                    self._drop("pattern", pid)
            return removed

    def navigate(self, path, language=None):
        return self.tree.navigate(path, language)

    def tree_view(self, language=None):
        return self.tree.tree_view(language)

    # ----------------------------------------------------------- patterns

    def _new_pattern_id(self) -> str:
        n = len(self.patterns) + 1
        while "p%d" % n in self.patterns:
            n += 1
        return "p%d" % n

    def pattern(self, pattern_id: str) -> PatternTemplate:
        try:
            return self.patterns[pattern_id]
        except KeyError:
            raise UnknownPattern(pattern_id) from None

    def add_pattern(
        self,
        goal_id: str,
        renderings: Mapping,
        pattern_id=None,
        variables: Sequence[Variable] | None = None,
        actor=None,
    ) -> PatternTemplate:
        """Create a pattern under a goal from per-language template text."""
        with self._lock:
            self.tree.goal(goal_id)  # referential integrity
            pid = pattern_id or self._new_pattern_id()
            if pid in self.patterns:
                raise ConstraintViolation("pattern id %r already used" % pid)
            if variables:
                order = [v.name for v in variables]
                template = PatternTemplate.from_strings(pid, renderings, order)
                var_meta = {v.name: v for v in variables}
            else:
                template = PatternTemplate.from_strings(pid, renderings)
                var_meta = {n: Variable(n) for n in template.variables}
            self.patterns[pid] = template
            self.pattern_goal[pid] = goal_id
            self.pattern_vars[pid] = var_meta
            self.pattern_owner[pid] = actor
            self.values[pid] = {n: [] for n in template.variables}
            self.tree.attach_pattern(goal_id, pid)
            with self._conn:
                self._save_pattern(pid)
                self._save_goal(goal_id)
            return template

    def delete_pattern(self, pattern_id: str, actor=None) -> None:
        with self._lock:
            self.pattern(pattern_id)
            self._require_owner(self.pattern_owner.get(pattern_id), actor)
            gid = self.pattern_goal[pattern_id]
            self.tree.detach_pattern(gid, pattern_id)
            for d in (
                self.patterns,
                self.pattern_goal,
                self.pattern_vars,
                self.pattern_owner,
                self.values,
            ):
                d.pop(pattern_id, None)
            with self._conn:
                self._drop("pattern", pattern_id)
                self._save_goal(gid)

    def _validated_value(self, variable: str, renderings: Mapping) -> LexicalValue:
        target = renderings.get(self.target_language, "")
        if not target:
            raise ConstraintViolation(
                "value for %r needs a non-empty %r rendering"
                % (variable, self.target_language)
            )
        kana = renderings.get(self.kana_language)
        if kana:
            table = self.packs[self.interface_language].transliteration
            try:
                roman = translit.transliterate(kana, table)
            except translit.UnknownSymbol as e:
                raise ConstraintViolation("kana for %r: %s" % (variable, e)) from None
            if roman.replace(" ", "").casefold() != target.replace(" ", "").casefold():
                raise ConstraintViolation(
                    "kana %r reads %r, not %r" % (kana, roman, target)
                )
        return LexicalValue(variable, dict(renderings))

    def set_values(
        self, pattern_id: str, variable: str, renderings_list: Iterable[Mapping], actor=None
    ) -> list:
        """Replace the value list of one variable."""
        with self._lock:
            template = self.pattern(pattern_id)
            self._require_owner(self.pattern_owner.get(pattern_id), actor)
            if variable not in template.variables:
                raise ConstraintViolation(
                    "pattern %r has no variable %r" % (pattern_id, variable)
                )
            vals = [self._validated_value(variable, r) for r in renderings_list]
            self.values[pattern_id][variable] = vals
            with self._conn:
                self._save_pattern(pattern_id)
            return vals

    def values_for(self, pattern_id: str) -> dict:
        self.pattern(pattern_id)
        return {var: list(vals) for var, vals in self.values[pattern_id].items()}

    def enumerate_pattern(self, pattern_id: str, language=None) -> list:
        """Full Cartesian preview of a pattern in one language."""
        template = self.pattern(pattern_id)
        return enumerate_sentences(
            template, language or self.target_language, self.values[pattern_id]
        )

    # -------------------------------------------------------- drill bridge

    def drill_items(
        self, pattern_ids: Sequence[str], value_picks: Mapping | None = None
    ) -> list:
        """Render stored patterns and values into drill items.

        ``value_picks`` narrows the combination space:
        ``{pattern_id: {variable: [value indices]}}``; anything absent
        means "use all".
        """
        items: list = []
        for pid in pattern_ids:
            template = self.pattern(pid)
            pools = []
            picks = (value_picks or {}).get(pid, {})
            for var in template.variables:
                vals = self.values[pid][var]
                if var in picks:
                    chosen = []
                    for ix in picks[var]:
                        if not 0 <= ix < len(vals):
                            raise ConstraintViolation(
                                "value index %r out of range for %s.%s" % (ix, pid, var)
                            )
                        chosen.append(vals[ix])
                    vals = chosen
                if not vals:
                    raise EmptyValueList("%s.%s has no values" % (pid, var))
                pools.append(vals)
            tuples = [dict(zip(template.variables, combo)) for combo in product(*pools)]
            items.extend(
                build_drill_items(
                    template,
                    tuples,
                    interface_language=self.interface_language,
                    target_language=self.target_language,
                    kana_language=self.kana_language,
                )
            )
        return items

    # -------------------------------------------------------------- bundles

    def export_bundle(self) -> str:
        """Canonical bundle text: stable ordering, sorted keys, UTF-8."""
        goals = []
        for g in self.tree.goals():
            if g.parent is None:
                continue
            patterns = []
            for pid in g.pattern_ids:
                t = self.patterns[pid]
                variables = []
                for name in t.variables:
                    v = self.pattern_vars[pid][name]
                    entry = {"name": name}
                    if v.category:
                        entry["category"] = v.category
                    if v.display_aliases:
                        entry["aliases"] = dict(v.display_aliases)
                    entry["values"] = [
                        dict(val.renderings) for val in self.values[pid][name]
                    ]
                    variables.append(entry)
                patterns.append(
                    {
                        "id": pid,
                        "renderings": {
                            lang: t.rendering_text(lang) for lang in sorted(t.renderings)
                        },
                        "variables": variables,
                    }
                )
            goals.append(
                {
                    "names": dict(g.names),
                    "parent": self.tree.path_labels(g.parent),
                    "patterns": patterns,
                }
            )
        bundle = {"format": BUNDLE_FORMAT, "version": BUNDLE_VERSION, "goals": goals}
        return json.dumps(bundle, ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def import_bundle(self, source, actor=None) -> ImportReport:
        """Load a bundle; each goal record lands or is rejected whole."""
        if isinstance(source, (str, bytes)):
            try:
                bundle = json.loads(source)
            except json.JSONDecodeError as e:
                raise MalformedBundle("not JSON: %s" % e) from None
        elif isinstance(source, Mapping):
            bundle = source
        else:
            raise MalformedBundle("bundle must be JSON text or a mapping")
        if not isinstance(bundle, Mapping) or bundle.get("format") != BUNDLE_FORMAT:
            raise MalformedBundle("missing format marker %r" % BUNDLE_FORMAT)
        if bundle.get("version") != BUNDLE_VERSION:
            raise MalformedBundle("unsupported bundle version %r" % bundle.get("version"))
        records = bundle.get("goals")
        if not isinstance(records, list):
            raise MalformedBundle("goals must be a list")

        report = ImportReport()
        for index, rec in enumerate(records):
            name = ""
            try:
                if not isinstance(rec, Mapping):
                    raise ConstraintViolation("goal record must be an object")
                names = rec.get("names")
                if not isinstance(names, Mapping) or not names:
                    raise ConstraintViolation("goal needs display names")
                name = names.get(self.interface_language, "")
                self._import_goal(rec, actor, report)
            except (StoreError, GoalError, PatternError) as e:
                report.errors.append(
                    RecordError(index, name, type(e).__name__, str(e))
                )
        return report

    def _import_goal(self, rec: Mapping, actor, report: ImportReport) -> None:
        names = dict(rec["names"])
        parent_path = rec.get("parent", [])
        if not isinstance(parent_path, list):
            raise ConstraintViolation("parent must be a list of labels")
        try:
            parent = self.tree.find_by_path(parent_path)
        except (UnknownChild, UnknownGoal):
            raise UnknownParent("no goal at path %r" % (parent_path,)) from None

        # validate everything before touching the store
        staged = []
        seen_pids = set()
        for p in rec.get("patterns", []):
            pid = p.get("id") or self._new_pattern_id()
            if pid in self.patterns or pid in seen_pids:
                raise ConstraintViolation("pattern id %r already used" % pid)
            seen_pids.add(pid)
            renderings = p.get("renderings")
            if not isinstance(renderings, Mapping) or not renderings:
                raise ConstraintViolation("pattern %r has no renderings" % pid)
            var_entries = p.get("variables", [])
            order = [v["name"] for v in var_entries]
            template = PatternTemplate.from_strings(
                pid, renderings, order or None
            )
            var_meta = {}
            vals = {}
            for v in var_entries:
                meta = Variable(v["name"], v.get("aliases", {}), v.get("category", ""))
                var_meta[meta.name] = meta
                vals[meta.name] = [
                    self._validated_value(meta.name, r) for r in v.get("values", [])
                ]
            for n in template.variables:
                var_meta.setdefault(n, Variable(n))
                vals.setdefault(n, [])
            staged.append((pid, template, var_meta, vals))

        with self._lock:
            goal = self.tree.add_goal(names, parent.id, rec.get("id"), owner=actor)
            try:
                for pid, template, var_meta, vals in staged:
                    self.patterns[pid] = template
                    self.pattern_goal[pid] = goal.id
                    self.pattern_vars[pid] = var_meta
                    self.pattern_owner[pid] = actor
                    self.values[pid] = vals
                    self.tree.attach_pattern(goal.id, pid)
                with self._conn:
                    self._save_goal(goal.id)
                    self._save_goal(parent.id)
                    for pid, *_ in staged:
                        self._save_pattern(pid)
            except Exception:
                # put the tree back the way it was
                for pid, *_ in staged:
                    for d in (
                        self.patterns,
                        self.pattern_goal,
                        self.pattern_vars,
                        self.pattern_owner,
                        self.values,
                    ):
                        d.pop(pid, None)
                self.tree.delete_goal(goal.id, cascade=True)
                raise
        report.goals_created.append(goal.id)
        report.patterns_created.extend(pid for pid, *_ in staged)
        report.values_created += sum(
            len(v) for _, _, _, vals in staged for v in vals.values()
        )

    # ---------------------------------------------------------------- table

    TABLE_HEADER = ("goal", "pattern", "variable", "values")

    def export_table(self) -> TableView:
        """One row per pattern variable, goal order then variable order."""
        rows = []
        for g in self.tree.goals():
            for pid in g.pattern_ids:
                t = self.patterns[pid]
                goal_label = " / ".join(self.tree.path_labels(g.id)) or g.label()
                for var in t.variables:
                    cell = []
                    for val in self.values[pid][var]:
                        iface = val.renderings.get(self.interface_language)
                        target = val.renderings.get(self.target_language, "")
                        cell.append("%s/%s" % (iface, target) if iface else target)
                    rows.append([goal_label, pid, var, cell])
        return TableView(self.TABLE_HEADER, rows)

    # -------------------------------------------------------------- backups

    def backup(self, directory=None, now=None) -> Snapshot:
        directory = Path(directory) if directory else self.backups_dir
        if directory is None:
            raise StoreError("an in-memory store needs an explicit backup directory")
        directory.mkdir(parents=True, exist_ok=True)
        stamp = (now or datetime.now(timezone.utc).replace(tzinfo=None)).isoformat()
        dest = directory / ("backup-%s.snap" % stamp)
        n = 0
        while dest.exists():
            n += 1
            dest = directory / ("backup-%s-%d.snap" % (stamp, n))
        with self._lock:
            out = sqlite3.connect(dest)
            try:
                self._conn.backup(out)
            finally:
                out.close()
        return Snapshot(dest, stamp, SCHEMA_VERSION)

    def list_backups(self, directory=None) -> list:
        directory = Path(directory) if directory else self.backups_dir
        if directory is None or not directory.exists():
            return []
        out = []
        for p in sorted(directory.glob("backup-*.snap")):
            out.append(Snapshot(p, p.stem[len("backup-") :], self._snap_version(p)))
        return out

    @staticmethod
    def _snap_version(path) -> int:
        conn = sqlite3.connect(path)
        try:
            cur = conn.execute("SELECT value FROM meta WHERE key='schema_version'")
            row = cur.fetchone()
            return int(row[0]) if row else -1
        except sqlite3.DatabaseError:
            return -1
        finally:
            conn.close()

    def restore(self, snapshot) -> None:
        """Replace the whole store content with a snapshot's."""
        path = Path(snapshot.path if isinstance(snapshot, Snapshot) else snapshot)
        if not path.exists():
            raise StoreError("no snapshot at %s" % path)
        version = self._snap_version(path)
        if version != SCHEMA_VERSION:
            raise VersionMismatch(
                "snapshot %s is schema %d, this build needs %d"
                % (path.name, version, SCHEMA_VERSION)
            )
        with self._lock:
            src = sqlite3.connect(path)
            try:
                src.backup(self._conn)
            finally:
                src.close()
            self._load()

    # ---------------------------------------------------------------- packs

    def install_language_pack(self, pack: LanguagePack, actor=None) -> None:
        if not pack.code:
            raise ConstraintViolation("pack needs a language code")
        base = default_english_pack()
        missing = sorted(set(base.ui_strings) - set(pack.ui_strings))
        missing += sorted(
            "translit:%s" % s
            for s in set(base.transliteration) - set(pack.transliteration)
        )
        if missing:
            raise IncompletePack("missing: %s" % ", ".join(missing))
        with self._lock, self._conn:
            self.packs[pack.code] = pack
            self._put("pack", pack.code, pack.to_dict())

    def language_pack(self, code: str) -> LanguagePack:
        try:
            return self.packs[code]
        except KeyError:
            raise UnknownLanguage("no language pack %r" % code) from None

    def pack_codes(self) -> list:
        return sorted(self.packs)

    def ui_string(self, key: str, language=None) -> str:
        pack = self.packs.get(language or self.interface_language) or self.packs["en"]
        return pack.ui_strings.get(key) or self.packs["en"].ui_strings.get(key, key)

    def transliterate(self, kana_text: str, language=None) -> str:
        pack = self.language_pack(language or self.interface_language)
        return translit.transliterate(kana_text, pack.transliteration)

    # ----------------------------------------------------------------- misc

    def cookie_secret(self) -> bytes:
        cur = self._conn.execute("SELECT value FROM meta WHERE key='cookie_secret'")
        return bytes.fromhex(cur.fetchone()[0])
