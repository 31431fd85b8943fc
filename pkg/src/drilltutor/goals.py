"""Goal hierarchy: the navigable index that organizes patterns.

A single tree rooted at ``root``. Every goal has one display name per
language; sibling names must stay unique per parent per language. Patterns
hang off goals by id. Students may overlay their own display aliases on a
view of the tree; aliases never touch the tree itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class GoalError(ValueError):
    pass


class UnknownParent(GoalError):
    pass


class UnknownGoal(GoalError):
    pass


class DuplicateSiblingName(GoalError):
    pass


class NonEmptySubtree(GoalError):
    """Refusal to delete a goal that still has children (without cascade)."""


class UnknownChild(GoalError):
    """A navigation step names or indexes a child that is not there."""


ROOT_ID = "root"


@dataclass
class Goal:
    id: str
    names: dict
    parent: str | None
    pattern_ids: list = field(default_factory=list)
    owner: str | None = None

    def label(self, language: str = "en") -> str:
        if language in self.names:
            return self.names[language]
        if "en" in self.names:
            return self.names["en"]
        return next(iter(self.names.values()))


@dataclass
class GoalView:
    """Display-only snapshot of a subtree; safe to rewrite labels on."""

    id: str
    label: str
    pattern_ids: tuple
    children: tuple


@dataclass
class NavigationResult:
    goal: Goal
    chain: list          # goals visited, root first, target last
    children: list
    pattern_ids: list


@dataclass
class AliasSet:
    """Client-held renames: goal id -> label, variable name -> label."""

    owner: str = ""
    goal_aliases: dict = field(default_factory=dict)
    variable_aliases: dict = field(default_factory=dict)


def apply_aliases(view: GoalView, aliases: AliasSet) -> GoalView:
    """Copy of the view with aliased labels substituted.

    Unknown ids in the alias set are ignored; applying the same set twice
    gives the same result.
    """
    label = aliases.goal_aliases.get(view.id, view.label)
    return GoalView(
        id=view.id,
        label=label,
        pattern_ids=view.pattern_ids,
        children=tuple(apply_aliases(c, aliases) for c in view.children),
    )


class GoalTree:
    def __init__(self, root_names: Mapping | None = None, default_language: str = "en"):
        self.default_language = default_language
        names = dict(root_names) if root_names else {default_language: "Goals"}
        self._nodes = {ROOT_ID: Goal(ROOT_ID, names, None)}
        self._children = {ROOT_ID: []}
        self._seq = 0

    # ------------------------------------------------------------ lookup

    def goal(self, goal_id: str) -> Goal:
        try:
            return self._nodes[goal_id]
        except KeyError:
            raise UnknownGoal(goal_id) from None

    def __contains__(self, goal_id: str) -> bool:
        return goal_id in self._nodes

    def children(self, goal_id: str) -> list:
        self.goal(goal_id)
        return [self._nodes[c] for c in self._children[goal_id]]

    def goals(self) -> list:
        """All goals in depth-first order, root first."""
        out = []

        def visit(gid):
            out.append(self._nodes[gid])
            for c in self._children[gid]:
                visit(c)

        visit(ROOT_ID)
        return out

    def path_labels(self, goal_id: str, language: str | None = None) -> list:
        """Labels from just below the root down to the goal ([] for root)."""
        language = language or self.default_language
        chain = []
        g = self.goal(goal_id)
        while g.parent is not None:
            chain.append(g.label(language))
            g = self._nodes[g.parent]
        return list(reversed(chain))

    # --------------------------------------------------------- mutation

    def _new_id(self) -> str:
        while True:
            self._seq += 1
            gid = "g%d" % self._seq
            if gid not in self._nodes:
                return gid

    def _check_sibling_names(self, parent_id: str, names: Mapping, skip: str | None = None):
        for sib_id in self._children[parent_id]:
            if sib_id == skip:
                continue
            sib = self._nodes[sib_id]
            for lang, label in names.items():
                if sib.names.get(lang) == label:
                    raise DuplicateSiblingName(
                        "%r already names a child of %r (%s)" % (label, parent_id, lang)
                    )

    def _normalize_names(self, names) -> dict:
        if isinstance(names, str):
            names = {self.default_language: names}
        names = dict(names)
        if not names.get(self.default_language):
            raise GoalError("a %r name is required" % self.default_language)
        return names

    def add_goal(
        self,
        names,
        parent_id: str = ROOT_ID,
        goal_id: str | None = None,
        owner: str | None = None,
    ) -> Goal:
        if parent_id not in self._nodes:
            raise UnknownParent(parent_id)
        names = self._normalize_names(names)
        self._check_sibling_names(parent_id, names)
        gid = goal_id or self._new_id()
        if gid in self._nodes:
            raise GoalError("goal id %r already used" % gid)
        goal = Goal(gid, names, parent_id, owner=owner)
        self._nodes[gid] = goal
        self._children[gid] = []
        self._children[parent_id].append(gid)
        return goal

    def rename_goal(self, goal_id: str, names) -> Goal:
        g = self.goal(goal_id)
        names = self._normalize_names(names)
        if g.parent is not None:
            self._check_sibling_names(g.parent, names, skip=goal_id)
        g.names = names
        return g

    def move_goal(self, goal_id: str, new_parent_id: str) -> Goal:
        g = self.goal(goal_id)
        if g.parent is None:
            raise GoalError("the root cannot move")
        if new_parent_id not in self._nodes:
            raise UnknownParent(new_parent_id)
        # walking up from the target parent must not hit the moved goal
        cur = new_parent_id
        while cur is not None:
            if cur == goal_id:
                raise GoalError("cannot move %r under its own subtree" % goal_id)
            cur = self._nodes[cur].parent
        self._check_sibling_names(new_parent_id, g.names, skip=goal_id)
        self._children[g.parent].remove(goal_id)
        g.parent = new_parent_id
        self._children[new_parent_id].append(goal_id)
        return g

    def attach_pattern(self, goal_id: str, pattern_id: str) -> None:
        g = self.goal(goal_id)
        if pattern_id not in g.pattern_ids:
            g.pattern_ids.append(pattern_id)

    def detach_pattern(self, goal_id: str, pattern_id: str) -> None:
        g = self.goal(goal_id)
        if pattern_id not in g.pattern_ids:
            raise GoalError("pattern %r is not attached to %r" % (pattern_id, goal_id))
        g.pattern_ids.remove(pattern_id)

    def delete_goal(self, goal_id: str, cascade: bool = False) -> list:
        """Remove a goal; returns the ids actually removed (subtree order).

        Without ``cascade`` a goal with children or patterns is refused.
        """
        g = self.goal(goal_id)
        if g.parent is None:
            raise GoalError("the root cannot be deleted")
        if (self._children[goal_id] or g.pattern_ids) and not cascade:
            raise NonEmptySubtree(goal_id)
        removed = []

        def rm(gid):
            for c in list(self._children[gid]):
                rm(c)
            del self._children[gid]
            del self._nodes[gid]
            removed.append(gid)

        self._children[g.parent].remove(goal_id)
        rm(goal_id)
        return removed

    # -------------------------------------------------------- navigation

    def navigate(self, path: Sequence, language: str | None = None) -> NavigationResult:
        """Walk from the root by child index (int) or child name (str).

        Name steps compare case-insensitively in the requested language.
        The empty path lands on the root.
        """
        language = language or self.default_language
        cur = self._nodes[ROOT_ID]
        chain = [cur]
        for step in path:
            kids = self.children(cur.id)
            if isinstance(step, int):
                if not 0 <= step < len(kids):
                    raise UnknownChild(
                        "index %d out of range under %r" % (step, cur.id)
                    )
                cur = kids[step]
            else:
                wanted = str(step).casefold()
                for kid in kids:
                    if kid.label(language).casefold() == wanted:
                        cur = kid
                        break
                else:
                    raise UnknownChild("%r is not a child of %r" % (step, cur.id))
            chain.append(cur)
        return NavigationResult(
            goal=cur,
            chain=chain,
            children=self.children(cur.id),
            pattern_ids=list(cur.pattern_ids),
        )

    def find_by_path(self, labels: Sequence, language: str | None = None) -> Goal:
        return self.navigate(labels, language).goal

    def tree_view(self, language: str | None = None) -> GoalView:
        language = language or self.default_language

        def build(gid) -> GoalView:
            g = self._nodes[gid]
            return GoalView(
                id=g.id,
                label=g.label(language),
                pattern_ids=tuple(g.pattern_ids),
                children=tuple(build(c) for c in self._children[gid]),
            )

        return build(ROOT_ID)

    # ------------------------------------------------------ serialization

    def records(self) -> list:
        out = []
        for g in self.goals():
            out.append(
                {
                    "id": g.id,
                    "parent": g.parent,
                    "names": dict(g.names),
                    "pattern_ids": list(g.pattern_ids),
                    "owner": g.owner,
                    "children": list(self._children[g.id]),
                }
            )
        return out

    @classmethod
    def from_records(cls, records: Iterable, default_language: str = "en") -> "GoalTree":
        records = list(records)
        tree = cls(default_language=default_language)
        by_id = {r["id"]: r for r in records}
        if ROOT_ID in by_id:
            tree._nodes[ROOT_ID].names = dict(by_id[ROOT_ID]["names"])
            tree._nodes[ROOT_ID].pattern_ids = list(by_id[ROOT_ID].get("pattern_ids", []))
        for r in records:
            if r["id"] == ROOT_ID:
                continue
            g = Goal(
                r["id"],
                dict(r["names"]),
                r["parent"],
                list(r.get("pattern_ids", [])),
                r.get("owner"),
            )
            tree._nodes[g.id] = g
            tree._children[g.id] = []
        ordered = any("children" in r for r in records)
        if ordered:
            # sibling order travels on the parent record
            for r in records:
                tree._children[r["id"]] = [
                    c for c in r.get("children", []) if c in tree._nodes
                ]
        else:
            for r in records:  # fall back to record order
                if r["id"] != ROOT_ID:
                    tree._children[r["parent"]].append(r["id"])
        seqs = [
            int(g[1:]) for g in tree._nodes if g.startswith("g") and g[1:].isdigit()
        ]
        tree._seq = max(seqs, default=0)
        tree.check_invariants()
        return tree

    # --------------------------------------------------------- invariants

    def check_invariants(self) -> None:
        """Single root, no cycles, consistent parent links, unique names."""
        seen = set()

        def visit(gid):
            if gid in seen:
                raise GoalError("cycle or shared child at %r" % gid)
            seen.add(gid)
            for c in self._children[gid]:
                if self._nodes[c].parent != gid:
                    raise GoalError("parent link of %r is wrong" % c)
                visit(c)

        visit(ROOT_ID)
        if seen != set(self._nodes):
            raise GoalError("unreachable goals: %r" % (set(self._nodes) - seen,))
        if self._nodes[ROOT_ID].parent is not None:
            raise GoalError("root has a parent")
        for gid in self._nodes:
            kids = [self._nodes[c] for c in self._children[gid]]
            langs = {lang for k in kids for lang in k.names}
            for lang in langs:
                labels = [k.names[lang] for k in kids if lang in k.names]
                if len(labels) != len(set(labels)):
                    raise DuplicateSiblingName(
                        "children of %r collide in %s" % (gid, lang)
                    )
