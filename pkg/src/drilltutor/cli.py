"""Command line front end.

One executable, subcommand per job: serve the API, move bundles in and
out, snapshot and restore stores, run a drill at the terminal, and mine
text for pattern material. Output carries no timestamps, so a fixed-order
drill with a scripted stdin produces the same transcript every run.

Exit codes: 0 on success, 1 on a domain error (its name goes to stderr),
2 when the arguments do not parse.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .counters import generate_counting_items
from .drill import DrillSession, SessionConfig, SessionDone
from .mining import (
    CategorizedLexicon,
    Corpus,
    abstract_patterns,
    compile_query,
    find_instances,
    harvest_values,
)
from .patterns import MatchLimits, PatternTemplate
from .store import Store


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drilltutor", description="pattern drill tutor"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_store(p):
        p.add_argument("--store", default="drilltutor.db", help="store file")
        return p

    p = with_store(sub.add_parser("serve", help="run the HTTP API"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = with_store(sub.add_parser("import", help="load a bundle file"))
    p.add_argument("bundle", help="bundle JSON path")
    p.set_defaults(func=cmd_import)

    p = with_store(sub.add_parser("export", help="write the canonical bundle"))
    p.add_argument("-o", "--output", help="file instead of stdout")
    p.set_defaults(func=cmd_export)

    p = with_store(sub.add_parser("table", help="flat content table, TSV"))
    p.set_defaults(func=cmd_table)

    p = with_store(sub.add_parser("backup", help="snapshot the store"))
    p.add_argument("--dir", help="snapshot directory")
    p.set_defaults(func=cmd_backup)

    p = with_store(sub.add_parser("restore", help="load a snapshot back"))
    p.add_argument("snapshot", help="snapshot path")
    p.set_defaults(func=cmd_restore)

    p = with_store(sub.add_parser("add-expert", help="enroll an expert"))
    p.add_argument("username")
    p.add_argument("--password", required=True)
    p.add_argument("--role", default="expert", choices=("expert", "admin"))
    p.set_defaults(func=cmd_add_expert)

    p = with_store(sub.add_parser("drill", help="drill at the terminal"))
    p.add_argument("--goal", help="slash-separated path; drills its whole subtree")
    p.add_argument(
        "--pattern",
        action="append",
        dest="patterns",
        default=[],
        metavar="ID",
        help="pattern id (repeatable)",
    )
    p.add_argument("--all", action="store_true", help="every stored pattern")
    p.add_argument(
        "--counters",
        choices=("vary_number", "vary_object", "vary_both"),
        help="counting drill instead of stored patterns",
    )
    p.add_argument("--classes", default="", help="counter classes, comma-separated")
    p.add_argument("--numbers", default="", help="counter numbers, comma-separated")
    p.add_argument("--order", default="shuffled", choices=("shuffled", "fixed"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--k", "--streak", dest="streak", type=int, default=2,
        help="corrects in a row needed to retire an item",
    )
    p.add_argument("--window", type=int, default=3, help="reinsertion distance")
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--keys", default="c,x,q", help="correct,wrong,quit keys")
    p.add_argument("--delay", type=float, default=0.0, help="pause after feedback, seconds")
    p.add_argument("--no-kana", action="store_true", help="hide kana lines")
    p.set_defaults(func=cmd_drill)

    p = with_store(sub.add_parser("mine", help="query a corpus with a template"))
    p.add_argument("--pattern", help="stored pattern id to use as the query")
    p.add_argument("--template", help="ad-hoc template text, slots in <angle brackets>")
    p.add_argument("--corpus", nargs="*", default=[], help="text files (stdin if none)")
    p.add_argument("--language", default="en")
    p.add_argument("--max-tokens", type=int, default=3)
    p.add_argument("--exact", action="store_true", help="match case exactly")
    p.add_argument(
        "--filter",
        action="append",
        dest="filters",
        default=[],
        metavar="SPEC",
        help="lexicon:FILE keeps categorized values; freq:N needs N sightings",
    )
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("abstract", help="template candidates for a sentence")
    p.add_argument("--sentence", required=True, help="the sentence to generalize")
    p.add_argument("--lexicon", required=True, help="surface<TAB>category file")
    p.add_argument("--corpus", nargs="*", default=[], help="rank by support in these files")
    p.add_argument("--language", default=None)
    p.set_defaults(func=cmd_abstract)

    return parser


# ---------------------------------------------------------------- commands


def cmd_serve(args) -> int:
    from .service import run

    run(args.store, args.host, args.port)
    return 0


def cmd_import(args) -> int:
    store = Store(args.store)
    report = store.import_bundle(Path(args.bundle).read_text("utf-8"))
    print(
        "imported %d goals, %d patterns, %d values"
        % (len(report.goals_created), len(report.patterns_created), report.values_created)
    )
    for err in report.errors:
        print(
            "record %d (%s): %s: %s" % (err.index, err.goal or "?", err.error, err.message),
            file=sys.stderr,
        )
    return 0 if report.ok else 1


def cmd_export(args) -> int:
    text = Store(args.store).export_bundle()
    if args.output:
        Path(args.output).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_table(args) -> int:
    table = Store(args.store).export_table()
    print("\t".join(table.header))
    for goal, pid, var, values in table.rows:
        print("\t".join((goal, pid, var, ", ".join(values))))
    return 0


def cmd_backup(args) -> int:
    snap = Store(args.store).backup(args.dir)
    print(snap.path)
    return 0


def cmd_restore(args) -> int:
    store = Store(args.store)
    store.restore(Path(args.snapshot))
    print("restored %s" % args.snapshot)
    return 0


def cmd_add_expert(args) -> int:
    Store(args.store).add_expert(args.username, args.password, args.role)
    print("enrolled %s (%s)" % (args.username, args.role))
    return 0


def _csv(text: str) -> list:
    return [part.strip() for part in text.split(",") if part.strip()]


def _subtree_pattern_ids(tree, goal_id: str) -> list:
    """Pattern ids of a goal and everything under it, depth first."""
    ids = list(tree.goal(goal_id).pattern_ids)
    for child in tree.children(goal_id):
        ids.extend(_subtree_pattern_ids(tree, child.id))
    return ids


def _selected_pattern_ids(store: Store, args) -> list:
    ids = [pid for chunk in args.patterns for pid in _csv(chunk)]
    if args.all:
        for goal in store.tree.goals():
            ids.extend(pid for pid in goal.pattern_ids if pid not in ids)
    elif args.goal:
        top = store.navigate(_path_segments(args.goal)).goal
        ids.extend(
            pid
            for pid in _subtree_pattern_ids(store.tree, top.id)
            if pid not in ids
        )
    return ids


def _path_segments(path: str) -> list:
    return [seg.strip() for seg in path.split("/") if seg.strip()]


def cmd_drill(args, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    def say(line: str = "") -> None:
        print(line, file=stdout)

    keys = _csv(args.keys)
    if len(keys) != 3 or len(set(keys)) != 3:
        raise ValueError("--keys needs three distinct keys, e.g. c,x,q")
    key_ok, key_wrong, key_quit = keys

    items = []
    if args.patterns or args.goal or args.all:
        store = Store(args.store)
        items.extend(store.drill_items(_selected_pattern_ids(store, args)))
    if args.counters:
        items.extend(
            generate_counting_items(
                args.counters, _csv(args.classes), _csv(args.numbers)
            )
        )
    if not items:
        raise ValueError(
            "nothing to drill: give --goal, --pattern, --all or --counters"
        )

    config = SessionConfig(
        removal_streak=args.streak,
        reinsert_window=args.window,
        order=args.order,
        seed=args.seed,
        max_rounds=args.max_rounds,
    )
    session = DrillSession(items, config)
    show_kana = not args.no_kana

    m = session.model
    say("model")
    say("  pattern: %s" % m.pattern_text)
    say("  stimulus: %s" % m.stimulus)
    say("  answer: %s" % m.sentence)
    if show_kana and m.kana_sentence:
        say("  kana: %s" % m.kana_sentence)
    say()

    quit_early = False
    while not quit_early:
        try:
            stim = session.next_stimulus()
        except SessionDone:
            break
        say("%d) %s  [%d left]" % (stim.position, stim.text, stim.remaining))

        line = stdin.readline()
        if not line or line.strip() == key_quit:
            quit_early = True
            break
        sentence, kana = session.peek_answer()
        say("   answer: %s" % sentence)
        if show_kana and kana:
            say("   kana: %s" % kana)

        verdict = None
        while verdict is None:
            say("   correct? [%s=yes %s=no %s=quit]" % (key_ok, key_wrong, key_quit))
            line = stdin.readline()
            if not line or line.strip() == key_quit:
                quit_early = True
                break
            answer = line.strip()
            if answer == key_ok:
                verdict = "correct"
            elif answer == key_wrong:
                verdict = "incorrect"
        if quit_early:
            break

        feedback = session.reveal_and_report(verdict)
        if feedback.removed:
            say("   retired after %d in a row" % feedback.streak)
        elif feedback.verification == "correct":
            say("   good, comes back once more")
        else:
            say("   it returns shortly")
        say()
        if args.delay:
            time.sleep(args.delay)
        if feedback.done:
            break

    report = session.session_report()
    say("done: %d presentations, %d errors" % (
        report.total_presentations, report.total_errors,
    ))
    for pr in report.patterns:
        say(
            "  %s: %d shown, %d wrong (%d%%)"
            % (pr.pattern_id, pr.presentations, pr.errors, round(pr.error_rate * 100))
        )
    return 0


def _parse_filters(specs: list) -> tuple:
    """Split --filter specs into (lexicon, min_count)."""
    lexicon = None
    min_count = 1
    for spec in specs:
        kind, _, rest = spec.partition(":")
        if kind == "freq" and rest.isdigit():
            min_count = int(rest)
        elif kind == "lexicon" and rest:
            lexicon = CategorizedLexicon.from_file(rest)
        else:
            raise ValueError("filters are lexicon:FILE or freq:N, got %r" % spec)
    return lexicon, min_count


def cmd_mine(args) -> int:
    if bool(args.pattern) == bool(args.template):
        raise ValueError("give exactly one of --pattern or --template")
    if args.pattern:
        template = Store(args.store).pattern(args.pattern)
    else:
        template = PatternTemplate.from_strings(
            "query", {args.language: args.template}
        )
    limits = MatchLimits(
        max_tokens_per_capture=args.max_tokens, case_insensitive=not args.exact
    )
    if args.corpus:
        corpus = Corpus.from_files(args.corpus)
    else:
        corpus = Corpus([("stdin", sys.stdin.read())])
    query = compile_query(template, args.language, limits)
    print("query: %s" % query.text)
    matches = find_instances(query, corpus)
    print("%d matches" % len(matches))
    for m in matches:
        caught = " ".join("%s=%s" % (k, v) for k, v in sorted(m.captures.items()))
        print("  %s: %s" % (m.doc_id, caught or m.context))
    lexicon, min_count = _parse_filters(args.filters)
    values = harvest_values(matches, lexicon=lexicon, min_count=min_count)
    if any(values.values()):
        print("values:")
        for var in sorted(values):
            ranked = ", ".join("%s (%d)" % (v, c) for v, c in values[var])
            print("  %s: %s" % (var, ranked))
    return 0


def cmd_abstract(args) -> int:
    lexicon = CategorizedLexicon.from_file(args.lexicon)
    corpus = Corpus.from_files(args.corpus) if args.corpus else None
    candidates = abstract_patterns(
        args.sentence, lexicon, corpus, language=args.language
    )
    print("candidates:")
    for text, support in candidates:
        if corpus is None:
            print("  %s" % text)
        else:
            print("  %s  [support %d]" % (text, support))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print("%s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
