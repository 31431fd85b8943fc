"""HTTP face of the tutor: a versioned JSON API over one Store.

Experts log in with stored credentials and manage content; students get
ephemeral tokens and drill. Tokens live in process memory only, so a
restart logs everyone out, but everything that matters (content,
credentials, the cookie-signing secret) sits in the store and survives.

Error responses are ``{"error": <ExceptionName>, "detail": <text>}`` with
the status code keyed off the exception type.
"""

from __future__ import annotations

import base64
import dataclasses
import hashlib
import hmac
import json
import secrets
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__
from .counters import OutOfRange, UnknownClass, generate_counting_items
from .counters import counter_classes, counter_numbers, class_display
from .drill import (
    DrillError,
    DrillSession,
    EmptyItemList,
    SessionConfig,
    SessionDone,
    WrongPhase,
    events_to_jsonl,
)
from .goals import (
    ROOT_ID,
    AliasSet,
    DuplicateSiblingName,
    GoalError,
    NonEmptySubtree,
    UnknownChild,
    UnknownGoal,
    UnknownParent,
    apply_aliases,
)
from .mining import (
    CategorizedLexicon,
    Corpus,
    MiningError,
    abstract_patterns,
    compile_query,
    find_instances,
    harvest_values,
)
from .patterns import (
    EmptyValueList,
    MatchLimits,
    PatternError,
    PatternTemplate,
    UnknownLanguage,
    Variable,
)
from .store import (
    ConstraintViolation,
    IncompletePack,
    LanguagePack,
    MalformedBundle,
    NotOwner,
    Store,
    StoreError,
    UnknownPattern,
    VersionMismatch,
)
from .translit import UnknownSymbol

API = "/api/v1"
PREFS_COOKIE = "dt_prefs"
PREFS_COOKIE_LIMIT = 3500  # browsers cap cookies near 4 KiB
IDLE_SECONDS = 30 * 60


class AuthRequired(ValueError):
    """No token, or a token the service has never issued."""


class Forbidden(ValueError):
    """A real token used outside its realm."""


class UnknownSession(ValueError):
    pass


class UnknownSnapshot(ValueError):
    pass


class BadCookie(ValueError):
    """The preferences cookie fails its signature check."""


class RequestInvalid(ValueError):
    pass


# most-derived exception class wins; bases catch what subclasses do not
STATUS: dict = {
    BadCookie: 400,
    AuthRequired: 401,
    Forbidden: 403,
    NotOwner: 403,
    UnknownSession: 404,
    UnknownSnapshot: 404,
    UnknownGoal: 404,
    UnknownParent: 404,
    UnknownChild: 404,
    UnknownPattern: 404,
    UnknownLanguage: 404,
    UnknownClass: 404,
    DuplicateSiblingName: 409,
    NonEmptySubtree: 409,
    ConstraintViolation: 409,
    VersionMismatch: 409,
    WrongPhase: 409,
    SessionDone: 409,
    RequestInvalid: 422,
    MalformedBundle: 422,
    IncompletePack: 422,
    EmptyItemList: 422,
    EmptyValueList: 422,
    OutOfRange: 422,
    UnknownSymbol: 422,
    MiningError: 422,
    PatternError: 422,
    GoalError: 422,
    DrillError: 422,
    StoreError: 422,
}


def _status_for(exc: BaseException):
    for klass in type(exc).__mro__:
        if klass in STATUS:
            return STATUS[klass]
    return None


def _need(payload, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise RequestInvalid("missing field %r" % key)
    return payload[key]


# ------------------------------------------------------------ prefs cookie


def _sign(secret: bytes, blob: bytes) -> str:
    return hmac.new(secret, blob, hashlib.sha256).hexdigest()


def encode_prefs(secret: bytes, prefs: dict) -> str:
    blob = json.dumps(prefs, sort_keys=True).encode("utf-8")
    body = base64.urlsafe_b64encode(blob).decode("ascii").rstrip("=")
    return body + "." + _sign(secret, body.encode("ascii"))


def decode_prefs(secret: bytes, value: str) -> dict:
    body, dot, sig = value.partition(".")
    if not dot or not hmac.compare_digest(_sign(secret, body.encode("ascii")), sig):
        raise BadCookie("preferences cookie failed verification")
    try:
        pad = "=" * (-len(body) % 4)
        return json.loads(base64.urlsafe_b64decode(body + pad))
    except (ValueError, json.JSONDecodeError):
        raise BadCookie("preferences cookie is unreadable") from None


# ------------------------------------------------------------ serializers


def _goal_json(store: Store, goal) -> dict:
    return {
        "id": goal.id,
        "names": dict(goal.names),
        "parent": goal.parent,
        "owner": goal.owner,
        "pattern_ids": list(goal.pattern_ids),
        "path": store.tree.path_labels(goal.id),
    }


def _view_json(view) -> dict:
    return {
        "id": view.id,
        "label": view.label,
        "pattern_ids": list(view.pattern_ids),
        "children": [_view_json(c) for c in view.children],
    }


def _pattern_json(store: Store, pid: str) -> dict:
    t = store.pattern(pid)
    return {
        "id": pid,
        "goal_id": store.pattern_goal[pid],
        "renderings": {lang: t.rendering_text(lang) for lang in t.renderings},
        "variables": [
            {
                "name": v.name,
                "category": v.category,
                "aliases": dict(v.display_aliases),
            }
            for v in (store.pattern_vars[pid][n] for n in t.variables)
        ],
        "values": {
            var: [dict(val.renderings) for val in vals]
            for var, vals in store.values_for(pid).items()
        },
    }


@dataclass
class _Live:
    session: DrillSession
    owner: str
    last_touch: float
    flushed: int = 0


def create_app(
    store: Store,
    clock: Callable[[], float] | None = None,
    idle_seconds: float = IDLE_SECONDS,
) -> FastAPI:
    app = FastAPI(title="drilltutor", version=__version__, openapi_url=None)
    now = clock or time.monotonic
    expert_tokens: dict = {}
    student_tokens: dict = {}
    sessions: dict = {}
    events_path = (
        None
        if store.path == ":memory:"
        else Path(store.path).with_name(Path(store.path).stem + "-sessions.jsonl")
    )

    @app.exception_handler(ValueError)
    async def _domain_error(request: Request, exc: ValueError):
        code = _status_for(exc)
        if code is None:
            raise exc
        return JSONResponse(
            {"error": type(exc).__name__, "detail": str(exc)}, status_code=code
        )

    # ------------------------------------------------------------- tokens

    def _bearer(request: Request) -> str:
        header = request.headers.get("authorization", "")
        kind, _, token = header.partition(" ")
        if kind.lower() != "bearer" or not token.strip():
            raise AuthRequired("send 'Authorization: Bearer <token>'")
        return token.strip()

    def any_token(request: Request) -> str:
        token = _bearer(request)
        if token not in expert_tokens and token not in student_tokens:
            raise AuthRequired("unknown token")
        return token

    def expert_of(request: Request) -> str:
        token = _bearer(request)
        if token in expert_tokens:
            return expert_tokens[token]
        if token in student_tokens:
            raise Forbidden("this calls for an expert token")
        raise AuthRequired("unknown token")

    def admin_of(request: Request) -> str:
        username = expert_of(request)
        if store.expert_role(username) != "admin":
            raise Forbidden("this calls for the admin role")
        return username

    # ------------------------------------------------------------ sessions

    def _flush(live: _Live) -> None:
        if events_path is None:
            return
        fresh = live.session.events[live.flushed :]
        if fresh:
            with events_path.open("a", encoding="utf-8") as fh:
                fh.write(events_to_jsonl(fresh))
            live.flushed = len(live.session.events)

    def _live(sid: str, token: str) -> _Live:
        live = sessions.get(sid)
        if live is not None and now() - live.last_touch > idle_seconds:
            _flush(live)
            del sessions[sid]
            live = None
        if live is None:
            raise UnknownSession(sid)
        if live.owner != token:
            raise Forbidden("session belongs to another token")
        live.last_touch = now()
        return live

    # -------------------------------------------------------------- public

    @app.get(API + "/health")
    def health():
        return {"ok": True, "version": __version__}

    @app.get(API + "/languages")
    def languages():
        return {"languages": store.pack_codes()}

    @app.get(API + "/ui")
    def ui_strings(language: str | None = None):
        pack = store.language_pack(language or store.interface_language)
        return {"language": pack.code, "strings": dict(pack.ui_strings)}

    @app.post(API + "/expert/login")
    def login(payload: dict = Body(...)):
        username = _need(payload, "username")
        if not store.authenticate(username, _need(payload, "password")):
            raise AuthRequired("bad credentials")
        token = secrets.token_urlsafe(32)
        expert_tokens[token] = username
        return {"token": token, "role": store.expert_role(username)}

    @app.post(API + "/expert/logout")
    def logout(request: Request):
        expert_of(request)
        expert_tokens.pop(_bearer(request), None)
        return {"ok": True}

    @app.post(API + "/student/enter")
    def student_enter(payload: dict = Body(default={})):
        token = secrets.token_urlsafe(32)
        student_tokens[token] = str(payload.get("name") or "anonymous")
        return {"token": token}

    # --------------------------------------------------------------- prefs

    def _default_prefs() -> dict:
        return {"language": store.interface_language, "show_kana": True}

    @app.get(API + "/prefs")
    def get_prefs(request: Request):
        raw = request.cookies.get(PREFS_COOKIE)
        if raw is None:
            return _default_prefs()
        prefs = _default_prefs()
        prefs.update(decode_prefs(store.cookie_secret(), raw))
        return prefs

    @app.put(API + "/prefs")
    def put_prefs(payload: dict = Body(...)):
        # Client-owned state rides along unchanged: goal aliases,
        # variable aliases, key maps. Only the keys the server acts on
        # are validated.
        prefs = _default_prefs()
        prefs.update(payload)
        if prefs["language"] not in store.pack_codes():
            raise RequestInvalid("no language pack %r" % prefs["language"])
        prefs["show_kana"] = bool(prefs["show_kana"])
        for key in ("goal_aliases", "variable_aliases"):
            if key in prefs and not isinstance(prefs[key], dict):
                raise RequestInvalid("%s must be an object" % key)
        encoded = encode_prefs(store.cookie_secret(), prefs)
        if len(encoded) > PREFS_COOKIE_LIMIT:
            raise RequestInvalid("preferences exceed the cookie size limit")
        resp = JSONResponse(prefs)
        resp.set_cookie(
            PREFS_COOKIE,
            encoded,
            max_age=365 * 24 * 3600,
            samesite="lax",
        )
        return resp

    # ---------------------------------------------------------- navigation

    @app.get(API + "/tree")
    def tree(request: Request, language: str | None = None):
        any_token(request)
        view = store.tree_view(language)
        raw = request.cookies.get(PREFS_COOKIE)
        if raw is not None:
            prefs = decode_prefs(store.cookie_secret(), raw)
            aliases = prefs.get("goal_aliases") or {}
            if isinstance(aliases, dict) and aliases:
                view = apply_aliases(
                    view, AliasSet(goal_aliases=dict(aliases))
                )
        return _view_json(view)

    @app.post(API + "/navigate")
    def navigate(request: Request, payload: dict = Body(...)):
        any_token(request)
        path = _need(payload, "path")
        if not isinstance(path, list):
            raise RequestInvalid("path must be a list of names or indexes")
        nav = store.navigate(path, payload.get("language"))
        language = payload.get("language") or store.interface_language
        return {
            "goal": _goal_json(store, nav.goal),
            "chain": [
                {"id": g.id, "label": g.label(language)} for g in nav.chain
            ],
            "children": [
                {"id": g.id, "label": g.label(language)} for g in nav.children
            ],
            "pattern_ids": list(nav.pattern_ids),
        }

    @app.get(API + "/patterns/{pid}")
    def pattern_detail(request: Request, pid: str):
        any_token(request)
        return _pattern_json(store, pid)

    @app.get(API + "/patterns/{pid}/preview")
    def pattern_preview(request: Request, pid: str, language: str | None = None):
        any_token(request)
        pairs = store.enumerate_pattern(pid, language)
        return {
            "pattern_id": pid,
            "language": language or store.target_language,
            "count": len(pairs),
            "sentences": [s for _, s in pairs],
        }

    @app.get(API + "/counters")
    def counters(request: Request):
        any_token(request)
        return {
            "modes": ["vary_number", "vary_object", "vary_both"],
            "classes": [
                {
                    "name": cls,
                    "display": class_display(cls),
                    "numbers": counter_numbers(cls),
                }
                for cls in counter_classes()
            ],
        }

    # ------------------------------------------------------------ drilling

    @app.post(API + "/sessions")
    def create_session(request: Request, payload: dict = Body(...)):
        token = any_token(request)
        items = []
        if payload.get("pattern_ids"):
            items.extend(
                store.drill_items(payload["pattern_ids"], payload.get("picks"))
            )
        if payload.get("counters"):
            spec = payload["counters"]
            items.extend(
                generate_counting_items(
                    _need(spec, "mode"),
                    spec.get("classes", ()),
                    spec.get("numbers", ()),
                    language=store.interface_language,
                )
            )
        if not items:
            raise RequestInvalid("give pattern_ids and/or a counters block")
        config = SessionConfig(
            removal_streak=payload.get("removal_streak", 2),
            reinsert_window=payload.get("reinsert_window", 3),
            order=payload.get("order", "shuffled"),
            seed=payload.get("seed", 0),
            max_rounds=payload.get("max_rounds"),
        )
        sid = "s" + secrets.token_hex(8)
        session = DrillSession(items, config, session_id=sid)
        live = _Live(session, owner=token, last_touch=now())
        sessions[sid] = live
        _flush(live)
        return {
            "session_id": sid,
            "phase": session.phase,
            "remaining": session.remaining,
            "model": dataclasses.asdict(session.model),
        }

    @app.get(API + "/sessions/{sid}")
    def session_state(request: Request, sid: str):
        live = _live(sid, any_token(request))
        s = live.session
        return {
            "session_id": sid,
            "phase": s.phase,
            "presented": s.presented,
            "remaining": s.remaining,
            "done": s.is_done,
            "model": dataclasses.asdict(s.model),
        }

    @app.post(API + "/sessions/{sid}/next")
    def session_next(request: Request, sid: str):
        live = _live(sid, any_token(request))
        try:
            stim = live.session.next_stimulus()
        finally:
            _flush(live)
        return dataclasses.asdict(stim)

    @app.post(API + "/sessions/{sid}/reveal")
    def session_reveal(request: Request, sid: str):
        live = _live(sid, any_token(request))
        sentence, kana = live.session.peek_answer()
        _flush(live)
        return {"sentence": sentence, "kana_sentence": kana}

    @app.post(API + "/sessions/{sid}/report")
    def session_report(request: Request, sid: str, payload: dict = Body(...)):
        live = _live(sid, any_token(request))
        try:
            feedback = live.session.reveal_and_report(_need(payload, "result"))
        finally:
            _flush(live)
        return dataclasses.asdict(feedback)

    @app.get(API + "/sessions/{sid}/stats")
    def session_stats(request: Request, sid: str):
        live = _live(sid, any_token(request))
        report = live.session.session_report()
        return {
            "patterns": [dataclasses.asdict(p) for p in report.patterns],
            "items": [
                {"item_key": k, **dataclasses.asdict(st)} for k, st in report.items
            ],
            "total_presentations": report.total_presentations,
            "total_errors": report.total_errors,
        }

    @app.get(API + "/sessions/{sid}/events")
    def session_events(request: Request, sid: str):
        live = _live(sid, any_token(request))
        return PlainTextResponse(
            events_to_jsonl(live.session.events), media_type="application/x-ndjson"
        )

    @app.delete(API + "/sessions/{sid}")
    def session_close(request: Request, sid: str):
        live = _live(sid, any_token(request))
        _flush(live)
        del sessions[sid]
        return {"ok": True}

    # ------------------------------------------------------ expert content

    @app.post(API + "/expert/goals")
    def add_goal(request: Request, payload: dict = Body(...)):
        username = expert_of(request)
        goal = store.add_goal(
            _need(payload, "names"),
            payload.get("parent_id") or ROOT_ID,
            payload.get("id"),
            actor=username,
        )
        return _goal_json(store, goal)

    @app.patch(API + "/expert/goals/{gid}")
    def rename_goal(request: Request, gid: str, payload: dict = Body(...)):
        goal = store.rename_goal(gid, _need(payload, "names"), actor=expert_of(request))
        return _goal_json(store, goal)

    @app.post(API + "/expert/goals/{gid}/move")
    def move_goal(request: Request, gid: str, payload: dict = Body(...)):
        goal = store.move_goal(
            gid, _need(payload, "parent_id"), actor=expert_of(request)
        )
        return _goal_json(store, goal)

    @app.delete(API + "/expert/goals/{gid}")
    def delete_goal(request: Request, gid: str, cascade: bool = False):
        removed = store.delete_goal(gid, cascade=cascade, actor=expert_of(request))
        return {"removed": removed}

    @app.post(API + "/expert/patterns")
    def add_pattern(request: Request, payload: dict = Body(...)):
        username = expert_of(request)
        variables = None
        if payload.get("variables"):
            variables = [
                Variable(
                    _need(v, "name"), v.get("aliases", {}), v.get("category", "")
                )
                for v in payload["variables"]
            ]
        template = store.add_pattern(
            _need(payload, "goal_id"),
            _need(payload, "renderings"),
            payload.get("id"),
            variables,
            actor=username,
        )
        return _pattern_json(store, template.id)

    @app.delete(API + "/expert/patterns/{pid}")
    def delete_pattern(request: Request, pid: str):
        store.delete_pattern(pid, actor=expert_of(request))
        return {"ok": True}

    @app.put(API + "/expert/patterns/{pid}/values/{variable}")
    def put_values(request: Request, pid: str, variable: str, payload: dict = Body(...)):
        store.set_values(
            pid, variable, _need(payload, "values"), actor=expert_of(request)
        )
        return _pattern_json(store, pid)

    # ----------------------------------------------------- expert exchange

    @app.get(API + "/expert/export")
    def export_bundle(request: Request):
        expert_of(request)
        return Response(store.export_bundle(), media_type="application/json")

    @app.post(API + "/expert/import")
    def import_bundle(request: Request, payload: dict = Body(...)):
        report = store.import_bundle(payload, actor=expert_of(request))
        return {
            "ok": report.ok,
            "goals_created": report.goals_created,
            "patterns_created": report.patterns_created,
            "values_created": report.values_created,
            "errors": [dataclasses.asdict(e) for e in report.errors],
        }

    @app.get(API + "/expert/table")
    def export_table(request: Request):
        expert_of(request)
        table = store.export_table()
        return {"header": list(table.header), "rows": table.rows}

    @app.post(API + "/expert/backups")
    def make_backup(request: Request):
        expert_of(request)
        snap = store.backup()
        return {"path": str(snap.path), "timestamp": snap.timestamp, "version": snap.version}

    @app.get(API + "/expert/backups")
    def backups(request: Request):
        expert_of(request)
        return {
            "backups": [
                {"path": str(b.path), "timestamp": b.timestamp, "version": b.version}
                for b in store.list_backups()
            ]
        }

    @app.post(API + "/expert/restore")
    def restore(request: Request, payload: dict = Body(...)):
        expert_of(request)
        path = Path(_need(payload, "path"))
        if not path.exists():
            raise UnknownSnapshot(str(path))
        store.restore(path)
        return {"ok": True}

    @app.post(API + "/expert/packs")
    def install_pack(request: Request, payload: dict = Body(...)):
        expert_of(request)
        pack = LanguagePack(
            _need(payload, "code"),
            _need(payload, "ui_strings"),
            _need(payload, "transliteration"),
        )
        store.install_language_pack(pack)
        return {"languages": store.pack_codes()}

    @app.get(API + "/expert/packs/{code}")
    def pack_detail(request: Request, code: str):
        expert_of(request)
        pack = store.language_pack(code)
        return {
            "code": pack.code,
            "ui_strings": dict(pack.ui_strings),
            "transliteration": dict(pack.transliteration),
        }

    @app.post(API + "/expert/experts")
    def enroll_expert(request: Request, payload: dict = Body(...)):
        admin_of(request)
        store.add_expert(
            _need(payload, "username"),
            _need(payload, "password"),
            payload.get("role", "expert"),
        )
        return {"ok": True}

    # ------------------------------------------------------- expert mining

    def _adhoc_lexicon(entries) -> CategorizedLexicon:
        lx = CategorizedLexicon()
        for row in entries:
            if not isinstance(row, (list, tuple)) or len(row) < 2:
                raise RequestInvalid("lexicon rows are [surface, category]")
            lx.add(row[0], row[1])
        return lx

    @app.post(API + "/expert/mine")
    def mine(request: Request, payload: dict = Body(...)):
        expert_of(request)
        language = payload.get("language") or store.interface_language
        if payload.get("pattern_id"):
            template = store.pattern(payload["pattern_id"])
        else:
            template = PatternTemplate.from_strings(
                "query", {language: _need(payload, "template")}
            )
        limits = MatchLimits(
            max_tokens_per_capture=payload.get("max_tokens", 3),
            case_insensitive=payload.get("case_insensitive", True),
        )
        texts = payload.get("texts") or [_need(payload, "text")]
        query = compile_query(template, language, limits)
        matches = find_instances(query, Corpus.from_texts(texts))
        lexicon = (
            _adhoc_lexicon(payload["lexicon"]) if payload.get("lexicon") else None
        )
        values = harvest_values(
            matches, lexicon=lexicon, min_count=payload.get("min_count", 1)
        )
        return {
            "query": query.text,
            "matches": [
                {
                    "doc_id": m.doc_id,
                    "start": m.start,
                    "end": m.end,
                    "captures": dict(m.captures),
                    "context": m.context,
                }
                for m in matches
            ],
            "values": {var: [[v, c] for v, c in pairs] for var, pairs in values.items()},
        }

    @app.post(API + "/expert/abstract")
    def abstract(request: Request, payload: dict = Body(...)):
        expert_of(request)
        lexicon = _adhoc_lexicon(_need(payload, "lexicon"))
        texts = payload.get("texts") or (
            [payload["text"]] if payload.get("text") else None
        )
        corpus = Corpus.from_texts(texts) if texts else None
        candidates = abstract_patterns(
            _need(payload, "sentence"),
            lexicon,
            corpus,
            language=payload.get("language"),
        )
        return {"candidates": [{"template": t, "support": n} for t, n in candidates]}

    return app


def run(store_path: str, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Serve a store file over HTTP until interrupted."""
    import uvicorn

    uvicorn.run(create_app(Store(store_path)), host=host, port=port)
