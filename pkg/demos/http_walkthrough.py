"""End-to-end HTTP walkthrough using only the standard library.

Starts a server on a free port, loads the starter content, then plays
both roles: the expert renames nothing but exports the bundle; the
student navigates, previews a pattern, drills a short session, and
aliases a goal for display. Run from the repository root:

    python3 demos/http_walkthrough.py
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request
from http.cookiejar import CookieJar
from pathlib import Path

BASE = ""
OPENER = urllib.request.build_opener(urllib.request.HTTPCookieProcessor(CookieJar()))


def call(method: str, path: str, token: str | None = None, body=None):
    req = urllib.request.Request(BASE + path, method=method)
    req.add_header("Content-Type", "application/json")
    if token:
        req.add_header("Authorization", "Bearer " + token)
    data = json.dumps(body).encode() if body is not None else None
    with OPENER.open(req, data) as resp:
        return json.loads(resp.read())


def main() -> int:
    global BASE
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    BASE = "http://127.0.0.1:%d/api/v1" % port

    work = Path(tempfile.mkdtemp())
    db = work / "tutor.db"
    subprocess.run(
        [sys.executable, "-m", "drilltutor", "import", "--store", str(db),
         "fixtures/starter_bundle.json"],
        check=True, capture_output=True,
    )
    subprocess.run(
        [sys.executable, "-m", "drilltutor", "add-expert", "ama",
         "--store", str(db), "--password", "correct horse"],
        check=True, capture_output=True,
    )

    server = subprocess.Popen(
        [sys.executable, "-m", "drilltutor", "serve",
         "--store", str(db), "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        for _ in range(100):
            try:
                call("GET", "/health")
                break
            except (urllib.error.URLError, ConnectionError):
                time.sleep(0.1)

        print("== expert: log in and export the bundle")
        expert = call("POST", "/expert/login",
                      body={"username": "ama", "password": "correct horse"})
        print("role:", expert["role"])
        req = urllib.request.Request(BASE + "/expert/export")
        req.add_header("Authorization", "Bearer " + expert["token"])
        with OPENER.open(req) as resp:
            print("bundle bytes:", len(resp.read()))

        print()
        print("== student: navigate and preview")
        student = call("POST", "/student/enter", body={"name": "kim"})["token"]
        nav = call("POST", "/navigate", student,
                   {"path": ["present somebody"]})
        print("goal:", " / ".join(g["label"] for g in nav["chain"]))
        pid = nav["pattern_ids"][0]
        preview = call("GET", "/patterns/%s/preview" % pid, student)
        print("pattern %s generates %d sentences, e.g." % (pid, preview["count"]))
        print("   ", preview["sentences"][0])

        print()
        print("== student: a short drill, everything answered correct")
        sess = call("POST", "/sessions", student,
                    {"pattern_ids": [pid], "order": "fixed",
                     "removal_streak": 1})
        sid = sess["session_id"]
        print("model:", sess["model"]["sentence"])
        while True:
            try:
                stim = call("POST", "/sessions/%s/next" % sid, student)
            except urllib.error.HTTPError as err:
                if err.code == 409:  # SessionDone
                    break
                raise
            answer = call("POST", "/sessions/%s/reveal" % sid, student)
            call("POST", "/sessions/%s/report" % sid, student,
                 {"result": "correct"})
            print("  %2d) %-28s -> %s" % (stim["position"], stim["text"],
                                          answer["sentence"]))
        stats = call("GET", "/sessions/%s/stats" % sid, student)
        print("presentations:", stats["total_presentations"],
              "errors:", stats["total_errors"])

        print()
        print("== student: alias a goal for display only")
        gid = nav["goal"]["id"]
        call("PUT", "/prefs", body={"goal_aliases": {gid: "intros"}})
        tree = call("GET", "/tree", student)
        print("tree now shows:", [c["label"] for c in tree["children"]])
        print("(the server-side name is untouched; clear the cookie",
              "and the original label returns)")
        return 0
    finally:
        server.terminate()
        server.wait()


if __name__ == "__main__":
    raise SystemExit(main())
