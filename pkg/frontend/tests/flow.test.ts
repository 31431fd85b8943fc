/**
 * End-to-end tests against a live service: the student flow driven only
 * by synthetic keystrokes, goal renaming as a client-side preference,
 * and the expert enumeration preview.
 */

import { request as httpRequest } from "node:http";
import { afterAll, afterEach, beforeAll, expect, it } from "vitest";
import { Api } from "../src/api.js";
import { mountExpert, mountStudent } from "../src/main.js";
import { startServer, type TestServer } from "./server.js";

let server: TestServer;
let root: HTMLElement;
let disposers: (() => void)[] = [];

beforeAll(async () => {
  server = await startServer();
});

afterAll(() => {
  server?.stop();
});

afterEach(() => {
  for (const dispose of disposers) dispose();
  disposers = [];
  root?.remove();
});

function freshRoot(): HTMLElement {
  root = document.createElement("main");
  document.body.append(root);
  return root;
}

function press(key: string, target: EventTarget = window): void {
  target.dispatchEvent(
    new KeyboardEvent("keydown", { key, bubbles: true, cancelable: true }),
  );
}

async function until(check: () => boolean, what: string): Promise<void> {
  const deadline = Date.now() + 8000;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((tick) => setTimeout(tick, 10));
  }
  throw new Error(`timed out waiting for ${what}\n--- document ---\n${root?.innerHTML}`);
}

function frame(): string {
  return root.querySelector("[data-frame]")?.getAttribute("data-frame") ?? "";
}

function textOf(selector: string): string {
  return root.querySelector(selector)?.textContent ?? "";
}

function menuItems(selector: string): string[] {
  return [...root.querySelectorAll(`${selector} li`)].map(
    (item) => item.textContent ?? "",
  );
}

/** A plain GET outside the page: another client with an empty cookie jar. */
function freshClientGet(
  url: string,
  headers: Record<string, string>,
): Promise<{ status: number; body: unknown }> {
  return new Promise((ok, fail) => {
    const req = httpRequest(url, { method: "GET", headers }, (res) => {
      let data = "";
      res.on("data", (chunk) => (data += chunk));
      res.on("end", () => ok({ status: res.statusCode ?? 0, body: JSON.parse(data) }));
    });
    req.on("error", fail);
    req.end();
  });
}

/** Every sentence present-1 can make, written out from the starter
 *  content by hand: title then name then origin, the last one changing
 *  fastest, dropped into "Kono kata wa <origin> no <name> <title> desu." */
const ALL_PRESENT_1 = [
  "Kono kata wa doitsu no Shimito san desu.",
  "Kono kata wa nihon no Shimito san desu.",
  "Kono kata wa doitsu no Tsuji san desu.",
  "Kono kata wa nihon no Tsuji san desu.",
  "Kono kata wa doitsu no Shimito sensei desu.",
  "Kono kata wa nihon no Shimito sensei desu.",
  "Kono kata wa doitsu no Tsuji sensei desu.",
  "Kono kata wa nihon no Tsuji sensei desu.",
];

it("takes a student from goal menu to finished drill on keys alone", async () => {
  const mount = await mountStudent(freshRoot(), new Api(server.base), window);
  disposers.push(mount.dispose);

  await until(() => frame() === "goal_choice", "the goal menu");
  expect(menuItems('[data-role="goal-menu"]')).toEqual([
    "1. Present somebody",
    "2. Identify an object",
    "3. Everyday",
  ]);

  press("1");
  await until(() => frame() === "pattern_choice", "the pattern menu");
  expect(menuItems('[data-role="pattern-menu"]')).toEqual([
    "1. present-1",
    "2. present-2",
  ]);

  press("2");
  await until(() => frame() === "value_choice", "the value menu");
  expect(menuItems('[data-role="value-menu"]')).toEqual([
    "1. [x] name: Schmidt (Shimito)",
    "2. [x] name: Tsuji (Tsuji)",
  ]);
  expect(textOf('[data-role="preview-count"]')).toContain("2");

  press("Enter");
  await until(() => frame() === "drill", "the drill to open");
  expect(textOf('[data-role="model-sentence"]')).toMatch(/^Kochira wa .* san desu\.$/);
  const underlined = [...root.querySelectorAll('[data-role="model-sentence"] u')].map(
    (u) => u.textContent,
  );
  expect(underlined).toHaveLength(1);
  expect(["Shimito", "Tsuji"]).toContain(underlined[0]);

  // two items, each retired after two straight correct answers
  for (let step = 0; step < 40 && frame() === "drill"; step++) {
    const before = root.innerHTML;
    if (mount.app.phase === "revealed") {
      press("c");
    } else {
      press(" ");
    }
    await until(
      () => root.innerHTML !== before || frame() !== "drill",
      `progress past step ${step}`,
    );
  }

  await until(() => frame() === "stats", "the session summary");
  expect(textOf('[data-role="totals"]')).toMatch(/^4 \w+, 0 \w+$/);
  expect(textOf('[data-role="pattern-stats"]')).toContain("present-2");

  press("Enter");
  await until(() => frame() === "goal_choice", "the goal menu again");
});

it("renames a goal for this student only", async () => {
  const api = new Api(server.base);
  const mount = await mountStudent(freshRoot(), api, window);
  disposers.push(mount.dispose);
  await until(() => frame() === "goal_choice", "the goal menu");

  press("a");
  await until(() => root.textContent!.includes("rename which entry?"), "the rename prompt");
  press("1");
  await until(
    () => root.querySelector('[data-role="alias-input"]') !== null,
    "the rename input",
  );
  const input = root.querySelector('[data-role="alias-input"]') as HTMLInputElement;
  expect(input.value).toBe("Present somebody");
  input.value = "intros";
  press("Enter", input);
  await until(
    () => menuItems('[data-role="goal-menu"]')[0] === "1. intros",
    "the alias to show",
  );

  // the rename survives a reload: a fresh mount carries the same cookie
  mount.dispose();
  root.remove();
  const again = await mountStudent(freshRoot(), new Api(server.base), window);
  disposers.push(again.dispose);
  await until(
    () => menuItems('[data-role="goal-menu"]')[0] === "1. intros",
    "the alias after a reload",
  );

  // the server's own tree is untouched: a client without the cookie gets
  // the original label, and the stored names never changed at all
  const plain = await freshClientGet(`${server.base}/tree`, {
    Authorization: `Bearer ${api.token}`,
  });
  expect(plain.status).toBe(200);
  const tree = plain.body as { children: { label: string }[] };
  expect(tree.children[0].label).toBe("Present somebody");
  const nav = await api.navigate(["Present somebody"]);
  expect(nav.goal.names["en"]).toBe("Present somebody");

  // 0 drops every alias and the server label shows again
  press("0");
  await until(
    () => menuItems('[data-role="goal-menu"]')[0] === "1. Present somebody",
    "the original label to return",
  );
});

it("treats a remapped correct key exactly like the default", async () => {
  const api = new Api(server.base);
  await api.studentEnter();
  await api.putPrefs({ language: "en", show_kana: true, keys: { correct: "j" } });

  const mount = await mountStudent(freshRoot(), api, window);
  disposers.push(mount.dispose);
  await until(() => frame() === "goal_choice", "the goal menu");

  press("1");
  await until(() => frame() === "pattern_choice", "the pattern menu");
  press("2");
  await until(() => frame() === "value_choice", "the value menu");
  press("Enter");
  await until(() => frame() === "drill", "the drill to open");

  press(" ");
  await until(() => mount.app.phase === "awaiting", "the first stimulus");
  press(" ");
  await until(() => mount.app.phase === "revealed", "the revealed answer");

  // the old binding is dead; the new one scores
  press("c");
  await new Promise((tick) => setTimeout(tick, 100));
  expect(mount.app.phase).toBe("revealed");
  press("j");
  await until(() => mount.app.phase === "feedback", "feedback from the remapped key");
  expect(mount.app.feedback?.verification).toBe("correct");

  await api.putPrefs({ language: "en", show_kana: true });
});

it("previews the full enumeration of a pattern in the expert area", async () => {
  const api = new Api(server.base);
  const panel = freshRoot();
  mountExpert(panel, api);

  (panel.querySelector('[data-role="login-user"]') as HTMLInputElement).value = "ama";
  (panel.querySelector('[data-role="login-pass"]') as HTMLInputElement).value =
    "correct horse";
  (panel.querySelector('[data-role="login-go"]') as HTMLElement).click();
  await until(
    () => panel.querySelector('[data-panel="preview"]') !== null,
    "the expert panels",
  );

  (panel.querySelector('[data-role="preview-pattern"]') as HTMLInputElement).value =
    "present-1";
  (panel.querySelector('[data-role="preview-go"]') as HTMLElement).click();
  await until(
    () => panel.querySelectorAll('[data-role="preview-list"] li').length > 0,
    "the preview sentences",
  );

  const listed = [...panel.querySelectorAll('[data-role="preview-list"] li')].map(
    (item) => item.textContent ?? "",
  );
  expect(listed).toEqual(ALL_PRESENT_1);

  const served = await api.preview("present-1");
  expect(served.sentences).toEqual(listed);
  expect(served.count).toBe(8);

  // a bundle with a bad record comes back as a rendered per-record list
  const bad = {
    format: "drill-bundle",
    version: 1,
    goals: [
      {
        names: { en: "Broken" },
        parent: [],
        patterns: [
          {
            id: "broken-1",
            renderings: { en: "Hi <x>.", ja: "Ya <x> da." },
            variables: [
              {
                name: "x",
                category: "misc",
                values: [{ en: "a", ja: "aa", "ja-kana": "へん" }],
              },
            ],
          },
        ],
      },
    ],
  };
  (panel.querySelector('[data-role="bundle-text"]') as HTMLTextAreaElement).value =
    JSON.stringify(bad);
  (panel.querySelector('[data-role="bundle-go"]') as HTMLElement).click();
  await until(
    () => panel.querySelectorAll('[data-role="record-errors"] li').length > 0,
    "the record error list",
  );
  const errors = [...panel.querySelectorAll('[data-role="record-errors"] li')].map(
    (item) => item.textContent ?? "",
  );
  expect(errors).toEqual(["record 0 (Broken): ConstraintViolation: kana 'へん' reads 'hen', not 'aa'"]);
});
