/**
 * DOM rendering for the student area. One column, no animation; every
 * control answers to the keyboard. The substituted parts of a revealed
 * sentence are underlined.
 */

import type { App } from "./app.js";
import { clear, el } from "./dom.js";
import { markSubstitutions } from "./highlight.js";

export function render(app: App, root: HTMLElement): void {
  clear(root);
  root.append(header(app));
  switch (app.frame) {
    case "goal_choice":
      root.append(goalFrame(app));
      break;
    case "pattern_choice":
      root.append(patternFrame(app));
      break;
    case "value_choice":
      root.append(valueFrame(app));
      break;
    case "drill":
      root.append(drillFrame(app));
      break;
    case "stats":
      root.append(statsFrame(app));
      break;
  }
  if (app.lastError) {
    root.append(el("p", { class: "error", "data-role": "error" }, [app.lastError]));
  }
}

function header(app: App): HTMLElement {
  const crumbs = app.chain.map((step) => app.label(step)).join(" / ");
  return el("header", {}, [
    el("h1", {}, [app.text("app_title", "Pattern drills")]),
    el("p", { class: "crumbs", "data-role": "crumbs" }, [crumbs]),
  ]);
}

function hint(text: string): HTMLElement {
  return el("p", { class: "hint" }, [text]);
}

function goalFrame(app: App): HTMLElement {
  const frame = el("section", { "data-frame": "goal_choice" });
  frame.append(el("h2", {}, [app.text("goals", "Goals")]));
  const list = el("ol", { "data-role": "goal-menu" });
  app.children.forEach((child, i) => {
    const item = el("li", { "data-goal-id": child.id }, [`${i + 1}. ${app.label(child)}`]);
    if (app.aliasTarget === i) {
      const input = el("input", {
        type: "text",
        "data-role": "alias-input",
        value: app.label(child),
        "aria-label": "rename goal",
      });
      item.append(" ", input);
      queueMicrotask(() => input.focus());
    }
    list.append(item);
  });
  frame.append(list);
  if (app.aliasPending) {
    frame.append(hint(app.text("alias_prompt", "rename which entry? press its number")));
  }
  frame.append(
    hint(
      app.text(
        "goal_keys",
        "digits choose; a then a digit renames for you only; 0 restores names; Esc goes up",
      ),
    ),
  );
  return frame;
}

function patternFrame(app: App): HTMLElement {
  const frame = el("section", { "data-frame": "pattern_choice" });
  frame.append(el("h2", {}, [app.text("patterns", "Patterns")]));
  const list = el("ol", { "data-role": "pattern-menu" });
  app.patternIds.forEach((pid, i) => {
    list.append(el("li", { "data-pattern-id": pid }, [`${i + 1}. ${pid}`]));
  });
  frame.append(list);
  frame.append(hint(app.text("pattern_keys", "digits choose; Esc goes back")));
  return frame;
}

function valueFrame(app: App): HTMLElement {
  const frame = el("section", { "data-frame": "value_choice" });
  frame.append(el("h2", {}, [app.text("values", "Values")]));
  if (app.pattern) {
    const shown = Object.entries(app.pattern.renderings)
      .map(([lang, text]) => `${lang}: ${text}`)
      .join("\n");
    frame.append(el("pre", { class: "pattern-text" }, [shown]));
  }
  const list = el("ol", { "data-role": "value-menu" });
  app.valueRows().forEach((row, i) => {
    const mark = row.selected ? "[x]" : "[ ]";
    list.append(
      el("li", { "data-variable": row.variable }, [
        `${i + 1}. ${mark} ${row.variable}: ${row.label} (${row.target})`,
      ]),
    );
  });
  frame.append(list);
  if (app.preview) {
    frame.append(
      el("p", { "data-role": "preview-count" }, [
        app.text("preview_count", "sentences in play: ") + String(app.preview.count),
      ]),
    );
  }
  frame.append(hint(app.text("value_keys", "digits toggle; Enter starts; Esc goes back")));
  return frame;
}

function sentenceLine(sentence: string, values: string[], role: string): HTMLElement {
  const line = el("p", { class: "sentence", "data-role": role });
  for (const run of markSubstitutions(sentence, values)) {
    line.append(run.substituted ? el("u", {}, [run.text]) : run.text);
  }
  return line;
}

/** Target and kana renderings of the pattern's values, for underlining. */
function valueStrings(app: App): { target: string[]; kana: string[] } {
  const target: string[] = [];
  const kana: string[] = [];
  for (const row of app.valueRows()) {
    if (row.target) target.push(row.target);
  }
  if (app.pattern) {
    for (const values of Object.values(app.pattern.values)) {
      for (const renderings of values) {
        for (const [lang, text] of Object.entries(renderings)) {
          if (lang.endsWith("-kana") && text) kana.push(text);
        }
      }
    }
  }
  return { target, kana };
}

function drillFrame(app: App): HTMLElement {
  const frame = el("section", { "data-frame": "drill" });
  const keys = app.keys();
  const { target, kana } = valueStrings(app);

  if (app.phase === "model" && app.model) {
    frame.append(el("h2", {}, [app.text("model", "Model")]));
    frame.append(el("p", { class: "pattern-text" }, [app.model.pattern_text]));
    frame.append(el("p", { "data-role": "model-stimulus" }, [app.model.stimulus]));
    frame.append(sentenceLine(app.model.sentence, target, "model-sentence"));
    if (app.prefs.show_kana && app.model.kana_sentence) {
      frame.append(sentenceLine(app.model.kana_sentence, kana, "model-kana"));
    }
    frame.append(hint(app.text("model_keys", "Space begins")));
    return frame;
  }

  if (app.stimulus) {
    frame.append(el("h2", {}, [app.text("stimulus", "Stimulus")]));
    frame.append(
      el("p", { class: "stimulus", "data-role": "stimulus" }, [app.stimulus.text]),
    );
    frame.append(
      el("p", { class: "remaining" }, [
        `${app.stimulus.position}) ${app.stimulus.remaining} ${app.text("left", "left")}`,
      ]),
    );
  }

  if (app.phase === "awaiting") {
    frame.append(hint(app.text("awaiting_keys", "say the sentence, then Space reveals")));
  }

  if (app.phase === "revealed" && app.answer) {
    frame.append(sentenceLine(app.answer.sentence, target, "answer"));
    if (app.prefs.show_kana && app.answer.kana_sentence) {
      frame.append(sentenceLine(app.answer.kana_sentence, kana, "answer-kana"));
    }
    frame.append(
      hint(`${keys.correct} = ${app.text("correct", "correct")}, ${keys.wrong} = ${app.text("wrong", "wrong")}`),
    );
  }

  if (app.phase === "feedback" && app.feedback) {
    frame.append(sentenceLine(app.feedback.sentence, target, "answer"));
    const note = app.feedback.removed
      ? app.text("retired", "retired")
      : app.feedback.verification === "correct"
        ? app.text("again_once", "comes back once more")
        : app.text("again_soon", "returns shortly");
    frame.append(el("p", { "data-role": "feedback" }, [note]));
    frame.append(hint(app.text("feedback_keys", "Space continues")));
  }

  return frame;
}

function statsFrame(app: App): HTMLElement {
  const frame = el("section", { "data-frame": "stats" });
  frame.append(el("h2", {}, [app.text("stats", "Session")]));
  if (app.stats) {
    frame.append(
      el("p", { "data-role": "totals" }, [
        `${app.stats.total_presentations} ${app.text("presentations", "presentations")}, ` +
          `${app.stats.total_errors} ${app.text("errors", "errors")}`,
      ]),
    );
    const table = el("table", { "data-role": "pattern-stats" });
    table.append(
      el("tr", {}, [
        el("th", {}, [app.text("pattern", "pattern")]),
        el("th", {}, [app.text("shown", "shown")]),
        el("th", {}, [app.text("errors", "errors")]),
        el("th", {}, [app.text("error_rate", "error rate")]),
      ]),
    );
    for (const row of app.stats.patterns) {
      table.append(
        el("tr", {}, [
          el("td", {}, [row.pattern_id]),
          el("td", {}, [String(row.presentations)]),
          el("td", {}, [String(row.errors)]),
          el("td", {}, [`${Math.round(row.error_rate * 100)}%`]),
        ]),
      );
    }
    frame.append(table);
  }
  frame.append(hint(app.text("stats_keys", "Enter returns to the goals")));
  return frame;
}
