/**
 * The expert area: authentication, content forms, bundle exchange with
 * per-record error reporting, full-enumeration preview, the flat table
 * view, backups, and a language-pack editor with the transliteration
 * grid. Plain forms; the server does all checking.
 */

import { Api, ApiError, type ImportReport, type LanguagePack } from "./api.js";
import { clear, el } from "./dom.js";

export class ExpertArea {
  role: string | null = null;
  message = "";
  report: ImportReport | null = null;
  previewSentences: string[] = [];
  tableRows: [string, string, string, string[]][] = [];
  backups: { path: string; timestamp: string }[] = [];
  pack: LanguagePack | null = null;

  onChange: () => void = () => {};

  constructor(private api: Api) {}

  private async guard<T>(work: () => Promise<T>): Promise<T | undefined> {
    try {
      const out = await work();
      this.onChange();
      return out;
    } catch (err) {
      if (err instanceof ApiError) {
        this.message = err.message;
        this.onChange();
        return undefined;
      }
      throw err;
    }
  }

  async login(username: string, password: string): Promise<void> {
    await this.guard(async () => {
      this.role = await this.api.expertLogin(username, password);
      this.message = "";
    });
  }

  async addGoal(name: string, parentPath: string): Promise<void> {
    await this.guard(async () => {
      const nav = await this.api.navigate(splitPath(parentPath));
      await this.api.addGoal(name, nav.goal.id);
      this.message = `goal ${name} added`;
    });
  }

  async addPattern(goalPath: string, id: string, renderingLines: string): Promise<void> {
    await this.guard(async () => {
      const nav = await this.api.navigate(splitPath(goalPath));
      const renderings: Record<string, string> = {};
      for (const line of renderingLines.split("\n")) {
        const at = line.indexOf(":");
        if (at < 0) continue;
        renderings[line.slice(0, at).trim()] = line.slice(at + 1).trim();
      }
      await this.api.addPattern({ goal_id: nav.goal.id, renderings, id: id || undefined });
      this.message = `pattern ${id || "(generated id)"} added`;
    });
  }

  /** One value per line, renderings as `lang=text` pairs split on `;`. */
  async setValues(pid: string, variable: string, lines: string): Promise<void> {
    await this.guard(async () => {
      const values: Record<string, string>[] = [];
      for (const line of lines.split("\n")) {
        if (!line.trim()) continue;
        const renderings: Record<string, string> = {};
        for (const pair of line.split(";")) {
          const at = pair.indexOf("=");
          if (at < 0) continue;
          renderings[pair.slice(0, at).trim()] = pair.slice(at + 1).trim();
        }
        values.push(renderings);
      }
      await this.api.putValues(pid, variable, values);
      this.message = `${values.length} values set on ${pid}.${variable}`;
    });
  }

  async importBundle(text: string): Promise<void> {
    await this.guard(async () => {
      let bundle: unknown;
      try {
        bundle = JSON.parse(text);
      } catch {
        this.message = "not JSON";
        return;
      }
      this.report = await this.api.importBundle(bundle);
      this.message = this.report.ok ? "imported clean" : "imported with errors";
    });
  }

  async loadPreview(pid: string): Promise<void> {
    await this.guard(async () => {
      const preview = await this.api.preview(pid);
      this.previewSentences = preview.sentences;
      this.message = `${preview.count} sentences`;
    });
  }

  async loadTable(): Promise<void> {
    await this.guard(async () => {
      const table = await this.api.table();
      this.tableRows = table.rows;
    });
  }

  async refreshBackups(): Promise<void> {
    await this.guard(async () => {
      this.backups = (await this.api.listBackups()).backups;
    });
  }

  async makeBackup(): Promise<void> {
    await this.guard(async () => {
      const snap = await this.api.makeBackup();
      this.message = `backup at ${snap.path}`;
      this.backups = (await this.api.listBackups()).backups;
    });
  }

  async restore(path: string): Promise<void> {
    await this.guard(async () => {
      await this.api.restore(path);
      this.message = `restored ${path}`;
    });
  }

  async loadPack(code: string): Promise<void> {
    await this.guard(async () => {
      this.pack = await this.api.getPack(code);
    });
  }

  async installPack(pack: LanguagePack): Promise<void> {
    await this.guard(async () => {
      await this.api.installPack(pack);
      this.message = `pack ${pack.code} installed`;
    });
  }
}

function splitPath(path: string): string[] {
  return path
    .split("/")
    .map((seg) => seg.trim())
    .filter((seg) => seg.length > 0);
}

// ------------------------------------------------------------- rendering

export function renderExpert(area: ExpertArea, root: HTMLElement): void {
  clear(root);
  root.append(el("h1", {}, ["Expert area"]));
  if (area.message) root.append(el("p", { "data-role": "message" }, [area.message]));
  if (area.role === null) {
    root.append(loginForm(area));
    return;
  }
  root.append(goalForm(area));
  root.append(patternForm(area));
  root.append(valuesForm(area));
  root.append(bundlePanel(area));
  root.append(previewPanel(area));
  root.append(tablePanel(area));
  root.append(backupPanel(area));
  root.append(packPanel(area));
}

function field(label: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, [label + " ", input]);
}

function loginForm(area: ExpertArea): HTMLElement {
  const user = el("input", { type: "text", "data-role": "login-user" });
  const pass = el("input", { type: "password", "data-role": "login-pass" });
  const button = el("button", { "data-role": "login-go" }, ["log in"]);
  button.addEventListener("click", () => void area.login(user.value, pass.value));
  pass.addEventListener("keydown", (e) => {
    if (e.key === "Enter") void area.login(user.value, pass.value);
  });
  return el("section", { "data-panel": "login" }, [
    el("h2", {}, ["Log in"]),
    field("name", user),
    field("password", pass),
    button,
  ]);
}

function goalForm(area: ExpertArea): HTMLElement {
  const name = el("input", { type: "text", "data-role": "goal-name" });
  const parent = el("input", {
    type: "text",
    "data-role": "goal-parent",
    placeholder: "parent path, blank for top level",
  });
  const button = el("button", { "data-role": "goal-go" }, ["add goal"]);
  button.addEventListener("click", () => void area.addGoal(name.value, parent.value));
  return el("section", { "data-panel": "goal" }, [
    el("h2", {}, ["New goal"]),
    field("name", name),
    field("under", parent),
    button,
  ]);
}

function patternForm(area: ExpertArea): HTMLElement {
  const goal = el("input", { type: "text", "data-role": "pattern-goal" });
  const id = el("input", { type: "text", "data-role": "pattern-id" });
  const renderings = el("textarea", {
    rows: "4",
    "data-role": "pattern-renderings",
    placeholder: "en: This is <name>.\nja: Kochira wa <name> desu.",
  });
  const button = el("button", { "data-role": "pattern-go" }, ["add pattern"]);
  button.addEventListener("click", () =>
    void area.addPattern(goal.value, id.value, renderings.value),
  );
  return el("section", { "data-panel": "pattern" }, [
    el("h2", {}, ["New pattern"]),
    field("goal path", goal),
    field("id", id),
    field("renderings", renderings),
    button,
  ]);
}

function valuesForm(area: ExpertArea): HTMLElement {
  const pid = el("input", { type: "text", "data-role": "values-pattern" });
  const variable = el("input", { type: "text", "data-role": "values-variable" });
  const lines = el("textarea", {
    rows: "4",
    "data-role": "values-lines",
    placeholder: "en=Mr; ja=san; ja-kana=さん",
  });
  const button = el("button", { "data-role": "values-go" }, ["set values"]);
  button.addEventListener("click", () =>
    void area.setValues(pid.value, variable.value, lines.value),
  );
  return el("section", { "data-panel": "values" }, [
    el("h2", {}, ["Values"]),
    field("pattern", pid),
    field("variable", variable),
    field("one per line", lines),
    button,
  ]);
}

function bundlePanel(area: ExpertArea): HTMLElement {
  const text = el("textarea", { rows: "6", "data-role": "bundle-text" });
  const button = el("button", { "data-role": "bundle-go" }, ["import bundle"]);
  button.addEventListener("click", () => void area.importBundle(text.value));
  const section = el("section", { "data-panel": "bundle" }, [
    el("h2", {}, ["Bundle import"]),
    text,
    button,
  ]);
  if (area.report) {
    section.append(
      el("p", {}, [
        `${area.report.goals_created.length} goals, ` +
          `${area.report.patterns_created.length} patterns, ` +
          `${area.report.values_created} values`,
      ]),
    );
    const errors = el("ul", { "data-role": "record-errors" });
    for (const err of area.report.errors) {
      errors.append(
        el("li", {}, [`record ${err.index} (${err.goal || "?"}): ${err.error}: ${err.message}`]),
      );
    }
    section.append(errors);
  }
  return section;
}

function previewPanel(area: ExpertArea): HTMLElement {
  const pid = el("input", { type: "text", "data-role": "preview-pattern" });
  const button = el("button", { "data-role": "preview-go" }, ["preview all sentences"]);
  button.addEventListener("click", () => void area.loadPreview(pid.value));
  const list = el("ol", { "data-role": "preview-list" });
  for (const sentence of area.previewSentences) {
    list.append(el("li", {}, [sentence]));
  }
  return el("section", { "data-panel": "preview" }, [
    el("h2", {}, ["Enumeration preview"]),
    field("pattern", pid),
    button,
    list,
  ]);
}

function tablePanel(area: ExpertArea): HTMLElement {
  const button = el("button", { "data-role": "table-go" }, ["refresh table"]);
  button.addEventListener("click", () => void area.loadTable());
  const table = el("table", { "data-role": "content-table" });
  table.append(
    el("tr", {}, [
      el("th", {}, ["goal"]),
      el("th", {}, ["pattern"]),
      el("th", {}, ["variable"]),
      el("th", {}, ["values"]),
    ]),
  );
  for (const [goal, pattern, variable, values] of area.tableRows) {
    table.append(
      el("tr", {}, [
        el("td", {}, [goal]),
        el("td", {}, [pattern]),
        el("td", {}, [variable]),
        el("td", {}, [values.join(", ")]),
      ]),
    );
  }
  return el("section", { "data-panel": "table" }, [el("h2", {}, ["Content table"]), button, table]);
}

function backupPanel(area: ExpertArea): HTMLElement {
  const make = el("button", { "data-role": "backup-make" }, ["make backup"]);
  make.addEventListener("click", () => void area.makeBackup());
  const refresh = el("button", { "data-role": "backup-refresh" }, ["refresh list"]);
  refresh.addEventListener("click", () => void area.refreshBackups());
  const list = el("ul", { "data-role": "backup-list" });
  for (const snap of area.backups) {
    const restore = el("button", {}, ["restore"]);
    restore.addEventListener("click", () => void area.restore(snap.path));
    list.append(el("li", {}, [`${snap.timestamp} ${snap.path} `, restore]));
  }
  return el("section", { "data-panel": "backups" }, [
    el("h2", {}, ["Backups"]),
    make,
    refresh,
    list,
  ]);
}

function packPanel(area: ExpertArea): HTMLElement {
  const code = el("input", { type: "text", "data-role": "pack-code", placeholder: "en" });
  const load = el("button", { "data-role": "pack-load" }, ["load pack"]);
  load.addEventListener("click", () => void area.loadPack(code.value));
  const section = el("section", { "data-panel": "pack" }, [
    el("h2", {}, ["Language packs"]),
    field("code", code),
    load,
  ]);
  if (area.pack) {
    const strings = el("table", { "data-role": "ui-strings" });
    const stringInputs = new Map<string, HTMLInputElement>();
    for (const [key, text] of Object.entries(area.pack.ui_strings)) {
      const input = el("input", { type: "text", value: text });
      stringInputs.set(key, input);
      strings.append(el("tr", {}, [el("td", {}, [key]), el("td", {}, [input])]));
    }
    const grid = el("table", { "data-role": "kana-grid", class: "kana-grid" });
    const gridInputs = new Map<string, HTMLInputElement>();
    for (const [symbol, roman] of Object.entries(area.pack.transliteration)) {
      const input = el("input", { type: "text", value: roman, size: "4" });
      gridInputs.set(symbol, input);
      grid.append(el("tr", {}, [el("td", {}, [symbol]), el("td", {}, [input])]));
    }
    const newCode = el("input", { type: "text", value: area.pack.code, "data-role": "pack-new-code" });
    const install = el("button", { "data-role": "pack-install" }, ["install as"]);
    install.addEventListener("click", () => {
      const ui: Record<string, string> = {};
      for (const [key, input] of stringInputs) ui[key] = input.value;
      const translit: Record<string, string> = {};
      for (const [symbol, input] of gridInputs) translit[symbol] = input.value;
      void area.installPack({ code: newCode.value, ui_strings: ui, transliteration: translit });
    });
    section.append(
      el("h3", {}, ["Interface strings"]),
      strings,
      el("h3", {}, ["Transliteration grid"]),
      grid,
      field("install as", newCode),
      install,
    );
  }
  return section;
}
