/**
 * The student area as a keyboard-driven state machine, free of DOM
 * concerns. Frames follow the drill flow: pick a goal, pick a pattern,
 * pick the values, drill; a stats frame closes the loop. The view layer
 * renders `App` and forwards keystrokes to `keyPressed`.
 */

import {
  Api,
  ApiError,
  type Feedback,
  type Model,
  type NavStep,
  type PatternDetail,
  type Prefs,
  type Preview,
  type SessionStats,
  type Stimulus,
} from "./api.js";
import {
  aliasedLabel,
  defaultPrefs,
  effectiveKeys,
  withGoalAlias,
  withoutAliases,
} from "./prefs.js";

export type Frame = "goal_choice" | "pattern_choice" | "value_choice" | "drill" | "stats";

/** Drill sub-phases; reporting waits for the server, no optimistic UI. */
export type DrillPhase = "model" | "awaiting" | "revealed" | "feedback" | "done";

export interface ValueRow {
  variable: string;
  index: number;
  label: string;
  target: string;
  selected: boolean;
}

export class App {
  frame: Frame = "goal_choice";
  prefs: Prefs = defaultPrefs();
  uiStrings: Record<string, string> = {};
  languages: string[] = [];
  lastError = "";

  // goal frame
  path: string[] = [];
  chain: NavStep[] = [];
  children: NavStep[] = [];
  patternIds: string[] = [];
  /** Alias key pressed; the next digit names the child to rename. */
  aliasPending = false;
  /** Child index an alias is being typed for, or null. */
  aliasTarget: number | null = null;

  // pattern and value frames
  pattern: PatternDetail | null = null;
  preview: Preview | null = null;
  picks: Map<string, Set<number>> = new Map();

  // drill frame
  sessionId = "";
  phase: DrillPhase = "model";
  model: Model | null = null;
  stimulus: Stimulus | null = null;
  answer: { sentence: string; kana_sentence: string } | null = null;
  feedback: Feedback | null = null;
  stats: SessionStats | null = null;

  /** The view re-renders on every change notification. */
  onChange: () => void = () => {};

  constructor(private api: Api) {}

  async start(name?: string): Promise<void> {
    await this.api.studentEnter(name);
    this.prefs = await this.api.getPrefs();
    this.languages = (await this.api.languages()).languages;
    const ui = await this.api.uiStrings(this.prefs.language);
    this.uiStrings = ui.strings;
    await this.loadGoal([]);
  }

  /** Server label unless the student renamed the goal for themselves. */
  label(step: NavStep): string {
    return aliasedLabel(this.prefs, step.id, step.label);
  }

  keys(): Record<string, string> {
    return effectiveKeys(this.prefs);
  }

  text(key: string, fallback: string): string {
    return this.uiStrings[key] ?? fallback;
  }

  // ---------------------------------------------------------- navigation

  private async loadGoal(path: string[]): Promise<void> {
    const nav = await this.api.navigate(path, this.prefs.language);
    this.path = path;
    this.chain = nav.chain;
    this.children = nav.children;
    this.patternIds = nav.pattern_ids;
    this.aliasTarget = null;
    this.frame = this.patternIds.length > 0 ? "pattern_choice" : "goal_choice";
    this.onChange();
  }

  private async chooseGoal(index: number): Promise<void> {
    const child = this.children[index];
    if (!child) return;
    await this.loadGoal([...this.path, child.label]);
  }

  private async choosePattern(index: number): Promise<void> {
    const pid = this.patternIds[index];
    if (!pid) return;
    this.pattern = await this.api.pattern(pid);
    this.preview = await this.api.preview(pid);
    this.picks = new Map(
      this.pattern.variables.map((v) => [
        v.name,
        new Set((this.pattern!.values[v.name] ?? []).map((_, i) => i)),
      ]),
    );
    this.frame = "value_choice";
    this.onChange();
  }

  /** Value rows across all variables, in menu order for digit keys. */
  valueRows(): ValueRow[] {
    if (!this.pattern) return [];
    const rows: ValueRow[] = [];
    for (const variable of this.pattern.variables) {
      const values = this.pattern.values[variable.name] ?? [];
      values.forEach((renderings, index) => {
        rows.push({
          variable: variable.name,
          index,
          label: renderings[this.prefs.language] ?? renderings["en"] ?? "?",
          target: renderings[this.targetLanguage()] ?? "",
          selected: this.picks.get(variable.name)?.has(index) ?? false,
        });
      });
    }
    return rows;
  }

  private targetLanguage(): string {
    // the drilled language is whatever the pattern renders beyond the
    // interface and kana renderings
    if (!this.pattern) return "ja";
    const special = new Set([this.prefs.language, "en"]);
    for (const lang of Object.keys(this.pattern.renderings)) {
      if (!special.has(lang) && !lang.endsWith("-kana")) return lang;
    }
    return "ja";
  }

  private toggleValue(rowIndex: number): void {
    const row = this.valueRows()[rowIndex];
    if (!row) return;
    const set = this.picks.get(row.variable);
    if (!set) return;
    if (set.has(row.index)) {
      set.delete(row.index);
    } else {
      set.add(row.index);
    }
    this.onChange();
  }

  // ------------------------------------------------------------ drilling

  private async startSession(): Promise<void> {
    if (!this.pattern) return;
    const picks: Record<string, Record<string, number[]>> = {};
    const narrowed: Record<string, number[]> = {};
    for (const [variable, set] of this.picks) {
      const all = (this.pattern.values[variable] ?? []).length;
      if (set.size < all) narrowed[variable] = [...set].sort((a, b) => a - b);
    }
    if (Object.keys(narrowed).length > 0) picks[this.pattern.id] = narrowed;
    const session = await this.api.createSession({
      pattern_ids: [this.pattern.id],
      picks: Object.keys(picks).length > 0 ? picks : undefined,
    });
    this.sessionId = session.session_id;
    this.model = session.model;
    this.phase = "model";
    this.stimulus = null;
    this.answer = null;
    this.feedback = null;
    this.stats = null;
    this.frame = "drill";
    this.onChange();
  }

  private async advance(): Promise<void> {
    try {
      this.stimulus = await this.api.nextStimulus(this.sessionId);
      this.answer = null;
      this.feedback = null;
      this.phase = "awaiting";
    } catch (err) {
      if (err instanceof ApiError && err.code === "SessionDone") {
        await this.finish();
        return;
      }
      throw err;
    }
    this.onChange();
  }

  private async revealAnswer(): Promise<void> {
    this.answer = await this.api.reveal(this.sessionId);
    this.phase = "revealed";
    this.onChange();
  }

  private async score(result: "correct" | "incorrect"): Promise<void> {
    const feedback = await this.api.report(this.sessionId, result);
    this.feedback = feedback;
    this.phase = "feedback";
    this.onChange();
    if (feedback.done) await this.finish();
  }

  private async finish(): Promise<void> {
    this.stats = await this.api.stats(this.sessionId);
    this.phase = "done";
    this.frame = "stats";
    this.onChange();
  }

  // ------------------------------------------------------------- aliases

  beginAlias(index: number): void {
    if (this.children[index]) {
      this.aliasTarget = index;
      this.onChange();
    }
  }

  async commitAlias(alias: string): Promise<void> {
    const target = this.aliasTarget === null ? undefined : this.children[this.aliasTarget];
    this.aliasTarget = null;
    if (!target) return;
    this.prefs = await this.api.putPrefs(withGoalAlias(this.prefs, target.id, alias));
    this.onChange();
  }

  cancelAlias(): void {
    this.aliasTarget = null;
    this.onChange();
  }

  async clearAliases(): Promise<void> {
    this.prefs = await this.api.putPrefs(withoutAliases(this.prefs));
    this.onChange();
  }

  async setLanguage(code: string): Promise<void> {
    this.prefs = await this.api.putPrefs({ ...this.prefs, language: code });
    const ui = await this.api.uiStrings(code);
    this.uiStrings = ui.strings;
    await this.loadGoal(this.path);
  }

  async toggleKana(): Promise<void> {
    this.prefs = await this.api.putPrefs({ ...this.prefs, show_kana: !this.prefs.show_kana });
    this.onChange();
  }

  async cycleLanguage(): Promise<void> {
    if (this.languages.length < 2) return;
    const at = this.languages.indexOf(this.prefs.language);
    const next = this.languages[(at + 1) % this.languages.length];
    await this.setLanguage(next);
  }

  // ------------------------------------------------------------ keyboard

  /**
   * One keystroke, one transition. Returns true when the key was
   * consumed, so the view can preventDefault.
   */
  async keyPressed(key: string): Promise<boolean> {
    try {
      return await this.dispatch(key);
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = err.message;
        this.onChange();
        return true;
      }
      throw err;
    }
  }

  private async dispatch(key: string): Promise<boolean> {
    const keys = this.keys();
    this.lastError = "";

    const digit = /^[1-9]$/.test(key) ? Number(key) - 1 : null;

    switch (this.frame) {
      case "goal_choice":
        if (this.aliasPending) {
          this.aliasPending = false;
          if (digit !== null) {
            this.beginAlias(digit);
          } else {
            this.onChange();
          }
          return true;
        }
        if (digit !== null) {
          await this.chooseGoal(digit);
          return true;
        }
        if (key === keys.alias && this.children.length > 0) {
          this.aliasPending = true;
          this.onChange();
          return true;
        }
        if (key === "0") {
          await this.clearAliases();
          return true;
        }
        if (key === "l") {
          await this.cycleLanguage();
          return true;
        }
        if (key === keys.back && this.path.length > 0) {
          await this.loadGoal(this.path.slice(0, -1));
          return true;
        }
        return false;

      case "pattern_choice":
        if (digit !== null) {
          await this.choosePattern(digit);
          return true;
        }
        if (key === keys.back) {
          await this.loadGoal(this.path.slice(0, -1));
          return true;
        }
        return false;

      case "value_choice":
        if (digit !== null) {
          this.toggleValue(digit);
          return true;
        }
        if (key === keys.confirm) {
          await this.startSession();
          return true;
        }
        if (key === keys.back) {
          this.frame = "pattern_choice";
          this.onChange();
          return true;
        }
        return false;

      case "drill":
        if (key === keys.reveal || key === keys.confirm) {
          if (this.phase === "model" || this.phase === "feedback") {
            await this.advance();
            return true;
          }
          if (this.phase === "awaiting") {
            await this.revealAnswer();
            return true;
          }
          return false;
        }
        if (this.phase === "revealed") {
          if (key === keys.correct) {
            await this.score("correct");
            return true;
          }
          if (key === keys.wrong) {
            await this.score("incorrect");
            return true;
          }
        }
        if (key === "k") {
          await this.toggleKana();
          return true;
        }
        if (key === keys.back) {
          await this.finish();
          return true;
        }
        return false;

      case "stats":
        if (key === keys.back || key === keys.confirm) {
          await this.api.closeSession(this.sessionId).catch(() => undefined);
          this.sessionId = "";
          await this.loadGoal([]);
          return true;
        }
        return false;
    }
  }
}
