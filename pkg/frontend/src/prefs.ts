/**
 * The preference payload is client-owned state: the server signs it into
 * the dt_prefs cookie and hands it back verbatim. These helpers are pure;
 * persistence happens through Api.putPrefs.
 */

import type { Prefs } from "./api.js";

/** Keyboard defaults: Space reveals, c/x score, digits pick menu rows. */
export const DEFAULT_KEYS: Record<string, string> = {
  reveal: " ",
  correct: "c",
  wrong: "x",
  back: "Escape",
  confirm: "Enter",
  alias: "a",
};

export function defaultPrefs(): Prefs {
  return { language: "en", show_kana: true };
}

/** The active shortcut map: stored overrides on top of the defaults. */
export function effectiveKeys(prefs: Prefs): Record<string, string> {
  return { ...DEFAULT_KEYS, ...(prefs.keys ?? {}) };
}

/** Display label for a goal: the student's alias wins over the server label. */
export function aliasedLabel(prefs: Prefs, goalId: string, serverLabel: string): string {
  return prefs.goal_aliases?.[goalId] ?? serverLabel;
}

/** A new payload with one goal alias set (or removed when empty). */
export function withGoalAlias(prefs: Prefs, goalId: string, alias: string): Prefs {
  const aliases = { ...(prefs.goal_aliases ?? {}) };
  if (alias.trim()) {
    aliases[goalId] = alias.trim();
  } else {
    delete aliases[goalId];
  }
  return { ...prefs, goal_aliases: aliases };
}

/** A new payload with every alias dropped; server labels show again. */
export function withoutAliases(prefs: Prefs): Prefs {
  const next = { ...prefs };
  delete next.goal_aliases;
  delete next.variable_aliases;
  return next;
}
