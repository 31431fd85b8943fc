/**
 * Entry point. `#expert` in the URL opens the expert area; anything
 * else is the student area. Exported mount functions double as the test
 * surface.
 */

import { Api } from "./api.js";
import { App } from "./app.js";
import { ExpertArea, renderExpert } from "./expert.js";
import { render } from "./view.js";

/**
 * Global key handling. Keys typed into form fields stay there, except
 * that the goal-alias input commits on Enter and cancels on Escape.
 */
export function wireKeyboard(app: App, target: EventTarget): () => void {
  const handler = (event: Event) => {
    const e = event as KeyboardEvent;
    const t = e.target as HTMLElement | null;
    if (t && (t.tagName === "INPUT" || t.tagName === "TEXTAREA" || t.isContentEditable)) {
      if (t.getAttribute("data-role") === "alias-input") {
        if (e.key === "Enter") {
          e.preventDefault();
          void app.commitAlias((t as HTMLInputElement).value);
        } else if (e.key === "Escape") {
          e.preventDefault();
          app.cancelAlias();
        }
      }
      return;
    }
    const keys = new Set(Object.values(app.keys()));
    if (/^[0-9lk]$/.test(e.key) || keys.has(e.key)) {
      e.preventDefault();
      void app.keyPressed(e.key);
    }
  };
  target.addEventListener("keydown", handler);
  return () => target.removeEventListener("keydown", handler);
}

export async function mountStudent(
  root: HTMLElement,
  api: Api,
  keyTarget: EventTarget,
): Promise<{ app: App; dispose: () => void }> {
  const app = new App(api);
  app.onChange = () => render(app, root);
  const dispose = wireKeyboard(app, keyTarget);
  await app.start();
  return { app, dispose };
}

export function mountExpert(root: HTMLElement, api: Api): ExpertArea {
  const area = new ExpertArea(api);
  area.onChange = () => renderExpert(area, root);
  area.onChange();
  return area;
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new Api("/api/v1");
  if (window.location.hash === "#expert") {
    mountExpert(root, api);
  } else {
    void mountStudent(root, api, window);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
