/**
 * Typed client for the tutor's HTTP API. Everything the UI shows comes
 * through here; the client computes nothing itself.
 */

export interface GoalView {
  id: string;
  label: string;
  pattern_ids: string[];
  children: GoalView[];
}

export interface NavStep {
  id: string;
  label: string;
}

export interface Navigation {
  goal: { id: string; names: Record<string, string>; path: string[] };
  chain: NavStep[];
  children: NavStep[];
  pattern_ids: string[];
}

export interface VariableInfo {
  name: string;
  category: string;
  aliases: Record<string, string>;
}

export interface PatternDetail {
  id: string;
  goal_id: string;
  renderings: Record<string, string>;
  variables: VariableInfo[];
  values: Record<string, Record<string, string>[]>;
}

export interface Preview {
  pattern_id: string;
  language: string;
  count: number;
  sentences: string[];
}

export interface Model {
  item_key: string;
  pattern_text: string;
  stimulus: string;
  sentence: string;
  kana_sentence: string;
}

export interface Stimulus {
  item_key: string;
  text: string;
  position: number;
  remaining: number;
}

export interface Feedback {
  item_key: string;
  sentence: string;
  kana_sentence: string;
  verification: "correct" | "incorrect";
  removed: boolean;
  streak: number;
  done: boolean;
}

export interface SessionStart {
  session_id: string;
  phase: string;
  remaining: number;
  model: Model;
}

export interface PatternStats {
  pattern_id: string;
  presentations: number;
  errors: number;
  error_rate: number;
}

export interface SessionStats {
  patterns: PatternStats[];
  items: { item_key: string; presentations: number; corrects: number; errors: number }[];
  total_presentations: number;
  total_errors: number;
}

export interface CounterClass {
  name: string;
  display: string;
  numbers: number[];
}

export interface ImportReport {
  ok: boolean;
  goals_created: string[];
  patterns_created: string[];
  values_created: number;
  errors: { index: number; goal: string; error: string; message: string }[];
}

export interface LanguagePack {
  code: string;
  ui_strings: Record<string, string>;
  transliteration: Record<string, string>;
}

/** The preference payload; unknown keys round-trip through the server. */
export interface Prefs {
  language: string;
  show_kana: boolean;
  goal_aliases?: Record<string, string>;
  variable_aliases?: Record<string, string>;
  keys?: Record<string, string>;
  [key: string]: unknown;
}

export interface SessionRequest {
  pattern_ids?: string[];
  picks?: Record<string, Record<string, number[]>>;
  counters?: { mode: string; classes?: string[]; numbers?: number[] };
  removal_streak?: number;
  reinsert_window?: number;
  order?: "shuffled" | "fixed";
  seed?: number;
  max_rounds?: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

/**
 * Outside a browser there is no cookie jar, so the client keeps the
 * dt_prefs cookie itself when the response exposes Set-Cookie.
 */
export interface CookieJar {
  cookie: string | null;
}

export class Api {
  token: string | null = null;

  constructor(
    private base: string = "/api/v1",
    private jar: CookieJar | null = null,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (this.jar?.cookie) headers["Cookie"] = this.jar.cookie;
    const resp = await fetch(this.base + path, {
      method,
      headers,
      credentials: "same-origin",
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    this.captureCookie(resp);
    if (!resp.ok) {
      let code = "HttpError";
      let detail = resp.statusText;
      try {
        const data = await resp.json();
        if (data && typeof data.error === "string") {
          code = data.error;
          detail = data.detail ?? "";
        } else if (data && data.detail) {
          code = "RequestInvalid";
          detail = JSON.stringify(data.detail);
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, code, detail);
    }
    return resp.json() as Promise<T>;
  }

  private captureCookie(resp: Response): void {
    if (!this.jar) return;
    const getter = (resp.headers as unknown as { getSetCookie?: () => string[] }).getSetCookie;
    const cookies = getter ? getter.call(resp.headers) : [];
    for (const line of cookies) {
      if (line.startsWith("dt_prefs=")) {
        this.jar.cookie = line.split(";")[0];
      }
    }
  }

  // ------------------------------------------------------------- public

  health(): Promise<{ ok: boolean; version: string }> {
    return this.request("GET", "/health");
  }

  languages(): Promise<{ languages: string[] }> {
    return this.request("GET", "/languages");
  }

  uiStrings(language?: string): Promise<{ language: string; strings: Record<string, string> }> {
    return this.request("GET", "/ui" + (language ? `?language=${encodeURIComponent(language)}` : ""));
  }

  async studentEnter(name?: string): Promise<string> {
    const r = await this.request<{ token: string }>("POST", "/student/enter", { name });
    this.token = r.token;
    return r.token;
  }

  async expertLogin(username: string, password: string): Promise<string> {
    const r = await this.request<{ token: string; role: string }>("POST", "/expert/login", {
      username,
      password,
    });
    this.token = r.token;
    return r.role;
  }

  async expertLogout(): Promise<void> {
    await this.request("POST", "/expert/logout");
    this.token = null;
  }

  getPrefs(): Promise<Prefs> {
    return this.request("GET", "/prefs");
  }

  putPrefs(prefs: Prefs): Promise<Prefs> {
    return this.request("PUT", "/prefs", prefs);
  }

  // --------------------------------------------------------- navigation

  getTree(language?: string): Promise<GoalView> {
    return this.request("GET", "/tree" + (language ? `?language=${encodeURIComponent(language)}` : ""));
  }

  navigate(path: (string | number)[], language?: string): Promise<Navigation> {
    return this.request("POST", "/navigate", { path, language });
  }

  pattern(pid: string): Promise<PatternDetail> {
    return this.request("GET", `/patterns/${encodeURIComponent(pid)}`);
  }

  preview(pid: string, language?: string): Promise<Preview> {
    const q = language ? `?language=${encodeURIComponent(language)}` : "";
    return this.request("GET", `/patterns/${encodeURIComponent(pid)}/preview${q}`);
  }

  counters(): Promise<{ modes: string[]; classes: CounterClass[] }> {
    return this.request("GET", "/counters");
  }

  // ----------------------------------------------------------- drilling

  createSession(req: SessionRequest): Promise<SessionStart> {
    return this.request("POST", "/sessions", req);
  }

  nextStimulus(sid: string): Promise<Stimulus> {
    return this.request("POST", `/sessions/${sid}/next`);
  }

  reveal(sid: string): Promise<{ sentence: string; kana_sentence: string }> {
    return this.request("POST", `/sessions/${sid}/reveal`);
  }

  report(sid: string, result: "correct" | "incorrect"): Promise<Feedback> {
    return this.request("POST", `/sessions/${sid}/report`, { result });
  }

  stats(sid: string): Promise<SessionStats> {
    return this.request("GET", `/sessions/${sid}/stats`);
  }

  closeSession(sid: string): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/sessions/${sid}`);
  }

  // ------------------------------------------------------------- expert

  addGoal(names: Record<string, string> | string, parentId?: string): Promise<unknown> {
    return this.request("POST", "/expert/goals", { names, parent_id: parentId });
  }

  renameGoal(gid: string, names: Record<string, string> | string): Promise<unknown> {
    return this.request("PATCH", `/expert/goals/${encodeURIComponent(gid)}`, { names });
  }

  deleteGoal(gid: string, cascade = false): Promise<{ removed: string[] }> {
    return this.request("DELETE", `/expert/goals/${encodeURIComponent(gid)}?cascade=${cascade}`);
  }

  addPattern(body: {
    goal_id: string;
    renderings: Record<string, string>;
    id?: string;
    variables?: { name: string; category?: string }[];
  }): Promise<PatternDetail> {
    return this.request("POST", "/expert/patterns", body);
  }

  deletePattern(pid: string): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/expert/patterns/${encodeURIComponent(pid)}`);
  }

  putValues(pid: string, variable: string, values: Record<string, string>[]): Promise<PatternDetail> {
    return this.request(
      "PUT",
      `/expert/patterns/${encodeURIComponent(pid)}/values/${encodeURIComponent(variable)}`,
      { values },
    );
  }

  async exportBundle(): Promise<string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const resp = await fetch(this.base + "/expert/export", { headers, credentials: "same-origin" });
    if (!resp.ok) throw new ApiError(resp.status, "HttpError", resp.statusText);
    return resp.text();
  }

  importBundle(bundle: unknown): Promise<ImportReport> {
    return this.request("POST", "/expert/import", bundle);
  }

  table(): Promise<{ header: string[]; rows: [string, string, string, string[]][] }> {
    return this.request("GET", "/expert/table");
  }

  makeBackup(): Promise<{ path: string; timestamp: string; version: number }> {
    return this.request("POST", "/expert/backups");
  }

  listBackups(): Promise<{ backups: { path: string; timestamp: string; version: number }[] }> {
    return this.request("GET", "/expert/backups");
  }

  restore(path: string): Promise<{ ok: boolean }> {
    return this.request("POST", "/expert/restore", { path });
  }

  installPack(pack: LanguagePack): Promise<{ languages: string[] }> {
    return this.request("POST", "/expert/packs", pack);
  }

  getPack(code: string): Promise<LanguagePack> {
    return this.request("GET", `/expert/packs/${encodeURIComponent(code)}`);
  }
}
