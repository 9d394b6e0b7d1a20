/** Thin client for the search service.
 *
 * The service serializes scores with exactly 6 decimal places and the UI
 * must show that text verbatim. JSON.parse would turn "0.500000" into 0.5,
 * so result parsing pulls the raw score literals out of the response text
 * and zips them with the parsed entries.
 */

import type { IndexStatus, ObjectInfo, ResultItem, SessionSpec } from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: string;

  constructor(status: number, code: string, detail: string) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

/** Session spec with the exact key order the service documents. */
export function specJson(spec: SessionSpec): string {
  return (
    '{"similarity":' +
    JSON.stringify(spec.similarity) +
    ',"fusion":' +
    JSON.stringify(spec.fusion) +
    ',"k":' +
    String(spec.k) +
    ',"list_depth":' +
    String(spec.list_depth) +
    "}"
  );
}

const SCORE_RE = /"score":(-?[0-9]+(?:\.[0-9]+)?)\}/g;

/** Parse a finalize response, keeping each score literal as written. */
export function parseResults(text: string): ResultItem[] {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new ApiError(0, "bad-response", "results body is not valid JSON");
  }
  const results = (doc as { results?: unknown }).results;
  if (!Array.isArray(results)) {
    throw new ApiError(0, "bad-response", 'results body has no "results" array');
  }
  const raw = Array.from(text.matchAll(SCORE_RE), (m) => m[1]);
  if (raw.length !== results.length) {
    throw new ApiError(0, "bad-response", "score literals do not match entry count");
  }
  return results.map((entry, i) => {
    const e = entry as { object_id?: unknown; category?: unknown };
    if (typeof e.object_id !== "string" || typeof e.category !== "string") {
      throw new ApiError(0, "bad-response", `result ${i} is missing object_id or category`);
    }
    return { object_id: e.object_id, category: e.category, score: raw[i] };
  });
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchFn;

  constructor(base: string, fetchFn?: FetchFn) {
    this.base = base.endsWith("/") ? base.slice(0, -1) : base;
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(path: string, init?: RequestInit): Promise<string> {
    let res: Response;
    try {
      res = await this.fetchFn(this.base + path, init);
    } catch (exc) {
      throw new ApiError(0, "unreachable", String(exc));
    }
    const text = await res.text();
    if (!res.ok) {
      let code = "unknown";
      let detail = text;
      try {
        const doc = JSON.parse(text) as { error?: unknown; detail?: unknown };
        if (typeof doc.error === "string") code = doc.error;
        if (typeof doc.detail === "string") detail = doc.detail;
      } catch {
        // keep raw text as the detail
      }
      throw new ApiError(res.status, code, detail);
    }
    return text;
  }

  async createSession(spec: SessionSpec): Promise<string> {
    const text = await this.request("/v1/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: specJson(spec),
    });
    const doc = JSON.parse(text) as { session_id?: unknown };
    if (typeof doc.session_id !== "string") {
      throw new ApiError(0, "bad-response", "session response has no session_id");
    }
    return doc.session_id;
  }

  async addView(sessionId: string, payload: Uint8Array): Promise<number> {
    const text = await this.request(`/v1/sessions/${sessionId}/views`, {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      // newer lib typings pin BodyInit to ArrayBuffer-backed views; any
      // Uint8Array is valid at runtime
      body: payload as unknown as BodyInit,
    });
    const doc = JSON.parse(text) as { ordinal?: unknown };
    if (typeof doc.ordinal !== "number") {
      throw new ApiError(0, "bad-response", "view response has no ordinal");
    }
    return doc.ordinal;
  }

  async finalize(sessionId: string): Promise<ResultItem[]> {
    const text = await this.request(`/v1/sessions/${sessionId}/finalize`, {
      method: "POST",
    });
    return parseResults(text);
  }

  async getObject(objectId: string): Promise<ObjectInfo> {
    const text = await this.request(`/v1/objects/${encodeURIComponent(objectId)}`, {
      method: "GET",
    });
    return JSON.parse(text) as ObjectInfo;
  }

  async indexStatus(): Promise<IndexStatus> {
    const text = await this.request("/v1/index/status", { method: "GET" });
    return JSON.parse(text) as IndexStatus;
  }
}
