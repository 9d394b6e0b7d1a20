/** In-memory stand-in for the search service.
 *
 * Implements the five endpoints with the same status codes, error codes,
 * and hand-serialized 6-decimal score bodies as the real server, and logs
 * every request so tests can check wire conformance.
 */

import type { FetchFn } from "../src/api.js";

export interface LoggedRequest {
  method: string;
  path: string;
  contentType: string | null;
  body: string | Uint8Array | null;
}

interface FixtureSession {
  views: Uint8Array[];
  finalized: boolean;
  resultsText: string | null;
}

export const BASE = "http://fixture.test";

/** Five-entry wire body with deliberate trailing zeros in the scores. */
export const FIVE_RESULTS =
  '{"results":[' +
  '{"object_id":"obj-07","category":"mug","score":1.000000},' +
  '{"object_id":"obj-03","category":"mug","score":0.500000},' +
  '{"object_id":"obj-12","category":"shoe","score":0.437500},' +
  '{"object_id":"obj-01","category":"book","score":0.250000},' +
  '{"object_id":"obj-19","category":"book","score":0.062500}' +
  "]}";

export const EMPTY_RESULTS = '{"results":[]}';

function errorBody(code: string, detail: string): string {
  return JSON.stringify({ error: code, detail });
}

function json(text: string, status = 200): Response {
  return new Response(text, {
    status,
    headers: { "content-type": "application/json" },
  });
}

export class FixtureService {
  log: LoggedRequest[] = [];
  sessions = new Map<string, FixtureSession>();
  /** Body served by finalize, keyed on the payload bytes of the session. */
  resultsFor: (views: Uint8Array[]) => string = () => FIVE_RESULTS;

  private nextId = 0;

  readonly fetch: FetchFn = async (url, init) => this.dispatch(url, init);

  private dispatch(url: string, init?: RequestInit): Response {
    if (!url.startsWith(BASE)) {
      return json(errorBody("unknown", `unexpected host in ${url}`), 500);
    }
    const path = url.slice(BASE.length);
    const method = init?.method ?? "GET";
    const headers = (init?.headers ?? {}) as Record<string, string>;
    const rawBody = init?.body;
    const body =
      rawBody === undefined || rawBody === null
        ? null
        : typeof rawBody === "string"
          ? rawBody
          : (rawBody as Uint8Array);
    this.log.push({
      method,
      path,
      contentType: headers["content-type"] ?? null,
      body,
    });

    if (method === "POST" && path === "/v1/sessions") {
      return this.createSession(body);
    }
    let m = path.match(/^\/v1\/sessions\/([^/]+)\/views$/);
    if (m !== null && method === "POST") {
      return this.addView(m[1], body);
    }
    m = path.match(/^\/v1\/sessions\/([^/]+)\/finalize$/);
    if (m !== null && method === "POST") {
      return this.finalize(m[1]);
    }
    m = path.match(/^\/v1\/objects\/([^/]+)$/);
    if (m !== null && method === "GET") {
      return this.getObject(m[1]);
    }
    if (method === "GET" && path === "/v1/index/status") {
      return json('{"objects":3,"views":6,"vocab_bins":12}');
    }
    return json(errorBody("unknown", `no route for ${method} ${path}`), 404);
  }

  private createSession(body: string | Uint8Array | null): Response {
    if (typeof body !== "string") {
      return json(errorBody("bad-spec", "request body must be a JSON object"), 400);
    }
    let doc: { similarity?: unknown };
    try {
      doc = JSON.parse(body) as { similarity?: unknown };
    } catch {
      return json(errorBody("bad-spec", "body is not valid JSON"), 400);
    }
    if (typeof doc.similarity !== "string") {
      return json(errorBody("bad-spec", "unknown similarity"), 400);
    }
    this.nextId += 1;
    const id = `s${this.nextId}`;
    this.sessions.set(id, { views: [], finalized: false, resultsText: null });
    return json(JSON.stringify({ session_id: id }));
  }

  private addView(id: string, body: string | Uint8Array | null): Response {
    const session = this.sessions.get(id);
    if (session === undefined) {
      return json(errorBody("unknown-session", id), 404);
    }
    if (session.finalized) {
      return json(errorBody("session-finalized", id), 409);
    }
    if (!(body instanceof Uint8Array) || body.length === 0) {
      return json(errorBody("malformed-payload", "empty body"), 400);
    }
    // the fixture's stand-in for an undecodable image
    if (body[0] === 0) {
      return json(errorBody("malformed-payload", "unrecognized image format"), 400);
    }
    session.views.push(body);
    return json(JSON.stringify({ ordinal: session.views.length }));
  }

  private finalize(id: string): Response {
    const session = this.sessions.get(id);
    if (session === undefined) {
      return json(errorBody("unknown-session", id), 404);
    }
    if (session.resultsText !== null) {
      return json(session.resultsText);
    }
    if (session.views.length === 0) {
      return json(errorBody("empty-session", id), 400);
    }
    session.finalized = true;
    session.resultsText = this.resultsFor(session.views);
    return json(session.resultsText);
  }

  private getObject(id: string): Response {
    if (id !== "obj-07") {
      return json(errorBody("unknown-object", id), 404);
    }
    return json(
      JSON.stringify({
        object_id: "obj-07",
        category: "mug",
        views: [
          { view_id: "v0", source: "obj-07/v0.png" },
          { view_id: "v1", source: "obj-07/v1.png" },
        ],
      }),
    );
  }
}

/** Spec-conformance check for everything a client sent. */
export function validateLog(log: LoggedRequest[]): string[] {
  const problems: string[] = [];
  const specRe =
    /^\{"similarity":"(dot|hi|nhi|nc|minmax)","fusion":"[a-z_]+","k":[1-9][0-9]*,"list_depth":[1-9][0-9]*\}$/;
  for (const [i, r] of log.entries()) {
    const tag = `request ${i} (${r.method} ${r.path})`;
    if (r.path === "/v1/sessions") {
      if (r.method !== "POST") problems.push(`${tag}: expected POST`);
      if (r.contentType !== "application/json") problems.push(`${tag}: bad content type`);
      if (typeof r.body !== "string" || !specRe.test(r.body)) {
        problems.push(`${tag}: body does not match the documented spec shape`);
      }
    } else if (/^\/v1\/sessions\/[^/]+\/views$/.test(r.path)) {
      if (r.method !== "POST") problems.push(`${tag}: expected POST`);
      if (r.contentType !== "application/octet-stream") problems.push(`${tag}: bad content type`);
      if (!(r.body instanceof Uint8Array) || r.body.length === 0) {
        problems.push(`${tag}: body must be non-empty binary`);
      }
    } else if (/^\/v1\/sessions\/[^/]+\/finalize$/.test(r.path)) {
      if (r.method !== "POST") problems.push(`${tag}: expected POST`);
      if (r.body !== null) problems.push(`${tag}: finalize takes no body`);
    } else if (/^\/v1\/objects\/[^/]+$/.test(r.path)) {
      if (r.method !== "GET") problems.push(`${tag}: expected GET`);
    } else if (r.path === "/v1/index/status") {
      if (r.method !== "GET") problems.push(`${tag}: expected GET`);
    } else {
      problems.push(`${tag}: path not in the service interface`);
    }
  }
  return problems;
}

export function payload(text: string): Uint8Array {
  return new TextEncoder().encode(text);
}
