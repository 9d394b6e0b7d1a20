/** Client-side query session flow.
 *
 * A composer opens one server session with a fixed spec, posts each view
 * the moment the user adds it, and records per-view outcomes. A rejected
 * view (HTTP 400) is kept in the list with its error detail so the UI can
 * show it inline; the session itself stays usable. Refining starts a fresh
 * server session seeded with the accepted payloads of this one.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ResultItem, SessionSpec, SessionView, ViewState } from "./types.js";

export interface ViewPayload {
  name: string;
  data: Uint8Array;
}

export class QueryComposer {
  readonly spec: SessionSpec;
  readonly views: ViewState[] = [];
  results: ResultItem[] | null = null;

  private readonly api: ApiClient;
  private readonly sessionId: string;
  private readonly accepted: ViewPayload[] = [];

  private constructor(api: ApiClient, spec: SessionSpec, sessionId: string) {
    this.api = api;
    this.spec = spec;
    this.sessionId = sessionId;
  }

  /** Open a server session; its query spec is fixed for its whole life. */
  static async open(api: ApiClient, spec: SessionSpec): Promise<QueryComposer> {
    const sessionId = await api.createSession(spec);
    return new QueryComposer(api, spec, sessionId);
  }

  get id(): string {
    return this.sessionId;
  }

  /** Post one view now. A 400 is recorded inline, not thrown. */
  async addView(name: string, data: Uint8Array): Promise<ViewState> {
    if (this.results !== null) {
      throw new Error("session already finalized");
    }
    const state: ViewState = { name, status: "pending" };
    this.views.push(state);
    try {
      state.ordinal = await this.api.addView(this.sessionId, data);
      state.status = "accepted";
      this.accepted.push({ name, data });
    } catch (exc) {
      if (exc instanceof ApiError && exc.status === 400) {
        state.status = "error";
        state.detail = exc.detail;
      } else {
        this.views.pop();
        throw exc;
      }
    }
    return state;
  }

  /** Finalize and cache the ranked results exactly as the wire gave them. */
  async finalize(): Promise<ResultItem[]> {
    if (this.results === null) {
      this.results = await this.api.finalize(this.sessionId);
    }
    return this.results;
  }

  /** Payloads the server accepted, in posting order. */
  acceptedViews(): ViewPayload[] {
    return [...this.accepted];
  }

  /**
   * Start a fresh session seeded with this one's accepted views. The new
   * spec defaults to the old one; the caller may add further views before
   * finalizing.
   */
  async refine(spec?: SessionSpec): Promise<QueryComposer> {
    const next = await QueryComposer.open(this.api, spec ?? this.spec);
    for (const view of this.accepted) {
      await next.addView(view.name, view.data);
    }
    return next;
  }

  snapshot(): SessionView {
    return {
      id: this.sessionId,
      spec: { ...this.spec },
      views: this.views.map((v) => ({ ...v })),
      results: this.results === null ? null : this.results.map((r) => ({ ...r })),
    };
  }
}
