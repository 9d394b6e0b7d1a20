/** Pure HTML renderers.
 *
 * Every function turns state into a markup string and nothing else, so
 * tests can assert on output without a DOM. Results are rendered in the
 * order received and scores are printed exactly as the service wrote
 * them; no client-side sorting, filtering, or reformatting.
 */

import type { ResultItem, SessionSpec, SessionView, ViewState } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderSpecLine(spec: SessionSpec): string {
  return (
    '<p class="spec">' +
    `similarity=<b>${escapeHtml(spec.similarity)}</b> ` +
    `fusion=<b>${escapeHtml(spec.fusion)}</b> ` +
    `k=${spec.k} list_depth=${spec.list_depth}</p>`
  );
}

export function renderViewList(views: ViewState[]): string {
  if (views.length === 0) {
    return '<p class="empty">no views added yet</p>';
  }
  const items = views
    .map((v) => {
      const name = escapeHtml(v.name);
      if (v.status === "accepted") {
        return `<li class="view accepted">#${v.ordinal} ${name}</li>`;
      }
      if (v.status === "error") {
        const detail = escapeHtml(v.detail ?? "rejected");
        return `<li class="view error">${name} <span class="detail">${detail}</span></li>`;
      }
      return `<li class="view pending">${name} (uploading)</li>`;
    })
    .join("");
  return `<ul class="views">${items}</ul>`;
}

export function renderResultsGrid(results: ResultItem[] | null, title: string): string {
  const head = `<h3>${escapeHtml(title)}</h3>`;
  if (results === null) {
    return `<section class="results">${head}<p class="empty">not finalized</p></section>`;
  }
  if (results.length === 0) {
    return `<section class="results">${head}<p class="empty">no matches</p></section>`;
  }
  const cells = results
    .map(
      (r) =>
        '<div class="hit">' +
        `<span class="oid">${escapeHtml(r.object_id)}</span>` +
        `<span class="cat">${escapeHtml(r.category)}</span>` +
        `<span class="score">${escapeHtml(r.score)}</span>` +
        "</div>",
    )
    .join("");
  return `<section class="results">${head}<div class="grid">${cells}</div></section>`;
}

/** Previous and refined results side by side for the refine loop. */
export function renderComparison(previous: SessionView, refined: SessionView): string {
  return (
    '<div class="compare">' +
    `<div class="pane">${renderResultsGrid(previous.results, "previous")}</div>` +
    `<div class="pane">${renderResultsGrid(refined.results, "refined")}</div>` +
    "</div>"
  );
}

export function renderError(message: string): string {
  return `<p class="error">${escapeHtml(message)}</p>`;
}

/** Option tags for a select menu, values verbatim wire names. */
export function renderOptions(names: readonly string[]): string {
  return names
    .map((n) => `<option value="${escapeHtml(n)}">${escapeHtml(n)}</option>`)
    .join("");
}
