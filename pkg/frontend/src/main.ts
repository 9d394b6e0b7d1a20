/** Browser entry point: wires the query composer to the page.
 *
 * All markup comes from the pure renderers; this file only reads inputs,
 * drives the session flow, and assigns innerHTML.
 */

import { ApiClient } from "./api.js";
import { baseUrl } from "./config.js";
import {
  renderComparison,
  renderError,
  renderOptions,
  renderResultsGrid,
  renderSpecLine,
  renderViewList,
} from "./render.js";
import { QueryComposer } from "./session.js";
import { FUSION_KINDS, FUSION_NONE, SIMILARITY_KINDS } from "./types.js";
import type { FusionChoice, SessionSpec, SessionView, SimilarityKind } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function readSpec(): SessionSpec {
  return {
    similarity: el<HTMLSelectElement>("similarity").value as SimilarityKind,
    fusion: el<HTMLSelectElement>("fusion").value as FusionChoice,
    k: Number(el<HTMLInputElement>("k").value) || 10,
    list_depth: Number(el<HTMLInputElement>("list-depth").value) || 100,
  };
}

export function setup(): void {
  const api = new ApiClient(baseUrl());
  let composer: QueryComposer | null = null;
  let previous: SessionView | null = null;

  const status = el<HTMLElement>("status");
  const viewsBox = el<HTMLElement>("views");
  const resultsBox = el<HTMLElement>("results");

  el<HTMLSelectElement>("similarity").innerHTML = renderOptions(SIMILARITY_KINDS);
  el<HTMLSelectElement>("fusion").innerHTML = renderOptions([FUSION_NONE, ...FUSION_KINDS]);

  api
    .indexStatus()
    .then((s) => {
      status.textContent = `index: ${s.objects} objects, ${s.views} views, ${s.vocab_bins} bins`;
    })
    .catch((exc) => {
      status.innerHTML = renderError(String(exc));
    });

  const refresh = (): void => {
    viewsBox.innerHTML = composer === null ? "" : renderViewList(composer.views);
    if (composer === null) return;
    const current = composer.snapshot();
    resultsBox.innerHTML =
      previous === null
        ? renderResultsGrid(current.results, "results")
        : renderComparison(previous, current);
  };

  el<HTMLButtonElement>("open").addEventListener("click", () => {
    void (async () => {
      try {
        composer = await QueryComposer.open(api, readSpec());
        previous = null;
        el<HTMLElement>("spec-line").innerHTML = renderSpecLine(composer.spec);
        refresh();
      } catch (exc) {
        resultsBox.innerHTML = renderError(String(exc));
      }
    })();
  });

  el<HTMLInputElement>("file").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const files = input.files === null ? [] : Array.from(input.files);
    input.value = "";
    void (async () => {
      if (composer === null) {
        resultsBox.innerHTML = renderError("open a session first");
        return;
      }
      for (const file of files) {
        const data = new Uint8Array(await file.arrayBuffer());
        await composer.addView(file.name, data);
        refresh();
      }
    })();
  });

  el<HTMLButtonElement>("finalize").addEventListener("click", () => {
    void (async () => {
      if (composer === null) return;
      try {
        await composer.finalize();
      } catch (exc) {
        resultsBox.innerHTML = renderError(String(exc));
        return;
      }
      refresh();
    })();
  });

  el<HTMLButtonElement>("refine").addEventListener("click", () => {
    void (async () => {
      if (composer === null || composer.results === null) {
        resultsBox.innerHTML = renderError("finalize the current session first");
        return;
      }
      previous = composer.snapshot();
      composer = await composer.refine(readSpec());
      refresh();
    })();
  });
}

if (typeof document !== "undefined" && document.getElementById("open") !== null) {
  setup();
}
