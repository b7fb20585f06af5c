/**
 * Search interaction wiring: debounced input, latest-wins requests,
 * result/error rendering, citation panels, copy-to-clipboard.
 */

import { ApiRequestError, type ApiClient } from "./api.js";
import { debounce, LatestWins } from "./debounce.js";
import {
  renderCitationError,
  renderCitationPanel,
  renderError,
  renderIdle,
  renderLoading,
  renderResult,
} from "./render.js";
import type { QueryResult } from "./types.js";

export interface AppOptions {
  debounceMs?: number;
  /** Clipboard write, injectable for tests. */
  copyText?: (text: string) => Promise<void>;
}

export interface App {
  /** Programmatic input, used by tests and candidate chips. */
  setQuery(query: string): void;
  retry(): void;
  readonly state: () => AppState;
}

export type AppState =
  | { kind: "idle" }
  | { kind: "loading"; query: string }
  | { kind: "result"; result: QueryResult }
  | { kind: "error"; message: string; lastQuery: string };

export function createApp(
  root: HTMLElement, client: ApiClient, options: AppOptions = {},
): App {
  const debounceMs = options.debounceMs ?? 250;
  const copyText =
    options.copyText ?? ((text: string) => navigator.clipboard.writeText(text));

  root.innerHTML = [
    `<header class="search-box">`,
    `<input type="search" id="query" dir="auto" autocomplete="off"`,
    ` placeholder="Search a term (English or French)…" aria-label="search term">`,
    `<select id="lang" aria-label="source language">`,
    `<option value="en" selected>English</option>`,
    `<option value="fr">French</option>`,
    `</select>`,
    `</header>`,
    `<main id="output"></main>`,
  ].join("");

  const input = root.querySelector<HTMLInputElement>("#query")!;
  const langSelect = root.querySelector<HTMLSelectElement>("#lang")!;
  const output = root.querySelector<HTMLElement>("#output")!;

  let state: AppState = { kind: "idle" };
  const inflight = new LatestWins();

  function show(next: AppState): void {
    state = next;
    switch (next.kind) {
      case "idle":
        output.innerHTML = renderIdle();
        break;
      case "loading":
        output.innerHTML = renderLoading(next.query);
        break;
      case "result":
        output.innerHTML = renderResult(next.result);
        break;
      case "error":
        output.innerHTML = renderError(next.message);
        break;
    }
  }

  async function runSearch(query: string): Promise<void> {
    const trimmed = query.trim();
    if (!trimmed) {
      show({ kind: "idle" });
      return;
    }
    const token = inflight.next();
    show({ kind: "loading", query: trimmed });
    try {
      const result = await client.search(trimmed, langSelect.value);
      if (!inflight.isCurrent(token)) return; // superseded by newer input
      show({ kind: "result", result });
    } catch (err) {
      if (!inflight.isCurrent(token)) return;
      const message =
        err instanceof ApiRequestError
          ? err.message
          : `unexpected error: ${(err as Error).message}`;
      show({ kind: "error", message, lastQuery: trimmed });
    }
  }

  const debouncedSearch = debounce(runSearch, debounceMs);
  input.addEventListener("input", () => debouncedSearch(input.value));
  langSelect.addEventListener("change", () => runSearch(input.value));

  async function toggleCitations(row: HTMLElement): Promise<void> {
    const panel = row.querySelector<HTMLElement>(".citation-panel")!;
    if (!panel.hidden) {
      panel.hidden = true;
      return;
    }
    if (state.kind !== "result" || state.result.matched_group === null) return;
    const bucket = state.result.senses[Number(row.dataset.bucket)];
    const eq = bucket?.equivalents[Number(row.dataset.eq)];
    if (!eq) return;
    panel.hidden = false;
    panel.innerHTML = `<p class="citation-loading">Loading citations…</p>`;
    try {
      const detail = await client.termDetail(row.dataset.group!);
      panel.innerHTML = renderCitationPanel(eq, detail);
    } catch (err) {
      const message =
        err instanceof ApiRequestError && err.code === "not_found"
          ? "This entry is gone from the current term base."
          : `Could not load citations: ${(err as Error).message}`;
      panel.innerHTML = renderCitationError(message);
    }
  }

  output.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-action]",
    );
    if (!target) return;
    switch (target.dataset.action) {
      case "retry":
        retry();
        break;
      case "copy-recommendation":
        void copyText(target.dataset.text ?? "").then(() => {
          target.textContent = "Copied";
        });
        break;
      case "candidate":
        setQuery(target.dataset.term ?? "");
        break;
      case "equivalent":
        void toggleCitations(target);
        break;
    }
  });

  function setQuery(query: string): void {
    input.value = query;
    void runSearch(query);
  }

  function retry(): void {
    if (state.kind === "error") {
      void runSearch(state.lastQuery);
    } else {
      void runSearch(input.value);
    }
  }

  show({ kind: "idle" });
  return { setQuery, retry, state: () => state };
}
