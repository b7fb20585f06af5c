import type { ApiError, QueryResult, TermDetail } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ApiClient {
  search(query: string, lang: string): Promise<QueryResult>;
  termDetail(termGroupId: string): Promise<TermDetail>;
}

export class ApiRequestError extends Error {
  constructor(
    message: string,
    readonly code: string,
    readonly status: number | null,
  ) {
    super(message);
  }
}

/** Thin client over the JSON API; fetch is injectable for tests. */
export function createClient(baseUrl: string, fetchFn?: FetchLike): ApiClient {
  const doFetch: FetchLike = fetchFn ?? ((url, init) => fetch(url, init));
  const base = baseUrl.replace(/\/$/, "");

  async function request<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await doFetch(`${base}${path}`);
    } catch (err) {
      throw new ApiRequestError(
        `service unreachable: ${(err as Error).message}`, "unreachable", null,
      );
    }
    const text = await response.text();
    if (!response.ok) {
      let code = "http_error";
      let message = `request failed with status ${response.status}`;
      try {
        const body = JSON.parse(text) as ApiError;
        code = body.error ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body: keep the generic message
      }
      throw new ApiRequestError(message, code, response.status);
    }
    return JSON.parse(text) as T;
  }

  return {
    search(query, lang) {
      const params = new URLSearchParams({ q: query, lang });
      return request<QueryResult>(`/api/v1/search?${params}`);
    },
    termDetail(termGroupId) {
      return request<TermDetail>(
        `/api/v1/terms/${encodeURIComponent(termGroupId)}`,
      );
    },
  };
}

/**
 * Fixture-backed client: serves the canned staged response from static
 * files so the UI can be developed and demoed with no backend.
 */
export function createFixtureClient(
  fixtureBase = "./fixtures", fetchFn?: FetchLike,
): ApiClient {
  const doFetch: FetchLike = fetchFn ?? ((url, init) => fetch(url, init));
  async function load<T>(name: string): Promise<T> {
    const response = await doFetch(`${fixtureBase}/${name}`);
    return (await response.json()) as T;
  }
  return {
    async search(query, _lang) {
      const canned = await load<QueryResult>("adsorption_search.json");
      if (!query.trim().toLowerCase().startsWith("adsor")) {
        return {
          ...canned,
          query,
          matched_group: null,
          candidates: [],
          senses: [],
          recommendation: null,
        };
      }
      return { ...canned, query };
    },
    async termDetail(termGroupId) {
      const canned = await load<TermDetail>("adsorption_detail.json");
      if (termGroupId !== canned.term_group_id) {
        throw new ApiRequestError(
          `unknown term_group_id ${termGroupId}`, "not_found", 404,
        );
      }
      return canned;
    },
  };
}
