import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import type { QueryResult, TermDetail } from "../src/types.js";

// process.cwd() is the frontend root under vitest; import.meta.url is
// unreliable in the jsdom environment.
export function loadFixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(resolve(process.cwd(), "fixtures", name), "utf-8"),
  ) as T;
}

export const adsorptionSearch = (): QueryResult =>
  loadFixture<QueryResult>("adsorption_search.json");

export const adsorptionDetail = (): TermDetail =>
  loadFixture<TermDetail>("adsorption_detail.json");

export const tick = (ms = 5): Promise<void> =>
  new Promise((resolve) => setTimeout(resolve, ms));
