import { describe, expect, it, vi } from "vitest";

import { createFixtureClient } from "../src/api.js";
import { debounce, LatestWins } from "../src/debounce.js";
import { textDirection } from "../src/rtl.js";
import { loadFixture } from "./helpers.js";

describe("text direction", () => {
  it("detects Arabic as rtl", () => {
    expect(textDirection("امتزاز")).toBe("rtl");
    expect(textDirection("امتزاز الكربون")).toBe("rtl");
  });

  it("detects Latin as ltr", () => {
    expect(textDirection("adsorption")).toBe("ltr");
  });

  it("uses the first strong character for mixed text", () => {
    expect(textDirection("(امتزاز)")).toBe("rtl");
    expect(textDirection("adsorption امتزاز")).toBe("ltr");
    expect(textDirection("12 :امتزاز")).toBe("rtl");
  });
});

describe("debounce", () => {
  it("fires once with the last arguments", async () => {
    vi.useFakeTimers();
    const calls: string[] = [];
    const fire = debounce((x: string) => calls.push(x), 100);
    fire("a");
    fire("b");
    fire("c");
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["c"]);
    vi.useRealTimers();
  });
});

describe("latest wins", () => {
  it("marks older tokens stale", () => {
    const tokens = new LatestWins();
    const first = tokens.next();
    const second = tokens.next();
    expect(tokens.isCurrent(first)).toBe(false);
    expect(tokens.isCurrent(second)).toBe(true);
  });
});

describe("fixture client", () => {
  const fetchFixture = async (url: string) => {
    const name = url.split("/").pop()!;
    return new Response(JSON.stringify(loadFixture(name)));
  };

  it("serves the canned staged response", async () => {
    const client = createFixtureClient("./fixtures", fetchFixture);
    const result = await client.search("adsorption", "en");
    expect(result.recommendation).toBe("امتزاز");
    expect(result.senses.map((s) => s.instance_count)).toEqual([15, 7, 3]);
  });

  it("returns an empty result for non-fixture terms", async () => {
    const client = createFixtureClient("./fixtures", fetchFixture);
    const result = await client.search("zzzz", "en");
    expect(result.matched_group).toBeNull();
    expect(result.recommendation).toBeNull();
  });

  it("serves the canned detail and 404s unknown ids", async () => {
    const client = createFixtureClient("./fixtures", fetchFixture);
    const detail = await client.termDetail("1");
    expect(detail.entries).toHaveLength(25);
    await expect(client.termDetail("42")).rejects.toMatchObject({
      code: "not_found",
    });
  });
});
