import { describe, expect, it } from "vitest";

import { renderCitationPanel, renderError, renderResult } from "../src/render.js";
import { adsorptionDetail, adsorptionSearch } from "./helpers.js";

describe("staged result rendering (canned fixture)", () => {
  const html = renderResult(adsorptionSearch());

  it("matches the snapshot", () => {
    expect(html).toMatchSnapshot();
  });

  it("shows the recommendation first", () => {
    const recommendation = html.indexOf("امتزاز");
    expect(html.startsWith(`<div class="banner banner-recommendation">`)).toBe(
      true,
    );
    expect(recommendation).toBeGreaterThan(-1);
    expect(recommendation).toBeLessThan(html.indexOf(`<section class="senses">`));
  });

  it("shows the sense counts 15/7/3 verbatim in API order", () => {
    const counts = [...html.matchAll(/<span class="sense-count">(\d+)</g)].map(
      (m) => m[1],
    );
    expect(counts).toEqual(["15", "7", "3"]);
  });

  it("shows the physics equivalents 12/2/1 verbatim", () => {
    const firstSenseHtml = html.slice(
      html.indexOf(`<details class="sense" open>`),
      html.indexOf(`<details class="sense">`),
    );
    const counts = [
      ...firstSenseHtml.matchAll(/<span class="equivalent-count">(\d+)</g),
    ].map((m) => m[1]);
    expect(counts).toEqual(["12", "2", "1"]);
    expect(firstSenseHtml).toContain("امتزاز");
    expect(firstSenseHtml).toContain("انمصاص");
    expect(firstSenseHtml).toContain("تكثيف");
  });

  it("renders every Arabic string with an explicit rtl direction", () => {
    for (const match of html.matchAll(
      /<span class="arabic[^"]*" dir="(\w+)">([^<]+)</g,
    )) {
      expect(match[1]).toBe("rtl");
    }
    expect(html).toContain(`dir="rtl">امتزاز</span>`);
  });

  it("shows no recommendation banner when the API result carries none", () => {
    const empty = {
      ...adsorptionSearch(),
      matched_group: null,
      candidates: [],
      senses: [],
      recommendation: null,
    };
    const rendered = renderResult(empty);
    expect(rendered).not.toContain("banner-recommendation");
    expect(rendered).toContain("No entry found");
  });

  it("renders non-exact candidates as chips with their entry counts", () => {
    expect(html).toContain("carbon adsorption");
    expect(html).toContain(`<span class="chip-count">5</span>`);
    expect(html).not.toMatch(/chip chip-exact/);
  });

  it("computes nothing: all numbers in the page come from the payload", () => {
    const payload = adsorptionSearch();
    const payloadNumbers = new Set<number>([
      payload.matched_group!.member_count,
      ...payload.senses.map((s) => s.instance_count),
      ...payload.senses.flatMap((s) => s.equivalents.map((e) => e.count)),
      ...payload.candidates.map((c) => c.member_count),
    ]);
    for (const match of html.matchAll(/(?:count">|entries)(\d+)</g)) {
      expect(payloadNumbers.has(Number(match[1]))).toBe(true);
    }
  });
});

describe("citation panel", () => {
  it("lists one citation per attestation of the clicked equivalent", () => {
    const search = adsorptionSearch();
    const topEquivalent = search.senses[0].equivalents[0]; // امتزاز ×12
    const html = renderCitationPanel(topEquivalent, adsorptionDetail());
    const rows = [...html.matchAll(/<li class="citation">/g)];
    expect(rows).toHaveLength(12);
    expect(html).toContain("Unified Glossary of Physics Terms");
  });

  it("lists a single citation for a count-1 equivalent", () => {
    const search = adsorptionSearch();
    const single = search.senses[0].equivalents[2]; // تكثيف ×1
    const html = renderCitationPanel(single, adsorptionDetail());
    expect([...html.matchAll(/<li class="citation">/g)]).toHaveLength(1);
  });
});

describe("error banner", () => {
  it("carries the message and a retry control", () => {
    const html = renderError("service unreachable: connection refused");
    expect(html).toContain("service unreachable");
    expect(html).toContain(`data-action="retry"`);
  });

  it("escapes markup in messages", () => {
    expect(renderError("<script>alert(1)</script>")).not.toContain("<script>");
  });
});
