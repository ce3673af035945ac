import { describe, expect, it } from "vitest";

import { ConsoleModel, colorFor, labelFor } from "../src/model.js";
import type { MetricsResponse, QueryResponse } from "../src/types.js";

const QUERY_RESP: QueryResponse = {
  version: 7,
  token: "p3",
  terms: [0, 1],
  results: [
    { rank: 1, object: 12, provenance: "exploit", riv: 4.0 },
    { rank: 2, object: 3, provenance: "exploit", riv: 2.5 },
    { rank: 3, object: 44, provenance: "explore", riv: 1.0 },
    { rank: 4, object: 9, provenance: "explore", riv: 0.0 },
  ],
};

function metrics(partial: Partial<MetricsResponse> = {}): MetricsResponse {
  return {
    version: 1,
    generator_size: 10,
    pool_size: 2,
    total_riv: 14.5,
    links: 12,
    objects: 8,
    top_objects: {},
    ...partial,
  };
}

describe("query rendering", () => {
  it("mirrors the gateway list verbatim: order, ranks, rivs, badges", () => {
    const model = new ConsoleModel();
    model.showQuery(["rose", "garden"], QUERY_RESP, 100);

    expect(model.rows.map((r) => r.object)).toEqual([12, 3, 44, 9]);
    expect(model.rows.map((r) => r.rank)).toEqual([1, 2, 3, 4]);
    expect(model.rows.map((r) => r.riv)).toEqual([4.0, 2.5, 1.0, 0.0]);
    expect(model.rows.map((r) => r.badge)).toEqual([
      "Exploit",
      "Exploit",
      "Explore",
      "Explore",
    ]);
    // every entry carries a badge and a label
    for (const row of model.rows) {
      expect(["Exploit", "Explore"]).toContain(row.badge);
      expect(row.label).toBe(labelFor(row.object));
      expect(row.color).toBe(colorFor(row.object));
    }
    expect(model.token).toBe("p3");
    expect(model.mustRequery).toBe(false);
  });

  it("labels and colors are deterministic per object", () => {
    expect(labelFor(12)).toBe(labelFor(12));
    expect(colorFor(12)).toBe(colorFor(12));
    expect(colorFor(12)).not.toBe(colorFor(13));
    expect(colorFor(12)).toMatch(/^hsl\(\d+, 65%, 55%\)$/);
  });
});

describe("submit gating", () => {
  it("rejects empty and duplicate input, accepts distinct terms", () => {
    const model = new ConsoleModel();
    expect(model.canSubmit("")).toBe(false);
    expect(model.canSubmit("   ")).toBe(false);
    expect(model.canSubmit("rose rose")).toBe(false);
    expect(model.canSubmit("rose")).toBe(true);
    expect(model.canSubmit("  rose   garden ")).toBe(true);
    expect(model.parseTerms("  rose   garden ")).toEqual(["rose", "garden"]);
  });

  it("allows only one mutation in flight", () => {
    const model = new ConsoleModel();
    expect(model.beginMutation()).toBe(true);
    expect(model.beginMutation()).toBe(false);
    model.endMutation();
    expect(model.beginMutation()).toBe(true);
  });
});

describe("click and conflict handling", () => {
  it("records the reward and promotion events", () => {
    const model = new ConsoleModel();
    model.showQuery(["rose"], QUERY_RESP, 0);
    model.showClick(
      12,
      { version: 8, total: 1.0, promoted: [{ term_id: 0, term: "rose", object: 12 }] },
      50,
    );
    expect(model.lastReward).toBe(1.0);
    const kinds = model.log.map((e) => e.kind);
    expect(kinds).toContain("click");
    expect(kinds).toContain("promotion");
  });

  it("a conflict changes nothing except the banner and re-query flag", () => {
    const model = new ConsoleModel();
    model.showQuery(["rose"], QUERY_RESP, 0);
    model.showMetrics(metrics(), 10);
    const rowsBefore = JSON.stringify(model.rows);
    const seriesBefore = JSON.stringify(model.series);

    model.showConflict("stale presentation token", 60);

    expect(JSON.stringify(model.rows)).toBe(rowsBefore);
    expect(JSON.stringify(model.series)).toBe(seriesBefore);
    expect(model.mustRequery).toBe(true);
    expect(model.banner).toContain("state unchanged");
    expect(model.log.at(-1)?.kind).toBe("conflict");
  });
});

describe("metrics series", () => {
  it("appends polls verbatim with the version as event axis", () => {
    const model = new ConsoleModel();
    model.showMetrics(metrics({ version: 3, generator_size: 9, pool_size: 3 }), 0);
    model.showMetrics(metrics({ version: 5, generator_size: 8, pool_size: 4, p: 0.25 }), 1000);

    expect(model.series.map((s) => s.event)).toEqual([3, 5]);
    expect(model.series.map((s) => s.generator)).toEqual([9, 8]);
    expect(model.series.map((s) => s.pool)).toEqual([3, 4]);
    expect(model.series[0].p).toBeNull();
    expect(model.series[1].p).toBe(0.25);
    expect(model.series.map((s) => s.wallMs)).toEqual([0, 1000]);
  });

  it("a skipped poll leaves no fabricated point behind", () => {
    const model = new ConsoleModel();
    model.showMetrics(metrics({ version: 3 }), 0);
    // the caller simply does not call showMetrics for a failed poll
    model.showMetrics(metrics({ version: 9 }), 2000);
    expect(model.series).toHaveLength(2);
  });
});
