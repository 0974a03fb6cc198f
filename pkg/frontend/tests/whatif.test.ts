import { describe, expect, it } from "vitest";

import { DEFAULT_RECORD } from "../src/form.js";
import type { WhatIfResult } from "../src/types.js";
import { isCategorical, sweepChartSvg, sweepPoints, sweepValues } from "../src/whatif.js";

function result(value: string | number, strategy: string, confidence: number): WhatIfResult {
  return {
    value,
    recommendation: { strategy, confidence, alternatives: [] },
  };
}

describe("sweep planning", () => {
  it("key size sweeps track the base record's method", () => {
    expect(sweepValues("key_size", DEFAULT_RECORD)).toEqual([1024, 2048, 3072, 4096]);
    expect(sweepValues("key_size", { ...DEFAULT_RECORD, crypto_method: "AES" })).toEqual([
      128, 192, 256,
    ]);
  });

  it("scale fields sweep 1..5 and lifetime covers the 1..30 span", () => {
    expect(sweepValues("data_sensitivity", DEFAULT_RECORD)).toEqual([1, 2, 3, 4, 5]);
    const lifetimes = sweepValues("security_lifetime", DEFAULT_RECORD) as number[];
    expect(lifetimes[0]).toBe(1);
    expect(lifetimes[lifetimes.length - 1]).toBe(30);
  });

  it("categorical fields sweep the full enumeration", () => {
    expect(isCategorical("crypto_method")).toBe(true);
    expect(isCategorical("key_size")).toBe(false);
    expect(sweepValues("crypto_method", DEFAULT_RECORD)).toHaveLength(11);
    expect(sweepValues("system_type", DEFAULT_RECORD)).toHaveLength(13);
  });
});

describe("sweep chart", () => {
  const results = [
    result(1024, "immediate_replacement", 0.9),
    result(2048, "immediate_hybrid", 0.8),
    result(4096, "scheduled_transition", 0.7),
  ];

  it("maps strategies onto the urgency axis", () => {
    const points = sweepPoints(results);
    expect(points.map((p) => p.urgency)).toEqual([5, 4, 3]);
    expect(points.map((p) => p.label)).toEqual(["1024", "2048", "4096"]);
  });

  it("emits one clickable marker per value with categorical labels", () => {
    const svg = sweepChartSvg(sweepPoints(results));
    expect((svg.match(/sweep-point/g) ?? []).length).toBe(3);
    expect(svg).toContain('data-value="2048"');
    const categorical = sweepChartSvg(
      sweepPoints([result("RSA", "immediate_hybrid", 0.6), result("AES", "monitor_and_prepare", 0.5)]),
    );
    expect(categorical).toContain(">RSA<");
    expect(categorical).toContain(">AES<");
  });

  it("handles the empty sweep", () => {
    expect(sweepChartSvg([])).toBe("<svg></svg>");
  });
});
