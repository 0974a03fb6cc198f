// What-if sweep planning and the SVG chart. Sweep values derive from the
// field being varied; the chart plots urgency (step) and confidence (line)
// against them, with a categorical axis for select-type fields.

import {
  CRYPTO_METHODS,
  LIFETIME_MAX,
  SCALE_MAX,
  SCALE_MIN,
  SYSTEM_TYPES,
  keySizesFor,
  urgencyColor,
  urgencyIndex,
} from "./domain.js";
import type { RecordField, SystemRecord, WhatIfResult } from "./types.js";

export const SWEEPABLE_FIELDS: RecordField[] = [
  "key_size",
  "security_lifetime",
  "data_sensitivity",
  "system_complexity",
  "integration_complexity",
  "crypto_method",
  "system_type",
];

export function isCategorical(field: RecordField): boolean {
  return field === "crypto_method" || field === "system_type";
}

/** Values to sweep for a field, given the current base record. */
export function sweepValues(field: RecordField, base: SystemRecord): Array<string | number> {
  switch (field) {
    case "key_size":
      return keySizesFor(base.crypto_method);
    case "security_lifetime": {
      const ticks = [1, 5, 10, 15, 20, 25, LIFETIME_MAX];
      return ticks;
    }
    case "system_complexity":
    case "integration_complexity":
    case "data_sensitivity": {
      const values: number[] = [];
      for (let v = SCALE_MIN; v <= SCALE_MAX; v += 1) values.push(v);
      return values;
    }
    case "crypto_method":
      return [...CRYPTO_METHODS];
    case "system_type":
      return [...SYSTEM_TYPES];
  }
}

export interface SweepPoint {
  x: number;
  label: string;
  urgency: number;
  confidence: number;
  strategy: string;
}

export function sweepPoints(results: WhatIfResult[]): SweepPoint[] {
  return results.map((r, i) => ({
    x: i,
    label: String(r.value),
    urgency: urgencyIndex(r.recommendation.strategy),
    confidence: r.recommendation.confidence,
    strategy: r.recommendation.strategy,
  }));
}

const W = 640;
const H = 240;
const PAD = { left: 44, right: 40, top: 16, bottom: 42 };

function xPos(i: number, n: number): number {
  const span = W - PAD.left - PAD.right;
  return n <= 1 ? PAD.left + span / 2 : PAD.left + (span * i) / (n - 1);
}

function yUrgency(u: number): number {
  const span = H - PAD.top - PAD.bottom;
  return PAD.top + span * (1 - (u - 1) / 4);
}

function yConfidence(c: number): number {
  const span = H - PAD.top - PAD.bottom;
  return PAD.top + span * (1 - c);
}

/**
 * Step chart of urgency plus a confidence line. Points carry data-index
 * attributes so clicks can load the variant back into the form.
 */
export function sweepChartSvg(points: SweepPoint[]): string {
  if (points.length === 0) return "<svg></svg>";
  const n = points.length;
  const urgencySteps: string[] = [];
  points.forEach((p, i) => {
    const x = xPos(i, n);
    const y = yUrgency(p.urgency);
    if (i === 0) {
      urgencySteps.push(`M ${x.toFixed(1)} ${y.toFixed(1)}`);
    } else {
      const prevY = yUrgency(points[i - 1].urgency);
      urgencySteps.push(`L ${x.toFixed(1)} ${prevY.toFixed(1)}`);
      urgencySteps.push(`L ${x.toFixed(1)} ${y.toFixed(1)}`);
    }
  });
  const confidenceLine = points
    .map((p, i) => `${i === 0 ? "M" : "L"} ${xPos(i, n).toFixed(1)} ${yConfidence(p.confidence).toFixed(1)}`)
    .join(" ");
  const markers = points
    .map((p, i) => {
      const x = xPos(i, n);
      return `
      <circle class="sweep-point" data-index="${i}" data-value="${p.label}"
              cx="${x.toFixed(1)}" cy="${yUrgency(p.urgency).toFixed(1)}" r="5"
              fill="${urgencyColor(p.strategy)}"><title>${p.label}: ${p.strategy}</title></circle>`;
    })
    .join("");
  const labels = points
    .map((p, i) => {
      const x = xPos(i, n);
      const text = p.label.length > 9 ? p.label.slice(0, 8) + "…" : p.label;
      return `<text class="axis-label" x="${x.toFixed(1)}" y="${H - 10}" text-anchor="middle">${text}</text>`;
    })
    .join("");
  const gridlines = [1, 2, 3, 4, 5]
    .map((u) => {
      const y = yUrgency(u);
      return `
      <line x1="${PAD.left}" y1="${y.toFixed(1)}" x2="${W - PAD.right}" y2="${y.toFixed(1)}" class="grid"/>
      <text x="${PAD.left - 8}" y="${(y + 4).toFixed(1)}" text-anchor="end" class="axis-label">${u}</text>`;
    })
    .join("");
  return `
  <svg viewBox="0 0 ${W} ${H}" class="sweep-chart" role="img">
    ${gridlines}
    <path d="${urgencySteps.join(" ")}" class="urgency-line" fill="none"/>
    <path d="${confidenceLine}" class="confidence-line" fill="none"/>
    ${markers}
    ${labels}
    <text x="${PAD.left}" y="12" class="legend urgency">urgency (1-5)</text>
    <text x="${W - PAD.right}" y="12" text-anchor="end" class="legend confidence">confidence (0-1)</text>
  </svg>`;
}
