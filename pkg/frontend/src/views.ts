// Pure view-model builders: recommendation badge, alternative bars, error
// banners, importance bars, heatmap cells. All return plain data or HTML
// strings so they can be tested without a browser.

import { urgencyColor, urgencyIndex } from "./domain.js";
import type { HeatmapTable, ImportanceMap, Recommendation } from "./types.js";

export interface RecommendationView {
  strategy: string;
  badgeColor: string;
  urgency: number;
  confidenceText: string;
  alternatives: Array<{ strategy: string; probability: number; widthPct: number }>;
}

export function formatPercent(p: number): string {
  return `${Math.round(p * 100)}%`;
}

export function recommendationView(rec: Recommendation): RecommendationView {
  return {
    strategy: rec.strategy,
    badgeColor: urgencyColor(rec.strategy),
    urgency: urgencyIndex(rec.strategy),
    confidenceText: formatPercent(rec.confidence),
    alternatives: rec.alternatives.map((alt) => ({
      strategy: alt.strategy,
      probability: alt.probability,
      widthPct: Math.max(1, Math.round(alt.probability * 100)),
    })),
  };
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function recommendationHtml(rec: Recommendation): string {
  const view = recommendationView(rec);
  const alts = view.alternatives
    .map(
      (alt) => `
      <div class="alt-row">
        <span class="alt-name">${esc(alt.strategy)}</span>
        <div class="alt-track"><div class="alt-bar" style="width:${alt.widthPct}%"></div></div>
        <span class="alt-prob">${formatPercent(alt.probability)}</span>
      </div>`,
    )
    .join("");
  return `
    <div class="verdict">
      <span class="badge" style="background:${view.badgeColor}" data-strategy="${esc(view.strategy)}">
        ${esc(view.strategy)}
      </span>
      <span class="confidence" data-confidence="${esc(view.confidenceText)}">
        confidence ${view.confidenceText}
      </span>
    </div>
    <div class="alts">${alts}</div>`;
}

export function errorHtml(message: string, field?: string): string {
  const fieldNote = field ? `<strong>${esc(field)}</strong>: ` : "";
  return `<div class="error-inline" data-field="${esc(field ?? "")}">${fieldNote}${esc(message)}</div>`;
}

export function retryBannerHtml(message: string): string {
  return `
    <div class="banner-error">
      <span>${esc(message)}</span>
      <button type="button" data-action="retry">Retry</button>
    </div>`;
}

export function importancesHtml(importances: ImportanceMap, top = 10): string {
  const ranked = Object.entries(importances)
    .sort((a, b) => b[1] - a[1])
    .slice(0, top);
  const max = ranked.length > 0 ? ranked[0][1] : 1;
  const rows = ranked
    .map(
      ([name, value]) => `
      <div class="imp-row">
        <span class="imp-name">${esc(name)}</span>
        <div class="imp-track"><div class="imp-bar" style="width:${Math.round((value / max) * 100)}%"></div></div>
        <span class="imp-value">${(value * 100).toFixed(1)}%</span>
      </div>`,
    )
    .join("");
  return `<div class="importances">${rows}</div>`;
}

export function heatmapHtml(table: HeatmapTable): string {
  const header = table.col_labels.map((c) => `<th>${esc(c.replace(/_/g, " "))}</th>`).join("");
  const rows = table.row_labels
    .map((label, i) => {
      const cells = table.values[i]
        .map((v) => {
          const alpha = table.kind === "percent" ? v / 100 : Math.min(1, v / 5);
          const text = table.kind === "percent" ? v.toFixed(0) : v.toFixed(2);
          return `<td style="background:rgba(46,103,156,${alpha.toFixed(2)})">${text}</td>`;
        })
        .join("");
      return `<tr><th>${esc(label.replace(/_/g, " "))}</th>${cells}</tr>`;
    })
    .join("");
  return `<table class="heatmap"><thead><tr><th></th>${header}</tr></thead><tbody>${rows}</tbody></table>`;
}
