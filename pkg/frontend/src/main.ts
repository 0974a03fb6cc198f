// Page wiring: form inputs drive debounced /predict calls, the what-if
// panel drives /whatif sweeps, and importances/heatmap load once at start.

import { ApiClient, ApiRequestError, LatestRequest, debounce } from "./api.js";
import { CRYPTO_METHODS, SYSTEM_TYPES } from "./domain.js";
import { FormState } from "./form.js";
import type { RecordField, WhatIfResult } from "./types.js";
import {
  errorHtml,
  heatmapHtml,
  importancesHtml,
  recommendationHtml,
  retryBannerHtml,
} from "./views.js";
import { SWEEPABLE_FIELDS, sweepChartSvg, sweepPoints, sweepValues } from "./whatif.js";

const api = new ApiClient("");
const form = new FormState();
const predictRequest = new LatestRequest();
const sweepRequest = new LatestRequest();

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function fillSelect(select: HTMLSelectElement, options: Array<string | number>, value: string | number) {
  select.innerHTML = "";
  for (const option of options) {
    const el = document.createElement("option");
    el.value = String(option);
    el.textContent = String(option).replace(/_/g, " ");
    select.appendChild(el);
  }
  select.value = String(value);
}

function syncFormControls() {
  const record = form.current();
  fillSelect($("f-system-type") as HTMLSelectElement, [...SYSTEM_TYPES], record.system_type);
  fillSelect($("f-crypto-method") as HTMLSelectElement, [...CRYPTO_METHODS], record.crypto_method);
  fillSelect($("f-key-size") as HTMLSelectElement, form.keySizeOptions(), record.key_size);
  ($("f-lifetime") as HTMLInputElement).value = String(record.security_lifetime);
  for (const [id, field] of SCALE_CONTROLS) {
    ($(id) as HTMLInputElement).value = String(record[field]);
    $(`${id}-value`).textContent = String(record[field]);
  }
  $("lifetime-value").textContent = String(record.security_lifetime);
}

const SCALE_CONTROLS: Array<[string, RecordField]> = [
  ["f-system-complexity", "system_complexity"],
  ["f-integration-complexity", "integration_complexity"],
  ["f-data-sensitivity", "data_sensitivity"],
];

async function refreshPrediction() {
  const output = $("recommendation");
  if (!form.submittable()) {
    const first = form.violations()[0];
    output.innerHTML = errorHtml(first.message, first.field);
    return;
  }
  try {
    const rec = await predictRequest.run((signal) => api.predict(form.current(), signal));
    output.innerHTML = recommendationHtml(rec);
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ApiRequestError) {
      output.innerHTML = errorHtml(err.message, err.field);
    } else {
      output.innerHTML = retryBannerHtml("prediction request failed; server unreachable?");
      output.querySelector("[data-action=retry]")?.addEventListener("click", refreshPrediction);
    }
  }
}

const debouncedPrediction = debounce(refreshPrediction, 250);

function bindForm() {
  ($("f-system-type") as HTMLSelectElement).addEventListener("change", (e) => {
    form.set("system_type", (e.target as HTMLSelectElement).value);
    refreshSweepControls();
    void refreshPrediction();
  });
  ($("f-crypto-method") as HTMLSelectElement).addEventListener("change", (e) => {
    form.set("crypto_method", (e.target as HTMLSelectElement).value);
    syncFormControls();
    refreshSweepControls();
    void refreshPrediction();
  });
  ($("f-key-size") as HTMLSelectElement).addEventListener("change", (e) => {
    form.set("key_size", Number((e.target as HTMLSelectElement).value));
    void refreshPrediction();
  });
  ($("f-lifetime") as HTMLInputElement).addEventListener("input", (e) => {
    form.set("security_lifetime", Number((e.target as HTMLInputElement).value));
    $("lifetime-value").textContent = (e.target as HTMLInputElement).value;
    debouncedPrediction();
  });
  for (const [id, field] of SCALE_CONTROLS) {
    ($(id) as HTMLInputElement).addEventListener("input", (e) => {
      form.set(field, Number((e.target as HTMLInputElement).value));
      $(`${id}-value`).textContent = (e.target as HTMLInputElement).value;
      debouncedPrediction();
    });
  }
}

let lastSweep: WhatIfResult[] = [];

function refreshSweepControls() {
  const select = $("sweep-field") as HTMLSelectElement;
  if (select.options.length === 0) {
    fillSelect(select, SWEEPABLE_FIELDS, "key_size");
  }
  const field = select.value as RecordField;
  const values = sweepValues(field, form.current());
  ($("sweep-run") as HTMLButtonElement).disabled = values.length === 0;
  $("sweep-values").textContent = values.map(String).join(", ");
}

async function runSweep() {
  const field = ($("sweep-field") as HTMLSelectElement).value as RecordField;
  const values = sweepValues(field, form.current());
  const chart = $("sweep-chart");
  if (values.length === 0) return;
  try {
    const results = await sweepRequest.run((signal) =>
      api.whatif(form.current(), field, values, signal),
    );
    lastSweep = results;
    chart.innerHTML = sweepChartSvg(sweepPoints(results));
    chart.querySelectorAll<SVGCircleElement>(".sweep-point").forEach((point) => {
      point.addEventListener("click", () => {
        // clicking a point loads that variant back into the form
        const index = Number(point.dataset.index);
        const value = lastSweep[index].value;
        form.set(field, value);
        syncFormControls();
        void refreshPrediction();
      });
    });
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ApiRequestError) {
      chart.innerHTML = errorHtml(err.message, err.field);
    } else {
      chart.innerHTML = retryBannerHtml("what-if request failed; server unreachable?");
      chart.querySelector("[data-action=retry]")?.addEventListener("click", runSweep);
    }
  }
}

async function loadStaticPanels() {
  try {
    const importances = await api.importances();
    $("importances").innerHTML = importancesHtml(importances);
  } catch {
    $("importances").innerHTML = errorHtml("importances unavailable");
  }
  try {
    const summary = await api.datasetSummary();
    $("heatmap").innerHTML = heatmapHtml(summary.method_strategy_heatmap);
  } catch {
    $("heatmap").innerHTML = errorHtml("dataset summary unavailable (start the server with --data)");
  }
}

function init() {
  syncFormControls();
  bindForm();
  refreshSweepControls();
  ($("sweep-field") as HTMLSelectElement).addEventListener("change", refreshSweepControls);
  ($("sweep-run") as HTMLButtonElement).addEventListener("click", () => void runSweep());
  void refreshPrediction();
  void loadStaticPanels();
}

document.addEventListener("DOMContentLoaded", init);
