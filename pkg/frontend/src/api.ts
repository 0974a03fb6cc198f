// Thin fetch client for the advisor API. Every displayed number comes from
// these calls; the UI itself never predicts anything.

import type {
  ApiError,
  DatasetSummary,
  ImportanceMap,
  Recommendation,
  SystemRecord,
  WhatIfResult,
} from "./types.js";

export class ApiRequestError extends Error {
  readonly status: number;
  readonly field?: string;

  constructor(status: number, body: ApiError) {
    super(body.error || `request failed with status ${status}`);
    this.status = status;
    this.field = body.field;
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiError;
  try {
    body = (await response.json()) as ApiError;
  } catch {
    body = { error: `request failed with status ${response.status}` };
  }
  throw new ApiRequestError(response.status, body);
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async health(): Promise<{ status: string; model_version: number }> {
    return parseResponse(await fetch(this.url("/health")));
  }

  async predict(record: SystemRecord, signal?: AbortSignal): Promise<Recommendation> {
    const response = await fetch(this.url("/predict"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(record),
      signal,
    });
    return parseResponse(response);
  }

  async whatif(
    base: SystemRecord,
    vary: string,
    values: Array<string | number>,
    signal?: AbortSignal,
  ): Promise<WhatIfResult[]> {
    const response = await fetch(this.url("/whatif"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ base, vary, values }),
      signal,
    });
    return parseResponse(response);
  }

  async importances(): Promise<ImportanceMap> {
    return parseResponse(await fetch(this.url("/model/importances")));
  }

  async datasetSummary(): Promise<DatasetSummary> {
    return parseResponse(await fetch(this.url("/dataset/summary")));
  }
}

/** Serializes calls per widget: starting a new request aborts the one in flight. */
export class LatestRequest {
  private controller: AbortController | null = null;

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    return task(controller.signal);
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
