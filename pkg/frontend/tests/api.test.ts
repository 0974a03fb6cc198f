import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiRequestError, LatestRequest, debounce } from "../src/api.js";
import { DEFAULT_RECORD } from "../src/form.js";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.restoreAllMocks();
  vi.useRealTimers();
});

describe("ApiClient", () => {
  it("posts the record to /predict and returns the recommendation", async () => {
    const payload = { strategy: "immediate_hybrid", confidence: 0.8, alternatives: [] };
    const spy = vi.spyOn(globalThis, "fetch").mockResolvedValue(jsonResponse(payload));
    const client = new ApiClient("http://server");
    const rec = await client.predict(DEFAULT_RECORD);
    expect(rec.strategy).toBe("immediate_hybrid");
    const [url, init] = spy.mock.calls[0];
    expect(url).toBe("http://server/predict");
    expect(JSON.parse(String(init?.body))).toEqual(DEFAULT_RECORD);
  });

  it("sends base, vary and values to /whatif", async () => {
    const spy = vi.spyOn(globalThis, "fetch").mockResolvedValue(jsonResponse([]));
    await new ApiClient().whatif(DEFAULT_RECORD, "key_size", [1024, 2048]);
    const [url, init] = spy.mock.calls[0];
    expect(url).toBe("/whatif");
    expect(JSON.parse(String(init?.body))).toEqual({
      base: DEFAULT_RECORD,
      vary: "key_size",
      values: [1024, 2048],
    });
  });

  it("surfases 400 errors with the offending field", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse({ error: "data_sensitivity out of [1,5]", field: "data_sensitivity" }, 400),
    );
    const client = new ApiClient();
    try {
      await client.predict({ ...DEFAULT_RECORD, data_sensitivity: 9 });
      expect.unreachable("expected ApiRequestError");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiRequestError);
      expect((err as ApiRequestError).status).toBe(400);
      expect((err as ApiRequestError).field).toBe("data_sensitivity");
    }
  });
});

describe("LatestRequest", () => {
  it("aborts the in-flight request when a newer one starts", async () => {
    const latest = new LatestRequest();
    const seen: AbortSignal[] = [];
    const never = new Promise<string>(() => {});
    void latest.run((signal) => {
      seen.push(signal);
      return never;
    });
    const second = latest.run(async (signal) => {
      seen.push(signal);
      return "done";
    });
    expect(await second).toBe("done");
    expect(seen[0].aborted).toBe(true);
    expect(seen[1].aborted).toBe(false);
  });
});

describe("debounce", () => {
  it("coalesces rapid calls into the trailing one", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((n: number) => calls.push(n), 250);
    fn(1);
    fn(2);
    fn(3);
    vi.advanceTimersByTime(249);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(2);
    expect(calls).toEqual([3]);
  });
});
