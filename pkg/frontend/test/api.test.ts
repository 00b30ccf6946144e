import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, decodeGrid } from "../src/api";

function b64OfFloats(values: number[]): string {
  const arr = new Float64Array(values);
  const bytes = new Uint8Array(arr.buffer);
  let s = "";
  for (const b of bytes) s += String.fromCharCode(b);
  return btoa(s);
}

afterEach(() => vi.restoreAllMocks());

describe("decodeGrid", () => {
  it("round-trips little-endian float64 payloads", () => {
    const values = [0, 0.25, 0.5, 1, 0.125, 0.75];
    const out = decodeGrid(b64OfFloats(values), 2, 3);
    expect(Array.from(out)).toEqual(values);
  });

  it("rejects size mismatches", () => {
    expect(() => decodeGrid(b64OfFloats([1, 2]), 2, 3)).toThrow(/expected 6/);
  });
});

describe("ApiClient.select", () => {
  it("passes the id set through untouched (no client-side filtering)", async () => {
    const payload = { ids: [5, 2, 9], count: 3, truncated: false };
    vi.stubGlobal("fetch", vi.fn(async () => new Response(JSON.stringify(payload))));
    const api = new ApiClient();
    const result = await api.select({ kMin: 1, kMax: 5, vMin: 0, vMax: 1 });
    expect(result).toEqual(payload);
    const [, init] = (fetch as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(JSON.parse((init as RequestInit).body as string)).toEqual(
      { k_min: 1, k_max: 5, v_min: 0, v_max: 1 });
  });

  it("drops superseded responses", async () => {
    const resolvers: ((r: Response) => void)[] = [];
    const aborted: boolean[] = [];
    vi.stubGlobal("fetch", vi.fn((_url: string, init?: RequestInit) => {
      const idx = resolvers.length;
      aborted.push(false);
      init?.signal?.addEventListener("abort", () => { aborted[idx] = true; });
      return new Promise<Response>((resolve, reject) => {
        resolvers.push(resolve);
        init?.signal?.addEventListener("abort", () =>
          reject(Object.assign(new Error("aborted"), { name: "AbortError" })));
      });
    }));
    const api = new ApiClient();
    const first = api.select({ kMin: 1, kMax: 2, vMin: 0, vMax: 1 });
    const second = api.select({ kMin: 3, kMax: 4, vMin: 0, vMax: 1 });
    // issuing the second call aborts the first
    expect(aborted[0]).toBe(true);
    resolvers[1](new Response(JSON.stringify({ ids: [1], count: 1, truncated: false })));
    expect(await second).toEqual({ ids: [1], count: 1, truncated: false });
    expect(await first).toBeNull();
  });
});

describe("ApiClient.detect", () => {
  it("sends no query parameters for the defaults", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      new Response(JSON.stringify({ detector: "outliers", config: {}, flagged: [] }))));
    const api = new ApiClient();
    await api.detect("outliers");
    const [url] = (fetch as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(url).toBe("/api/detect/outliers");
  });

  it("encodes overrides as query parameters", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      new Response(JSON.stringify({ detector: "outliers", config: {}, flagged: [] }))));
    const api = new ApiClient();
    await api.detect("outliers", { outlier_spike_min: 12.5 });
    const [url] = (fetch as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(url).toBe("/api/detect/outliers?outlier_spike_min=12.5");
  });

  it("surfaces API error details", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      new Response(JSON.stringify({ detail: "unknown detector 'x'" }), { status: 404 })));
    const api = new ApiClient();
    await expect(api.detect("x")).rejects.toThrow(/unknown detector/);
  });
});
