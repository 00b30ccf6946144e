import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { rateLimit } from "../src/util";

describe("rateLimit", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("never exceeds the rate over a burst", () => {
    const calls: number[] = [];
    const limited = rateLimit((v: number) => calls.push(v), 250);
    for (let t = 0; t < 1000; t += 10) {
      limited(t);
      vi.advanceTimersByTime(10);
    }
    vi.advanceTimersByTime(300);
    // 4 per second max (plus the trailing flush of the final value)
    expect(calls.length).toBeLessThanOrEqual(5);
    expect(calls[0]).toBe(0);
  });

  it("always delivers the last value", () => {
    const calls: number[] = [];
    const limited = rateLimit((v: number) => calls.push(v), 250);
    limited(1);
    limited(2);
    limited(3);
    vi.advanceTimersByTime(260);
    expect(calls[calls.length - 1]).toBe(3);
  });

  it("passes immediately when idle", () => {
    const calls: number[] = [];
    const limited = rateLimit((v: number) => calls.push(v), 250);
    limited(7);
    expect(calls).toEqual([7]);
    vi.advanceTimersByTime(500);
    limited(8);
    expect(calls).toEqual([7, 8]);
  });
});
