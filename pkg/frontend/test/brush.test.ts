import { describe, expect, it } from "vitest";

import { HeatmapLayout, rectToRegion, regionToRect } from "../src/brush";

const layout: HeatmapLayout = {
  kMax: 40,
  bins: 100,
  binMin: 0,
  binWidth: 0.025,
  width: 400,    // 10 px per k cell
  height: 200,   // 2 px per bin
};

describe("rectToRegion", () => {
  it("maps the full canvas to the full ranges", () => {
    const region = rectToRegion({ x0: 0, y0: 0, x1: 400, y1: 200 }, layout);
    expect(region).toEqual({ kMin: 1, kMax: 40, vMin: 0, vMax: 2.5 });
  });

  it("maps a single-cell rectangle to that cell", () => {
    // cell k=3 spans x in [20, 30); bottom bin v=0 spans y in [198, 200)
    const region = rectToRegion({ x0: 21, y0: 198.5, x1: 29, y1: 199.5 }, layout);
    expect(region.kMin).toBe(3);
    expect(region.kMax).toBe(3);
    expect(region.vMin).toBe(0);
    expect(region.vMax).toBeCloseTo(0.025, 12);
  });

  it("handles drags in any direction", () => {
    const a = rectToRegion({ x0: 100, y0: 50, x1: 200, y1: 150 }, layout);
    const b = rectToRegion({ x0: 200, y0: 150, x1: 100, y1: 50 }, layout);
    expect(a).toEqual(b);
  });

  it("clamps to the canvas", () => {
    const region = rectToRegion({ x0: -50, y0: -10, x1: 900, y1: 400 }, layout);
    expect(region).toEqual({ kMin: 1, kMax: 40, vMin: 0, vMax: 2.5 });
  });

  it("treats a click as the cell under the cursor", () => {
    const region = rectToRegion({ x0: 15, y0: 100, x1: 15, y1: 100 }, layout);
    expect(region.kMin).toBe(2);
    expect(region.kMax).toBe(2);
    expect(region.vMax - region.vMin).toBeCloseTo(layout.binWidth, 12);
  });

  it("value ranges grow upward from the bottom of the canvas", () => {
    // top half of the canvas = upper half of the value range
    const region = rectToRegion({ x0: 0, y0: 0, x1: 400, y1: 100 }, layout);
    expect(region.vMin).toBeCloseTo(1.25, 12);
    expect(region.vMax).toBeCloseTo(2.5, 12);
  });
});

describe("regionToRect", () => {
  it("is the inverse of rectToRegion on cell boundaries", () => {
    const region = { kMin: 5, kMax: 12, vMin: 0.25, vMax: 1.0 };
    const rect = regionToRect(region, layout);
    expect(rectToRegion(rect, layout)).toEqual(region);
  });
});
