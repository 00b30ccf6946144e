/**
 * Geometry shared by the heatmap canvas and its rectangle brush.
 *
 * The heatmap is a bins x k raster drawn with nearest-neighbor scaling so
 * cell boundaries stay faithful to histogram bins: k grows rightward,
 * indicator value grows upward (grid row 0, the lowest bin, is at the
 * bottom of the canvas).
 */

import type { Region } from "./api";

export interface HeatmapLayout {
  kMax: number;
  bins: number;
  binMin: number;
  binWidth: number;
  width: number;    // canvas CSS pixels
  height: number;
}

export interface RectPx {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

/** Map a dragged pixel rectangle onto the covered k-range and value-range. */
export function rectToRegion(rect: RectPx, layout: HeatmapLayout): Region {
  const left = clamp(Math.min(rect.x0, rect.x1), 0, layout.width);
  const right = clamp(Math.max(rect.x0, rect.x1), 0, layout.width);
  const top = clamp(Math.min(rect.y0, rect.y1), 0, layout.height);
  const bottom = clamp(Math.max(rect.y0, rect.y1), 0, layout.height);

  const cellW = layout.width / layout.kMax;
  const cellH = layout.height / layout.bins;

  // cells whose span intersects the rectangle; a degenerate drag still
  // covers the cell under the cursor
  const kMin = clamp(Math.floor(left / cellW) + 1, 1, layout.kMax);
  const kMax = clamp(Math.ceil(right / cellW), kMin, layout.kMax);

  const binHi = clamp(layout.bins - Math.floor(top / cellH), 1, layout.bins);
  const binLo = clamp(layout.bins - Math.ceil(bottom / cellH) + 1, 1, binHi);

  return {
    kMin,
    kMax,
    vMin: layout.binMin + (binLo - 1) * layout.binWidth,
    vMax: layout.binMin + binHi * layout.binWidth,
  };
}

/** Pixel rectangle that exactly covers a region (for redrawing the brush). */
export function regionToRect(region: Region, layout: HeatmapLayout): RectPx {
  const cellW = layout.width / layout.kMax;
  const cellH = layout.height / layout.bins;
  const binLo = (region.vMin - layout.binMin) / layout.binWidth;
  const binHi = (region.vMax - layout.binMin) / layout.binWidth;
  return {
    x0: (region.kMin - 1) * cellW,
    x1: region.kMax * cellW,
    y0: layout.height - binHi * cellH,
    y1: layout.height - binLo * cellH,
  };
}
