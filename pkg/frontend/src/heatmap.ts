/**
 * Raster heatmap with a rectangle brush.
 *
 * The grid is painted once into an offscreen bins x k canvas and scaled up
 * with image smoothing disabled, so every screen cell maps to exactly one
 * histogram bin. Dragging emits the covered region; the resulting id set
 * arrives asynchronously and stale selections are dropped by the client.
 */

import type { Grid, Region } from "./api";
import { HeatmapLayout, RectPx, rectToRegion, regionToRect } from "./brush";
import { rampColor } from "./util";

export class HeatmapView {
  private readonly canvas: HTMLCanvasElement;
  private readonly overlay: HTMLCanvasElement;
  private readonly layout: HeatmapLayout;
  private raster: HTMLCanvasElement | null = null;
  private dragStart: { x: number; y: number } | null = null;
  private brushRect: RectPx | null = null;

  constructor(
    host: HTMLElement,
    private readonly grid: Grid,
    private readonly onBrush: (region: Region | null) => void,
    cssWidth = 720,
    cssHeight = 360,
  ) {
    this.layout = {
      kMax: grid.kMax,
      bins: grid.bins,
      binMin: grid.binMin,
      binWidth: grid.binWidth,
      width: cssWidth,
      height: cssHeight,
    };
    this.canvas = document.createElement("canvas");
    this.overlay = document.createElement("canvas");
    for (const c of [this.canvas, this.overlay]) {
      c.width = cssWidth;
      c.height = cssHeight;
      c.className = "heatmap-layer";
    }
    this.overlay.className = "heatmap-layer heatmap-overlay";
    const wrap = document.createElement("div");
    wrap.className = "heatmap-wrap";
    wrap.style.width = `${cssWidth}px`;
    wrap.style.height = `${cssHeight}px`;
    wrap.append(this.canvas, this.overlay);
    host.appendChild(wrap);

    this.overlay.addEventListener("mousedown", this.handleDown);
    this.overlay.addEventListener("mousemove", this.handleMove);
    window.addEventListener("mouseup", this.handleUp);
    this.overlay.addEventListener("dblclick", () => this.clearBrush());
    this.paint();
  }

  private buildRaster(): HTMLCanvasElement {
    const raster = document.createElement("canvas");
    raster.width = this.grid.kMax;
    raster.height = this.grid.bins;
    const ctx = raster.getContext("2d")!;
    const img = ctx.createImageData(this.grid.kMax, this.grid.bins);
    for (let bin = 0; bin < this.grid.bins; bin++) {
      // grid row 0 is the lowest bin; image row 0 is the top
      const srcRow = this.grid.bins - 1 - bin;
      for (let k = 0; k < this.grid.kMax; k++) {
        const v = this.grid.values[srcRow * this.grid.kMax + k];
        const [r, g, b] = rampColor(v);
        const off = (bin * this.grid.kMax + k) * 4;
        img.data[off] = r;
        img.data[off + 1] = g;
        img.data[off + 2] = b;
        img.data[off + 3] = 255;
      }
    }
    ctx.putImageData(img, 0, 0);
    return raster;
  }

  private paint(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    this.raster ??= this.buildRaster();
    ctx.imageSmoothingEnabled = false;   // nearest neighbor: bins stay crisp
    ctx.clearRect(0, 0, this.layout.width, this.layout.height);
    ctx.drawImage(this.raster, 0, 0, this.layout.width, this.layout.height);
  }

  private pos(ev: MouseEvent): { x: number; y: number } {
    const r = this.overlay.getBoundingClientRect();
    return { x: ev.clientX - r.left, y: ev.clientY - r.top };
  }

  private handleDown = (ev: MouseEvent): void => {
    this.dragStart = this.pos(ev);
  };

  private handleMove = (ev: MouseEvent): void => {
    if (!this.dragStart) return;
    const p = this.pos(ev);
    this.brushRect = { x0: this.dragStart.x, y0: this.dragStart.y, x1: p.x, y1: p.y };
    this.drawBrush();
  };

  private handleUp = (ev: MouseEvent): void => {
    if (!this.dragStart) return;
    const p = this.pos(ev);
    const rect: RectPx = { x0: this.dragStart.x, y0: this.dragStart.y, x1: p.x, y1: p.y };
    this.dragStart = null;
    const region = rectToRegion(rect, this.layout);
    this.brushRect = regionToRect(region, this.layout);
    this.drawBrush();
    this.onBrush(region);
  };

  clearBrush(): void {
    this.brushRect = null;
    this.drawBrush();
    this.onBrush(null);
  }

  /** Programmatic brush (used by tests and by detector evidence links). */
  setRegion(region: Region | null): void {
    this.brushRect = region ? regionToRect(region, this.layout) : null;
    this.drawBrush();
  }

  private drawBrush(): void {
    const ctx = this.overlay.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.layout.width, this.layout.height);
    if (!this.brushRect) return;
    const { x0, y0, x1, y1 } = this.brushRect;
    const x = Math.min(x0, x1);
    const y = Math.min(y0, y1);
    const w = Math.abs(x1 - x0);
    const h = Math.abs(y1 - y0);
    ctx.fillStyle = "rgba(255,255,255,0.15)";
    ctx.fillRect(x, y, w, h);
    ctx.strokeStyle = "#ff5a5a";
    ctx.lineWidth = 1.5;
    ctx.strokeRect(x, y, w, h);
  }
}
